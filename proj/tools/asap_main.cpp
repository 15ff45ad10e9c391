// Copyright 2026 The asap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "asap/json_io.hpp"
#include "asap/reasoner.hpp"
#include "asap/remote_reasoner.hpp"
#include "asap/session.hpp"

namespace {

// Exit codes are a stable contract: 0 success, 2 validation/input error,
// 3 unknown device, 4 indeterminate diagnosis, 5 chat IO failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnknownDevice = 3;
constexpr int kExitIndeterminate = 4;
constexpr int kExitChatIo = 5;

struct CliConfig {
  std::string bundle_path;
  std::string devices_path;
  std::string history_path;
  std::string kb_dir;
  std::string worklog_path = "asap_worklog.jsonl";
  std::string reasoner = "builtin";
  std::size_t top_k = 5;
  std::string format = "text";
};

void add_common_options(CLI::App* cmd, CliConfig* config) {
  cmd->add_option("--bundle", config->bundle_path,
                  "Profile bundle JSON for one experiment")
      ->required();
  cmd->add_option("--devices", config->devices_path,
                  "Device registry JSON keyed by device family")
      ->required();
  cmd->add_option("--history", config->history_path,
                  "Optimization history JSON (optional)");
  cmd->add_option("--kb", config->kb_dir, "Knowledge corpus directory (optional)");
  cmd->add_option("--worklog", config->worklog_path,
                  "Append-only session worklog path");
  cmd->add_option("--reasoner", config->reasoner, "Narration backend")
      ->check(CLI::IsMember({"builtin", "remote"}));
  cmd->add_option("--top-k", config->top_k, "Number of top ops to analyze")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", config->format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}));
}

// Required inputs must exist before any work starts.
void check_input_paths(const CliConfig& config) {
  auto require = [](const std::string& path, const char* what) {
    if (path.empty()) return;
    if (!std::filesystem::exists(path))
      throw asap::IoFailure(std::string(what) + " not found: " + path);
  };
  require(config.bundle_path, "bundle file");
  require(config.devices_path, "device registry file");
  require(config.history_path, "history file");
  require(config.kb_dir, "knowledge corpus directory");
}

struct LoadedSession {
  asap::ProfileBundle bundle;
  std::unique_ptr<asap::Reasoner> reasoner;
  std::unique_ptr<asap::Session> session;
};

LoadedSession load_session(const CliConfig& config) {
  check_input_paths(config);
  LoadedSession loaded;
  loaded.bundle = asap::load_profile_bundle(config.bundle_path);

  asap::SessionConfig session_config;
  session_config.registry = asap::load_device_registry(config.devices_path);
  if (!config.history_path.empty())
    session_config.history = asap::load_history(config.history_path);
  if (!config.kb_dir.empty())
    session_config.knowledge =
        asap::index_corpus(asap::load_knowledge_corpus(config.kb_dir));
  session_config.top_k = config.top_k;

  if (config.reasoner == "remote") {
    loaded.reasoner = std::make_unique<asap::RemoteReasoner>(
        asap::RemoteReasonerConfig::from_env());
  } else {
    loaded.reasoner = std::make_unique<asap::BuiltinReasoner>();
  }
  loaded.session = std::make_unique<asap::Session>(
      std::move(session_config), config.worklog_path, *loaded.reasoner);
  return loaded;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const asap::UnknownDevice& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknownDevice;
  } catch (const asap::IndeterminateDiagnosis& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIndeterminate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int run_analyze(const CliConfig& config) {
  return run_guarded([&] {
    LoadedSession loaded = load_session(config);
    const std::string text =
        loaded.session->handle_event(asap::AnalyzeEvent{loaded.bundle});
    if (config.format == "structured") {
      std::cout << nlohmann::json(*loaded.session->state().report).dump(2)
                << "\n";
    } else {
      std::cout << text;
    }
    return kExitOk;
  });
}

int run_propose(const CliConfig& config) {
  return run_guarded([&] {
    LoadedSession loaded = load_session(config);
    loaded.session->handle_event(asap::AnalyzeEvent{loaded.bundle});
    const std::string text = loaded.session->handle_event(asap::ProposeEvent{});
    if (config.format == "structured") {
      const nlohmann::json doc = {
          {"experiment_id", loaded.bundle.experiment.experiment_id},
          {"proposals", *loaded.session->state().proposals}};
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << text;
    }
    return kExitOk;
  });
}

bool contains(const std::string& haystack, const char* needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string lowercase(std::string text) {
  for (char& ch : text)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return text;
}

constexpr const char* kChatHelp =
    "Try: 'analyze', 'propose', 'which one do you recommend?', "
    "'are you sure?', 'do the others look more promising?', "
    "'still confident?', or 'quit'.";

int run_chat(const CliConfig& config) {
  LoadedSession loaded;
  try {
    loaded = load_session(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  asap::Session& session = *loaded.session;

  std::string line;
  while (true) {
    std::cout << "asap> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    const std::string intent = lowercase(line);
    try {
      session.note_user_input(line);
      if (contains(intent, "quit") || contains(intent, "exit")) {
        std::cout << "Session closed; worklog saved to " << config.worklog_path
                  << "\n";
        break;
      }
      std::optional<asap::Event> event;
      if (contains(intent, "still")) {
        event = asap::ChallengeEvent{asap::ChallengeKind::kStillConfident};
      } else if (contains(intent, "sure") || contains(intent, "confident")) {
        event = asap::ChallengeEvent{asap::ChallengeKind::kAreYouSure};
      } else if (contains(intent, "other") || contains(intent, "more promising")) {
        event = asap::ChallengeEvent{asap::ChallengeKind::kOthersLookBetter};
      } else if (contains(intent, "recommend") || contains(intent, "which one")) {
        event = asap::RecommendEvent{};
      } else if (contains(intent, "propose")) {
        event = asap::ProposeEvent{};
      } else if (contains(intent, "analyze")) {
        event = asap::AnalyzeEvent{loaded.bundle};
      }
      if (!event) {
        std::cout << kChatHelp << "\n";
        continue;
      }
      std::cout << session.handle_event(*event);
    } catch (const asap::IoFailure& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitChatIo;
    } catch (const asap::CorruptWorklog& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitChatIo;
    } catch (const asap::IllegalTransition&) {
      std::cout << "Not yet: run the earlier steps first. " << kChatHelp << "\n";
    } catch (const asap::Error& e) {
      std::cout << "That step failed: " << e.what() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharding advisor: diagnoses accelerator training bottlenecks "
               "and proposes mesh configurations"};
  app.require_subcommand(1);

  CliConfig config;
  CLI::App* analyze = app.add_subcommand("analyze", "Run the bottleneck analysis");
  CLI::App* propose =
      app.add_subcommand("propose", "Analyze, then print three mesh proposals");
  CLI::App* chat = app.add_subcommand("chat", "Interactive advisory dialogue");
  add_common_options(analyze, &config);
  add_common_options(propose, &config);
  add_common_options(chat, &config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  if (analyze->parsed()) return run_analyze(config);
  if (propose->parsed()) return run_propose(config);
  return run_chat(config);
}
