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

#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "asap/json_io.hpp"
#include "asap/reasoner.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Worklog: an append-only, line-delimited record of user inputs, tool calls,
// tool results, and rendered responses. One JSON object per line so appends
// are crash-safe and the file is replayable mid-session.
// ---------------------------------------------------------------------------

enum class WorklogEntryKind { kUserInput, kToolCall, kToolResult, kReasonerOutput };

inline std::string to_string(WorklogEntryKind kind) {
  switch (kind) {
    case WorklogEntryKind::kUserInput: return "user_input";
    case WorklogEntryKind::kToolCall: return "tool_call";
    case WorklogEntryKind::kToolResult: return "tool_result";
    case WorklogEntryKind::kReasonerOutput: return "reasoner_output";
  }
  return "user_input";
}

inline WorklogEntryKind parse_worklog_kind(const std::string& text) {
  if (text == "user_input") return WorklogEntryKind::kUserInput;
  if (text == "tool_call") return WorklogEntryKind::kToolCall;
  if (text == "tool_result") return WorklogEntryKind::kToolResult;
  if (text == "reasoner_output") return WorklogEntryKind::kReasonerOutput;
  throw SchemaError("unknown worklog entry kind '" + text + "'");
}

struct WorklogEntry {
  std::int64_t sequence_no = 0;
  std::string timestamp;  // ISO-8601 UTC
  WorklogEntryKind kind = WorklogEntryKind::kUserInput;
  std::string payload;

  friend bool operator==(const WorklogEntry&, const WorklogEntry&) = default;
};

inline void to_json(nlohmann::json& j, const WorklogEntry& entry) {
  j = nlohmann::json{{"sequence_no", entry.sequence_no},
                     {"timestamp", entry.timestamp},
                     {"kind", to_string(entry.kind)},
                     {"payload", entry.payload}};
}

inline void from_json(const nlohmann::json& j, WorklogEntry& entry) {
  j.at("sequence_no").get_to(entry.sequence_no);
  j.at("timestamp").get_to(entry.timestamp);
  entry.kind = parse_worklog_kind(j.at("kind").get<std::string>());
  j.at("payload").get_to(entry.payload);
}

inline std::string now_utc_iso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// Reads every entry of an existing worklog, enforcing well-formed lines and
// strictly increasing sequence numbers.
inline std::vector<WorklogEntry> read_worklog(const std::filesystem::path& path) {
  std::vector<WorklogEntry> entries;
  std::ifstream in(path);
  if (!in) return entries;  // absent file == empty log
  std::string line;
  std::int64_t last_sequence = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    WorklogEntry entry;
    try {
      entry = nlohmann::json::parse(line).get<WorklogEntry>();
    } catch (const nlohmann::json::exception& e) {
      throw CorruptWorklog("bad worklog line " + std::to_string(line_no) + ": " +
                           e.what());
    } catch (const SchemaError& e) {
      throw CorruptWorklog("bad worklog line " + std::to_string(line_no) + ": " +
                           e.what());
    }
    if (entry.sequence_no <= last_sequence)
      throw CorruptWorklog("sequence number not increasing at line " +
                           std::to_string(line_no));
    last_sequence = entry.sequence_no;
    entries.push_back(std::move(entry));
  }
  return entries;
}

class WorklogWriter {
 public:
  explicit WorklogWriter(std::filesystem::path path) : path_(std::move(path)) {
    const std::vector<WorklogEntry> existing = read_worklog(path_);
    next_sequence_ = existing.empty() ? 1 : existing.back().sequence_no + 1;
  }

  const std::filesystem::path& path() const { return path_; }

  // Appends one line and flushes before returning, so a crash after append
  // never loses the entry.
  WorklogEntry append(WorklogEntryKind kind, const std::string& payload) {
    WorklogEntry entry{next_sequence_, now_utc_iso8601(), kind, payload};
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoFailure("cannot open worklog for append: " + path_.string());
    out << nlohmann::json(entry).dump() << '\n';
    out.flush();
    if (!out) throw IoFailure("cannot write worklog entry: " + path_.string());
    ++next_sequence_;
    return entry;
  }

 private:
  std::filesystem::path path_;
  std::int64_t next_sequence_ = 1;
};

// ---------------------------------------------------------------------------
// Session state machine: Idle -> Analyzed -> Proposed -> Recommended, with
// challenges keeping Recommended.
// ---------------------------------------------------------------------------

enum class Phase { kIdle, kAnalyzed, kProposed, kRecommended };

inline std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kIdle: return "idle";
    case Phase::kAnalyzed: return "analyzed";
    case Phase::kProposed: return "proposed";
    case Phase::kRecommended: return "recommended";
  }
  return "idle";
}

struct SessionState {
  Phase phase = Phase::kIdle;
  std::optional<AnalysisReport> report;
  std::optional<std::vector<Proposal>> proposals;
  std::optional<Recommendation> recommendation;
  std::vector<WorklogEntry> transcript;
};

inline void to_json(nlohmann::json& j, const SessionState& state) {
  j = nlohmann::json{{"phase", to_string(state.phase)},
                     {"transcript", state.transcript}};
  detail::put_optional(j, "report", state.report);
  detail::put_optional(j, "proposals", state.proposals);
  detail::put_optional(j, "recommendation", state.recommendation);
}

struct AnalyzeEvent {
  ProfileBundle bundle;
};
struct ProposeEvent {};
struct RecommendEvent {};
struct ChallengeEvent {
  ChallengeKind kind = ChallengeKind::kAreYouSure;
};

using Event = std::variant<AnalyzeEvent, ProposeEvent, RecommendEvent, ChallengeEvent>;

struct SessionConfig {
  DeviceRegistry registry;
  std::vector<OptimizationRecord> history;
  RetrievalIndex knowledge;
  std::size_t top_k = 5;
};

// Reconstructs the state a session reached by re-reading its worklog. Only
// tool results carry state; reasoner prose and user inputs are transcript
// context.
inline SessionState replay_worklog(const std::filesystem::path& path) {
  SessionState state;
  state.transcript = read_worklog(path);
  for (const WorklogEntry& entry : state.transcript) {
    if (entry.kind != WorklogEntryKind::kToolResult) continue;
    nlohmann::json payload;
    try {
      payload = nlohmann::json::parse(entry.payload);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptWorklog("tool result payload is not JSON at sequence " +
                           std::to_string(entry.sequence_no) + ": " + e.what());
    }
    if (!payload.contains("result")) continue;  // errors and warnings
    const std::string tool = payload.value("tool", "");
    try {
      if (tool == "analyze") {
        state.report = payload.at("result").get<AnalysisReport>();
        state.phase = Phase::kAnalyzed;
      } else if (tool == "generate-proposals") {
        state.proposals = payload.at("result").get<std::vector<Proposal>>();
        state.phase = Phase::kProposed;
      } else if (tool == "recommend") {
        state.recommendation = payload.at("result").get<Recommendation>();
        state.phase = Phase::kRecommended;
      }
    } catch (const nlohmann::json::exception& e) {
      throw CorruptWorklog("unreadable " + tool + " result at sequence " +
                           std::to_string(entry.sequence_no) + ": " + e.what());
    }
  }
  return state;
}

class Session {
 public:
  Session(SessionConfig config, std::filesystem::path worklog_path,
          Reasoner& reasoner)
      : config_(std::move(config)),
        worklog_(std::move(worklog_path)),
        reasoner_(reasoner) {}

  const SessionState& state() const { return state_; }

  // Records free-form user text (chat lines) without touching the state.
  void note_user_input(const std::string& text) {
    record(worklog_.append(WorklogEntryKind::kUserInput, text));
  }

  std::string handle_event(const Event& event) {
    return std::visit([this](const auto& e) { return dispatch(e); }, event);
  }

 private:
  void record(WorklogEntry entry) {
    state_.transcript.push_back(std::move(entry));
  }

  void log_tool_call(const std::string& tool, const nlohmann::json& args) {
    record(worklog_.append(WorklogEntryKind::kToolCall,
                           nlohmann::json{{"tool", tool}, {"args", args}}.dump()));
  }

  void log_tool_result(const std::string& tool, const nlohmann::json& result) {
    record(worklog_.append(
        WorklogEntryKind::kToolResult,
        nlohmann::json{{"tool", tool}, {"result", result}}.dump()));
  }

  void log_tool_error(const std::string& tool, const std::string& message) {
    record(worklog_.append(
        WorklogEntryKind::kToolResult,
        nlohmann::json{{"tool", tool}, {"error", message}}.dump()));
  }

  std::string narrate(const RenderContext& context) {
    const RenderResult rendered = reasoner_.render(context);
    for (const std::string& warning : rendered.warnings) {
      record(worklog_.append(
          WorklogEntryKind::kToolResult,
          nlohmann::json{{"tool", "reasoner"}, {"warning", warning}}.dump()));
    }
    record(worklog_.append(WorklogEntryKind::kReasonerOutput, rendered.text));
    return rendered.text;
  }

  void require_phase(Phase expected, const std::string& event_name) {
    if (state_.phase != expected)
      throw IllegalTransition("event '" + event_name +
                              "' is illegal in phase '" + to_string(state_.phase) +
                              "'");
  }

  std::string dispatch(const AnalyzeEvent& event) {
    require_phase(Phase::kIdle, "analyze");
    log_tool_call("analyze",
                  {{"experiment_id", event.bundle.experiment.experiment_id},
                   {"device_type", event.bundle.experiment.device_type}});
    AnalysisReport report;
    try {
      const DeviceSpec& device =
          resolve_device(config_.registry, event.bundle.experiment.device_type);
      report = build_analysis_report(event.bundle, device, config_.top_k);
    } catch (const Error& e) {
      log_tool_error("analyze", e.what());
      throw;
    }
    log_tool_result("analyze", report);
    state_.report = report;
    state_.phase = Phase::kAnalyzed;
    return narrate(report);
  }

  std::string dispatch(const ProposeEvent&) {
    require_phase(Phase::kAnalyzed, "propose");
    const AnalysisReport& report = *state_.report;

    ScenarioKey scenario;
    scenario.bottleneck_class = report.inefficiency.bottleneck_class;
    scenario.mesh = report.experiment.baseline_mesh;
    std::vector<PrecedentMatch> precedents;
    std::vector<RetrievalHit> kb_hits;
    std::vector<Proposal> proposals;
    try {
      scenario.device_family =
          resolve_device(config_.registry, report.experiment.device_type)
              .device_family;
      log_tool_call("find-similar-optimizations",
                    {{"device_family", scenario.device_family},
                     {"bottleneck_class", to_string(scenario.bottleneck_class)},
                     {"mesh", scenario.mesh}});
      precedents = find_similar_optimizations(config_.history, scenario, 3);
      nlohmann::json precedent_summary = nlohmann::json::array();
      for (const PrecedentMatch& match : precedents) {
        precedent_summary.push_back(
            {{"record_id", match.record.record_id}, {"score", match.score}});
      }
      log_tool_result("find-similar-optimizations", precedent_summary);

      const std::string query = knowledge_query(scenario.bottleneck_class);
      log_tool_call("query-knowledge", {{"query", query}});
      kb_hits = query_knowledge(config_.knowledge, query, 3);
      nlohmann::json hit_summary = nlohmann::json::array();
      for (const RetrievalHit& hit : kb_hits) {
        hit_summary.push_back({{"doc_id", hit.doc.doc_id}, {"score", hit.score}});
      }
      log_tool_result("query-knowledge", hit_summary);

      log_tool_call("generate-proposals",
                    {{"experiment_id", report.experiment.experiment_id}});
      proposals = generate_proposals(report, precedents, kb_hits);
    } catch (const Error& e) {
      log_tool_error("generate-proposals", e.what());
      throw;
    }
    log_tool_result("generate-proposals", proposals);
    state_.proposals = proposals;
    state_.phase = Phase::kProposed;
    return narrate(ProposalContext{report.experiment.experiment_id, proposals});
  }

  std::string dispatch(const RecommendEvent&) {
    require_phase(Phase::kProposed, "recommend");
    log_tool_call("recommend", nlohmann::json::object());
    Recommendation recommendation;
    try {
      recommendation = recommend(*state_.proposals);
    } catch (const Error& e) {
      log_tool_error("recommend", e.what());
      throw;
    }
    log_tool_result("recommend", recommendation);
    state_.recommendation = recommendation;
    state_.phase = Phase::kRecommended;
    return narrate(recommendation);
  }

  std::string dispatch(const ChallengeEvent& event) {
    require_phase(Phase::kRecommended, "challenge");
    log_tool_call("rebut", {{"challenge", to_string(event.kind)}});
    Rebuttal rebuttal;
    try {
      rebuttal = rebut(event.kind, state_.recommendation, *state_.proposals,
                       *state_.report);
    } catch (const Error& e) {
      log_tool_error("rebut", e.what());
      throw;
    }
    log_tool_result("rebut", rebuttal);
    return narrate(rebuttal);
  }

  static std::string knowledge_query(BottleneckClass klass) {
    switch (klass) {
      case BottleneckClass::kComputeBound:
        return "compute bound workload data parallelism throughput";
      case BottleneckClass::kHbmBound:
        return "hbm memory pressure model parallelism replication footprint";
      case BottleneckClass::kCommunicationBound:
        return "collective communication overhead all-reduce model parallelism";
      default:
        return "accelerator bottleneck mesh tuning";
    }
  }

  SessionConfig config_;
  WorklogWriter worklog_;
  Reasoner& reasoner_;
  SessionState state_;
};

}  // namespace asap
