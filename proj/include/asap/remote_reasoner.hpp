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

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "asap/json_io.hpp"
#include "asap/reasoner.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Optional remote narration over a chat-completion-style HTTP endpoint. The
// remote service only rewrites prose: every mesh, metric, and confidence
// value is computed locally and embedded in the prompt, and any failure
// falls back to the builtin rendering with a logged warning.
// ---------------------------------------------------------------------------

struct NetworkFailure : Error {
  using Error::Error;
};

struct NonSuccessStatus : Error {
  using Error::Error;
};

struct MalformedResponse : Error {
  using Error::Error;
};

struct RemoteReasonerConfig {
  std::string url;
  std::string token;
  std::string model = "sharding-advisor";
  int timeout_sec = 30;

  static RemoteReasonerConfig from_env() {
    RemoteReasonerConfig config;
    if (const char* url = std::getenv("ASAP_REASONER_URL")) config.url = url;
    if (const char* token = std::getenv("ASAP_REASONER_TOKEN"))
      config.token = token;
    return config;
  }
};

namespace detail {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash, "/" when absent
};

inline SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw NetworkFailure("endpoint URL lacks a scheme: " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string extract_assistant_content(const nlohmann::json& body) {
  try {
    if (body.contains("choices") && body.at("choices").is_array() &&
        !body.at("choices").empty()) {
      const nlohmann::json& first = body.at("choices").at(0);
      if (first.contains("message") && first.at("message").contains("content"))
        return first.at("message").at("content").get<std::string>();
    }
    if (body.contains("message") && body.at("message").contains("content"))
      return body.at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    // fall through to the error below
  }
  throw MalformedResponse("response carries no assistant message content");
}

}  // namespace detail

// Sends one chat-completion request and returns the assistant text. The
// system prompt embeds the structured findings; the user message states the
// rendering intent.
inline std::string remote_render(const RemoteReasonerConfig& config,
                                 const std::string& context_json,
                                 const std::string& intent) {
  if (config.url.empty())
    throw NetworkFailure("no remote reasoner endpoint configured");
  const detail::SplitUrl url = detail::split_url(config.url);

  httplib::Client client(url.base);
  client.set_connection_timeout(config.timeout_sec, 0);
  client.set_read_timeout(config.timeout_sec, 0);
  client.set_write_timeout(config.timeout_sec, 0);

  httplib::Headers headers;
  if (!config.token.empty())
    headers.emplace("Authorization", "Bearer " + config.token);

  const nlohmann::json request = {
      {"model", config.model},
      {"messages",
       {{{"role", "system"},
         {"content",
          "You narrate accelerator sharding findings. Restate only the facts "
          "in this JSON context; never alter meshes, metrics, or confidence "
          "values.\n" +
              context_json}},
        {{"role", "user"}, {"content", intent}}}}};

  httplib::Result result =
      client.Post(url.path, headers, request.dump(), "application/json");
  if (!result)
    throw NetworkFailure("request to " + config.url + " failed: " +
                         httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300)
    throw NonSuccessStatus("endpoint returned HTTP " +
                           std::to_string(result->status));
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponse(std::string("response is not JSON: ") + e.what());
  }
  return detail::extract_assistant_content(body);
}

class RemoteReasoner : public Reasoner {
 public:
  explicit RemoteReasoner(RemoteReasonerConfig config)
      : config_(std::move(config)) {}

  RenderResult render(const RenderContext& context) override {
    const std::string context_json = serialize_context(context);
    const std::string intent = intent_for(context);
    try {
      RenderResult result;
      result.text = remote_render(config_, context_json, intent);
      return result;
    } catch (const Error& e) {
      RenderResult result = fallback_.render(context);
      result.warnings.push_back(
          std::string("remote reasoner unavailable, using builtin rendering: ") +
          e.what());
      return result;
    }
  }

 private:
  static std::string serialize_context(const RenderContext& context) {
    return std::visit(
        [](const auto& value) -> std::string {
          using T = std::decay_t<decltype(value)>;
          if constexpr (std::is_same_v<T, ProposalContext>) {
            const nlohmann::json j = {{"experiment_id", value.experiment_id},
                                      {"proposals", value.proposals}};
            return j.dump();
          } else {
            return nlohmann::json(value).dump();
          }
        },
        context);
  }

  static std::string intent_for(const RenderContext& context) {
    switch (context.index()) {
      case 0: return "Present the analysis report.";
      case 1: return "Present the sharding proposals.";
      case 2: return "Present the recommendation.";
      default: return "Answer the challenge while keeping the recommendation.";
    }
  }

  RemoteReasonerConfig config_;
  BuiltinReasoner fallback_;
};

}  // namespace asap
