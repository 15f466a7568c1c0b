// Copyright 2026 The partdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP backend for the external explanation provider. Speaks the widely
// supported chat-completions shape:
//   POST <endpoint>  {"model": ..., "messages": [...], "temperature": 0}
//   -> {"choices": [{"message": {"content": "..."}}]}

#pragma once

#include <cstdlib>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "partdp/error.hpp"
#include "partdp/explain.hpp"

namespace partdp {

struct LlmConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model = "gpt-4";
  std::string api_key;
  int timeout_seconds = 30;
  int retries = 1;

  bool configured() const { return !endpoint.empty(); }

  // PARTDP_LLM_ENDPOINT, PARTDP_LLM_MODEL, PARTDP_LLM_API_KEY.
  static LlmConfig from_env() {
    LlmConfig c;
    if (const char* v = std::getenv("PARTDP_LLM_ENDPOINT")) c.endpoint = v;
    if (const char* v = std::getenv("PARTDP_LLM_MODEL")) c.model = v;
    if (const char* v = std::getenv("PARTDP_LLM_API_KEY")) c.api_key = v;
    return c;
  }
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint `" + url + "` lacks a scheme");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(LlmConfig config) : config_(std::move(config)), url_(split_url(config_.endpoint)) {}

  std::string complete(const std::string& prompt) override {
    const nlohmann::json body = {
        {"model", config_.model},
        {"temperature", 0},
        {"messages",
         nlohmann::json::array({{{"role", "system"},
                                 {"content", "You explain differential-privacy releases to non-experts."}},
                                {{"role", "user"}, {"content", prompt}}})},
    };
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
      httplib::Client client(url_.origin);
      client.set_connection_timeout(config_.timeout_seconds, 0);
      client.set_read_timeout(config_.timeout_seconds, 0);
      client.set_write_timeout(config_.timeout_seconds, 0);
      httplib::Headers headers;
      if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

      auto res = client.Post(url_.path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP status " + std::to_string(res->status);
        continue;
      }
      try {
        const auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedProviderResponse, std::string("unexpected provider payload: ") + e.what());
      }
    }
    throw Error(ErrorCode::kProviderUnavailable, "explanation provider at " + config_.endpoint + ": " + last_error);
  }

 private:
  LlmConfig config_;
  ParsedUrl url_;
};

}  // namespace partdp
