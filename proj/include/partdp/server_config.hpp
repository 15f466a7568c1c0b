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

// Server settings. Sources, later ones winning: built-in defaults, an
// optional JSON config file, then PARTDP_* environment variables.
//
//   config key         environment variable        default
//   bind               PARTDP_BIND                 127.0.0.1
//   port               PARTDP_PORT                 8080
//   total_budget       PARTDP_TOTAL_BUDGET         4.0
//   policy_file        PARTDP_POLICY_FILE          built-in strict/standard/open
//   raw_export         PARTDP_RAW_EXPORT           false
//   snapshot_dir       PARTDP_SNAPSHOT_DIR         (none)
//   explain_provider   PARTDP_EXPLAIN_PROVIDER     template
//   llm_endpoint       PARTDP_LLM_ENDPOINT         (none)
//   llm_model          PARTDP_LLM_MODEL            gpt-4
//   (no file key)      PARTDP_LLM_API_KEY          (none)
//   webui_dir          PARTDP_WEBUI_DIR            (none)

#pragma once

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "partdp/error.hpp"
#include "partdp/llm_client.hpp"
#include "partdp/policy.hpp"
#include "partdp/service.hpp"

namespace partdp {

struct ServerSettings {
  std::string bind = "127.0.0.1";
  int port = 8080;
  double total_budget = kDefaultTotalBudget;
  std::string policy_file;
  bool raw_export = false;
  std::string snapshot_dir;
  ProviderKind explain_provider = ProviderKind::kTemplate;
  LlmConfig llm;
  std::string webui_dir;

  void apply_json(const nlohmann::json& j) {
    bind = j.value("bind", bind);
    port = j.value("port", port);
    total_budget = j.value("total_budget", total_budget);
    policy_file = j.value("policy_file", policy_file);
    raw_export = j.value("raw_export", raw_export);
    snapshot_dir = j.value("snapshot_dir", snapshot_dir);
    if (j.contains("explain_provider")) explain_provider = parse_provider(j.at("explain_provider").get<std::string>());
    llm.endpoint = j.value("llm_endpoint", llm.endpoint);
    llm.model = j.value("llm_model", llm.model);
    webui_dir = j.value("webui_dir", webui_dir);
  }

  void apply_env() {
    auto env = [](const char* name) -> std::optional<std::string> {
      const char* v = std::getenv(name);
      if (v == nullptr || *v == '\0') return std::nullopt;
      return std::string(v);
    };
    if (auto v = env("PARTDP_BIND")) bind = *v;
    if (auto v = env("PARTDP_PORT")) port = parse_number<int>("PARTDP_PORT", *v);
    if (auto v = env("PARTDP_TOTAL_BUDGET")) total_budget = parse_number<double>("PARTDP_TOTAL_BUDGET", *v);
    if (auto v = env("PARTDP_POLICY_FILE")) policy_file = *v;
    if (auto v = env("PARTDP_RAW_EXPORT")) raw_export = (*v == "1" || *v == "true" || *v == "yes");
    if (auto v = env("PARTDP_SNAPSHOT_DIR")) snapshot_dir = *v;
    if (auto v = env("PARTDP_EXPLAIN_PROVIDER")) explain_provider = parse_provider(*v);
    if (auto v = env("PARTDP_LLM_ENDPOINT")) llm.endpoint = *v;
    if (auto v = env("PARTDP_LLM_MODEL")) llm.model = *v;
    if (auto v = env("PARTDP_LLM_API_KEY")) llm.api_key = *v;
    if (auto v = env("PARTDP_WEBUI_DIR")) webui_dir = *v;
  }

  void load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      apply_json(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "config file " + path + ": " + e.what());
    }
  }

  ServiceConfig service_config() const {
    if (!(total_budget > 0.0)) throw Error(ErrorCode::kInvalidArgument, "total_budget must be positive");
    ServiceConfig c;
    c.default_total_budget = total_budget;
    c.policies = policy_file.empty() ? PolicySet::defaults() : PolicySet::load(policy_file);
    c.allow_raw_export = raw_export;
    if (!snapshot_dir.empty()) c.snapshot_dir = snapshot_dir;
    c.explain_provider = explain_provider;
    if (explain_provider == ProviderKind::kExternalLlm && llm.configured()) {
      c.completion_client = std::make_shared<HttpCompletionClient>(llm);
    }
    return c;
  }

 private:
  static ProviderKind parse_provider(const std::string& v) {
    if (v == "template") return ProviderKind::kTemplate;
    if (v == "external_llm" || v == "external") return ProviderKind::kExternalLlm;
    throw Error(ErrorCode::kInvalidArgument, "unknown explanation provider `" + v + "`");
  }

  template <typename T>
  static T parse_number(const char* name, const std::string& v) {
    try {
      std::size_t used = 0;
      T out;
      if constexpr (std::is_same_v<T, int>) {
        out = std::stoi(v, &used);
      } else {
        out = std::stod(v, &used);
      }
      if (used == v.size()) return out;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " is not a number: " + v);
  }
};

}  // namespace partdp
