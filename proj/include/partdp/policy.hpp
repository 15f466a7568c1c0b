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

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "partdp/error.hpp"
#include "partdp/privacy_rating.hpp"

namespace partdp {

// A regulation-derived ceiling on epsilon.
struct CompliancePolicy {
  std::string name;
  double epsilon_cap = kSafeEpsilonMax;
  std::string description;

  void validate() const {
    if (name.empty()) throw Error(ErrorCode::kInvalidPolicy, "policy name must not be empty");
    if (!in_safe_range(epsilon_cap)) {
      throw Error(ErrorCode::kInvalidPolicy, "policy `" + name + "` cap " + std::to_string(epsilon_cap) +
                                                 " outside the safe range [0.1, 2.0]");
    }
  }

  friend bool operator==(const CompliancePolicy&, const CompliancePolicy&) = default;
};

inline void to_json(nlohmann::json& j, const CompliancePolicy& p) {
  j = nlohmann::json{{"name", p.name}, {"epsilon_cap", p.epsilon_cap}, {"description", p.description}};
}

inline void from_json(const nlohmann::json& j, CompliancePolicy& p) {
  p.name = j.at("name").get<std::string>();
  p.epsilon_cap = j.at("epsilon_cap").get<double>();
  p.description = j.value("description", std::string());
}

class PolicySet {
 public:
  PolicySet() = default;

  explicit PolicySet(std::vector<CompliancePolicy> policies) : policies_(std::move(policies)) {
    for (std::size_t i = 0; i < policies_.size(); ++i) {
      policies_[i].validate();
      for (std::size_t k = 0; k < i; ++k) {
        if (policies_[k].name == policies_[i].name) {
          throw Error(ErrorCode::kInvalidPolicy, "duplicate policy name `" + policies_[i].name + "`");
        }
      }
    }
  }

  // The set shipped in config/policies.json.
  static PolicySet defaults() {
    return PolicySet({
        {"strict", 0.5, "Strong protection for highly sensitive public records."},
        {"standard", 1.0, "Typical ceiling for routine statistical releases."},
        {"open", 2.0, "Upper end of the safe range; utility-oriented releases."},
    });
  }

  // Accepts either a bare array of policies or {"policies": [...]}.
  static PolicySet from_json_text(std::string_view text) {
    try {
      const auto doc = nlohmann::json::parse(text);
      const auto& arr = doc.is_object() ? doc.at("policies") : doc;
      return PolicySet(arr.get<std::vector<CompliancePolicy>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidPolicy, std::string("malformed policy file: ") + e.what());
    }
  }

  static PolicySet load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read policy file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
  }

  const std::vector<CompliancePolicy>& all() const { return policies_; }

  std::optional<CompliancePolicy> find(std::string_view name) const {
    for (const auto& p : policies_) {
      if (p.name == name) return p;
    }
    return std::nullopt;
  }

  const CompliancePolicy& get(std::string_view name) const {
    for (const auto& p : policies_) {
      if (p.name == name) return p;
    }
    throw Error(ErrorCode::kUnknownPolicy, "unknown compliance policy `" + std::string(name) + "`");
  }

 private:
  std::vector<CompliancePolicy> policies_;
};

}  // namespace partdp
