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

// JSON encodings of the domain types, shared by the HTTP API, the CLI report
// files, and session snapshots.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "partdp/analysis.hpp"
#include "partdp/dataset.hpp"
#include "partdp/dp.hpp"
#include "partdp/error.hpp"
#include "partdp/explain.hpp"
#include "partdp/mcda.hpp"

namespace partdp {

using nlohmann::json;

inline json error_json(const Error& e) {
  return {{"code", error_name(e.code())}, {"message", e.what()}, {"retryable", e.retryable()}};
}

// --- preferences -----------------------------------------------------------

inline void to_json(json& j, const PreferenceProfile& p) {
  j = {{"privacy", p.privacy},
       {"accuracy", p.accuracy},
       {"compliance_required", p.compliance_required},
       {"sensitivity", p.sensitivity}};
}

// Strict: every field is required and sliders must be integers in range.
inline PreferenceProfile profile_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidProfile, "preference profile must be a JSON object");
  auto slider = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
      throw Error(ErrorCode::kInvalidProfile, std::string("`") + key + "` must be an integer slider value");
    }
    return j.at(key).get<int>();
  };
  PreferenceProfile p;
  p.privacy = slider("privacy");
  p.accuracy = slider("accuracy");
  p.sensitivity = slider("sensitivity");
  if (!j.contains("compliance_required") || !j.at("compliance_required").is_boolean()) {
    throw Error(ErrorCode::kInvalidProfile, "`compliance_required` must be a boolean");
  }
  p.compliance_required = j.at("compliance_required").get<bool>();
  p.validate();
  return p;
}

inline void to_json(json& j, const CriterionWeights& w) {
  j = {{"privacy", w.privacy}, {"accuracy", w.accuracy}, {"compliance", w.compliance}, {"sensitivity", w.sensitivity}};
}

inline void from_json(const json& j, CriterionWeights& w) {
  w.privacy = j.at("privacy").get<double>();
  w.accuracy = j.at("accuracy").get<double>();
  w.compliance = j.at("compliance").get<double>();
  w.sensitivity = j.at("sensitivity").get<double>();
}

namespace detail {

inline json rows_json(const std::vector<double>& flat, std::size_t cols) {
  json rows = json::array();
  for (std::size_t i = 0; cols > 0 && i < flat.size() / cols; ++i) {
    rows.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i * cols),
                                       flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)));
  }
  return rows;
}

inline std::vector<double> flat_from_rows(const json& rows) {
  std::vector<double> flat;
  for (const auto& row : rows) {
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

}  // namespace detail

inline void to_json(json& j, const DecisionMatrix& m) {
  json criteria = json::array();
  for (const auto& c : m.criteria) {
    criteria.push_back({{"name", c.name}, {"orientation", c.orientation == Orientation::kBenefit ? "benefit" : "cost"}});
  }
  j = {{"alternatives", m.alternatives}, {"criteria", criteria}, {"values", detail::rows_json(m.values, m.cols())}};
}

inline void from_json(const json& j, DecisionMatrix& m) {
  m.alternatives = j.at("alternatives").get<std::vector<double>>();
  m.criteria.clear();
  for (const auto& c : j.at("criteria")) {
    m.criteria.push_back({c.at("name").get<std::string>(),
                          c.at("orientation").get<std::string>() == "benefit" ? Orientation::kBenefit
                                                                              : Orientation::kCost});
  }
  m.values = detail::flat_from_rows(j.at("values"));
}

inline void to_json(json& j, const SelectionResult& r) {
  const std::size_t cols = r.ideal.size();
  std::vector<bool> eligible(r.eligible.begin(), r.eligible.end());
  j = {{"epsilon_star", r.epsilon_star},
       {"selected_index", r.selected_index},
       {"alternatives", r.alternatives},
       {"closeness", r.closeness},
       {"d_plus", r.d_plus},
       {"d_minus", r.d_minus},
       {"eligible", eligible},
       {"cap_applied", r.cap_applied ? json(*r.cap_applied) : json(nullptr)},
       {"weights_used", r.weights_used},
       {"normalized", detail::rows_json(r.normalized, cols)},
       {"weighted", detail::rows_json(r.weighted, cols)},
       {"ideal", r.ideal},
       {"anti_ideal", r.anti_ideal}};
}

inline void from_json(const json& j, SelectionResult& r) {
  r.epsilon_star = j.at("epsilon_star").get<double>();
  r.selected_index = j.at("selected_index").get<std::size_t>();
  r.alternatives = j.at("alternatives").get<std::vector<double>>();
  r.closeness = j.at("closeness").get<std::vector<double>>();
  r.d_plus = j.at("d_plus").get<std::vector<double>>();
  r.d_minus = j.at("d_minus").get<std::vector<double>>();
  r.eligible = j.at("eligible").get<std::vector<bool>>();
  r.cap_applied = j.at("cap_applied").is_null() ? std::nullopt : std::optional<double>(j.at("cap_applied").get<double>());
  r.weights_used = j.at("weights_used").get<CriterionWeights>();
  r.normalized = detail::flat_from_rows(j.at("normalized"));
  r.weighted = detail::flat_from_rows(j.at("weighted"));
  r.ideal = j.at("ideal").get<std::vector<double>>();
  r.anti_ideal = j.at("anti_ideal").get<std::vector<double>>();
}

// --- dp / dataset -----------------------------------------------------------

inline void to_json(json& j, const LedgerEntry& e) {
  j = {{"epsilon", e.epsilon}, {"version_id", e.version_id}, {"timestamp", e.timestamp}};
}

inline void from_json(const json& j, LedgerEntry& e) {
  e.epsilon = j.at("epsilon").get<double>();
  e.version_id = j.at("version_id").get<VersionId>();
  e.timestamp = j.at("timestamp").get<std::int64_t>();
}

inline json ledger_json(const BudgetLedger& l) {
  return {{"total_budget", l.total_budget()},
          {"spent", l.spent()},
          {"remaining", l.remaining()},
          {"entries", l.entries()}};
}

inline BudgetLedger ledger_from_json(const json& j) {
  return BudgetLedger::replay(j.at("total_budget").get<double>(), j.at("entries").get<std::vector<LedgerEntry>>());
}

inline void to_json(json& j, const Provenance& p) {
  j = {{"epsilon_used", p.epsilon_used},
       {"seed", p.seed},
       {"mechanism", mechanism_name(p.mechanism)},
       {"delta_f", p.delta_f}};
}

inline void from_json(const json& j, Provenance& p) {
  p.epsilon_used = j.at("epsilon_used").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  if (j.at("mechanism").get<std::string>() != "laplace") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported mechanism in provenance");
  }
  p.mechanism = Mechanism::kLaplace;
  p.delta_f = j.at("delta_f").get<double>();
}

// Metadata only; payload values are not included.
inline json version_descriptor(const DatasetVersion& v) {
  const auto& d = v.data();
  return {{"version_id", v.version_id},
          {"parent_id", v.parent_id ? json(*v.parent_id) : json(nullptr)},
          {"shape", {d.series_count(), d.timestamp_count()}},
          {"provenance", v.provenance ? json(*v.provenance) : json(nullptr)}};
}

inline void to_json(json& j, const TimeSeriesDataset& d) {
  j = {{"series_ids", d.series_ids()},
       {"timestamps", d.timestamps()},
       {"values", std::vector<double>(d.values().begin(), d.values().end())},
       {"unit_label", d.unit_label()},
       {"timestamp_format", d.timestamp_format() == TimestampFormat::kIso8601 ? "iso8601" : "epoch"}};
}

inline TimeSeriesDataset dataset_from_json(const json& j) {
  return TimeSeriesDataset(
      j.at("series_ids").get<std::vector<std::string>>(), j.at("timestamps").get<std::vector<std::int64_t>>(),
      j.at("values").get<std::vector<double>>(), j.at("unit_label").get<std::string>(),
      j.at("timestamp_format").get<std::string>() == "iso8601" ? TimestampFormat::kIso8601
                                                               : TimestampFormat::kEpochSeconds);
}

// --- analysis / explain ----------------------------------------------------

inline void to_json(json& j, const UtilityReport& r) {
  j = {{"epsilon", r.epsilon},
       {"mae", r.mae},
       {"expected_mae", r.expected_mae},
       {"per_series_mae", r.per_series_mae},
       {"max_abs_error", r.max_abs_error}};
}

inline void from_json(const json& j, UtilityReport& r) {
  r.epsilon = j.at("epsilon").get<double>();
  r.mae = j.at("mae").get<double>();
  r.expected_mae = j.at("expected_mae").get<double>();
  r.per_series_mae = j.at("per_series_mae").get<std::vector<double>>();
  r.max_abs_error = j.at("max_abs_error").get<double>();
}

inline void to_json(json& j, const ProfileChange& c) {
  j = json::object();
  if (c.privacy) j["privacy"] = *c.privacy;
  if (c.accuracy) j["accuracy"] = *c.accuracy;
  if (c.compliance_required) j["compliance_required"] = *c.compliance_required;
  if (c.sensitivity) j["sensitivity"] = *c.sensitivity;
}

inline void from_json(const json& j, ProfileChange& c) {
  if (j.contains("privacy")) c.privacy = j.at("privacy").get<int>();
  if (j.contains("accuracy")) c.accuracy = j.at("accuracy").get<int>();
  if (j.contains("compliance_required")) c.compliance_required = j.at("compliance_required").get<bool>();
  if (j.contains("sensitivity")) c.sensitivity = j.at("sensitivity").get<int>();
}

inline void to_json(json& j, const RefinementSuggestion& s) {
  j = {{"description", s.description}, {"suggested_profile_change", s.suggested_profile_change}};
}

inline void from_json(const json& j, RefinementSuggestion& s) {
  s.description = j.at("description").get<std::string>();
  s.suggested_profile_change = j.at("suggested_profile_change").get<ProfileChange>();
}

inline void to_json(json& j, const ImpactReport& r) {
  j = {{"privacy_score", r.privacy_score},
       {"narrative", r.narrative},
       {"caveats", r.caveats},
       {"refinement_suggestions", r.refinement_suggestions},
       {"provider", provider_name(r.provider)}};
}

inline void from_json(const json& j, ImpactReport& r) {
  r.privacy_score = j.at("privacy_score").get<double>();
  r.narrative = j.at("narrative").get<std::string>();
  r.caveats = j.at("caveats").get<std::vector<std::string>>();
  r.refinement_suggestions = j.at("refinement_suggestions").get<std::vector<RefinementSuggestion>>();
  r.provider = j.at("provider").get<std::string>() == "external_llm" ? ProviderKind::kExternalLlm
                                                                     : ProviderKind::kTemplate;
}

}  // namespace partdp
