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

// Preference-driven epsilon selection.
//
// Slider settings become criterion weights; each candidate epsilon is scored
// on four criteria; TOPSIS ranks candidates by relative closeness to the ideal
// point and the best eligible candidate is selected.
//
// Criteria, in column order:
//   privacy      benefit  1-5 privacy rating of a release at epsilon
//   error        cost     1 + ln(E(eps) / E(eps_max)), E(eps) = delta_f / eps
//                         is the expected per-cell absolute Laplace error
//   compliance   benefit  1 if eps <= policy cap else 0 (all 1 without policy)
//   risk         cost     sensitivity_level * eps
//
// Raw weights are (privacy slider, accuracy slider, 3 if compliance is
// required else 0, 0.25 * sensitivity slider), normalized to sum to one. With
// these constants the three reference profiles map to
//   privacy-first (5, 1, compliance on / cap 2.0, 3) -> 0.1
//   balanced      (3, 3, compliance off, 2)          -> 1.0
//   utility-first (1, 5, compliance off, 1)          -> 2.0
// and the selection is non-increasing in the privacy slider and
// non-decreasing in the accuracy slider over the whole slider grid.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partdp/error.hpp"
#include "partdp/policy.hpp"
#include "partdp/privacy_rating.hpp"

namespace partdp {

inline constexpr std::array<double, 5> kDefaultEpsilonGrid = {0.1, 0.5, 1.0, 1.5, 2.0};

inline constexpr double kComplianceRawWeight = 3.0;
inline constexpr double kRiskWeightScale = 0.25;

// Closeness values closer than this are treated as tied.
inline constexpr double kClosenessTieTolerance = 1e-12;

struct PreferenceProfile {
  int privacy = 3;      // 1-5
  int accuracy = 3;     // 1-5
  bool compliance_required = false;
  int sensitivity = 2;  // 1-3

  void validate() const {
    auto check = [](const char* name, int v, int lo, int hi) {
      if (v < lo || v > hi) {
        throw Error(ErrorCode::kInvalidProfile, std::string(name) + " slider must be in [" +
                                                    std::to_string(lo) + ", " + std::to_string(hi) +
                                                    "], got " + std::to_string(v));
      }
    };
    check("privacy", privacy, 1, 5);
    check("accuracy", accuracy, 1, 5);
    check("sensitivity", sensitivity, 1, 3);
  }

  friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;
};

struct CriterionWeights {
  double privacy = 0.0;
  double accuracy = 0.0;
  double compliance = 0.0;
  double sensitivity = 0.0;

  std::array<double, 4> as_array() const { return {privacy, accuracy, compliance, sensitivity}; }

  friend bool operator==(const CriterionWeights&, const CriterionWeights&) = default;
};

inline std::array<double, 4> raw_weights(const PreferenceProfile& profile) {
  return {static_cast<double>(profile.privacy), static_cast<double>(profile.accuracy),
          profile.compliance_required ? kComplianceRawWeight : 0.0,
          kRiskWeightScale * static_cast<double>(profile.sensitivity)};
}

inline CriterionWeights weights_from_raw(const std::array<double, 4>& raw) {
  double sum = 0.0;
  for (double r : raw) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kInvalidArgument, "raw criterion weights must be finite and non-negative");
    }
    sum += r;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::kInvalidArgument, "raw criterion weights sum to zero");
  return {raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum};
}

inline CriterionWeights normalize_weights(const PreferenceProfile& profile) {
  profile.validate();
  return weights_from_raw(raw_weights(profile));
}

enum class Orientation { kBenefit, kCost };

struct Criterion {
  std::string name;
  Orientation orientation = Orientation::kBenefit;
};

// Alternatives x criteria, row-major.
struct DecisionMatrix {
  std::vector<double> alternatives;
  std::vector<Criterion> criteria;
  std::vector<double> values;

  std::size_t rows() const { return alternatives.size(); }
  std::size_t cols() const { return criteria.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }

  void validate() const {
    if (alternatives.empty()) throw Error(ErrorCode::kEmptyGrid, "decision matrix has no alternatives");
    if (criteria.empty() || values.size() != rows() * cols()) {
      throw Error(ErrorCode::kDimensionMismatch, "decision matrix is " + std::to_string(values.size()) +
                                                     " cells for " + std::to_string(rows()) + " x " +
                                                     std::to_string(cols()));
    }
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "decision matrix entries must be finite and non-negative");
      }
    }
    std::vector<double> sorted = alternatives;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::kInvalidArgument, "decision matrix alternatives must be distinct");
    }
  }
};

// Throws unless `grid` is nonempty, strictly increasing, and inside the safe
// range.
inline void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::kEmptyGrid, "epsilon grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!in_safe_range(grid[i])) {
      throw Error(ErrorCode::kGridOutsideSafeRange,
                  "grid value " + std::to_string(grid[i]) + " outside the safe range [0.1, 2.0]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon grid must be strictly increasing");
    }
  }
}

// Expected per-cell absolute error of Lap(delta_f / epsilon).
inline double expected_abs_error(double delta_f, double epsilon) { return delta_f / epsilon; }

inline DecisionMatrix build_decision_matrix(std::span<const double> grid, double delta_f, int sensitivity,
                                            const std::optional<CompliancePolicy>& policy = std::nullopt) {
  validate_grid(grid);
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_f must be positive");
  }
  if (sensitivity < 1 || sensitivity > 3) {
    throw Error(ErrorCode::kInvalidProfile, "sensitivity must be in [1, 3]");
  }
  if (policy) policy->validate();

  DecisionMatrix m;
  m.alternatives.assign(grid.begin(), grid.end());
  m.criteria = {{"privacy", Orientation::kBenefit},
                {"error", Orientation::kCost},
                {"compliance", Orientation::kBenefit},
                {"risk", Orientation::kCost}};
  const double loosest_error = expected_abs_error(delta_f, kSafeEpsilonMax);
  m.values.reserve(grid.size() * 4);
  for (double eps : grid) {
    m.values.push_back(privacy_rating(eps));
    m.values.push_back(1.0 + std::log(expected_abs_error(delta_f, eps) / loosest_error));
    m.values.push_back(!policy || eps <= policy->epsilon_cap ? 1.0 : 0.0);
    m.values.push_back(static_cast<double>(sensitivity) * eps);
  }
  return m;
}

struct SelectionResult {
  double epsilon_star = 0.0;
  std::size_t selected_index = 0;
  std::vector<double> alternatives;
  std::vector<double> closeness;
  std::vector<double> d_plus;
  std::vector<double> d_minus;
  std::vector<bool> eligible;
  std::optional<double> cap_applied;
  CriterionWeights weights_used;
  // Intermediate matrices, row-major like DecisionMatrix::values.
  std::vector<double> normalized;
  std::vector<double> weighted;
  std::vector<double> ideal;
  std::vector<double> anti_ideal;
};

// TOPSIS with vector normalization. `eligible` (empty = all) restricts which
// alternatives may win; it does not alter the ideal points. Ties within
// kClosenessTieTolerance go to the smallest epsilon.
inline SelectionResult topsis(const DecisionMatrix& matrix, std::span<const double> weights,
                              const std::vector<bool>& eligible = {}) {
  matrix.validate();
  const std::size_t n = matrix.rows();
  const std::size_t k = matrix.cols();
  if (weights.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch, std::to_string(weights.size()) + " weights for " +
                                                   std::to_string(k) + " criteria");
  }
  if (!eligible.empty() && eligible.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "eligibility mask length differs from alternative count");
  }

  SelectionResult r;
  r.alternatives = matrix.alternatives;
  r.normalized.assign(n * k, 0.0);
  r.weighted.assign(n * k, 0.0);
  r.ideal.assign(k, 0.0);
  r.anti_ideal.assign(k, 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += matrix.at(i, j) * matrix.at(i, j);
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = norm > 0.0 ? matrix.at(i, j) / norm : 0.0;
      r.normalized[i * k + j] = x;
      r.weighted[i * k + j] = weights[j] * x;
    }
    double lo = r.weighted[j], hi = r.weighted[j];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, r.weighted[i * k + j]);
      hi = std::max(hi, r.weighted[i * k + j]);
    }
    const bool benefit = matrix.criteria[j].orientation == Orientation::kBenefit;
    r.ideal[j] = benefit ? hi : lo;
    r.anti_ideal[j] = benefit ? lo : hi;
  }

  r.closeness.resize(n);
  r.d_plus.resize(n);
  r.d_minus.resize(n);
  r.eligible.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dp = 0.0, dm = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = r.weighted[i * k + j];
      dp += (v - r.ideal[j]) * (v - r.ideal[j]);
      dm += (v - r.anti_ideal[j]) * (v - r.anti_ideal[j]);
    }
    r.d_plus[i] = std::sqrt(dp);
    r.d_minus[i] = std::sqrt(dm);
    const double denom = r.d_plus[i] + r.d_minus[i];
    r.closeness[i] = denom > 0.0 ? r.d_minus[i] / denom : 0.0;
    r.eligible[i] = eligible.empty() || eligible[i];
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.eligible[i]) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double diff = r.closeness[i] - r.closeness[*best];
    if (diff > kClosenessTieTolerance ||
        (std::fabs(diff) <= kClosenessTieTolerance && r.alternatives[i] < r.alternatives[*best])) {
      best = i;
    }
  }
  if (!best) throw Error(ErrorCode::kNoFeasibleAlternative, "no eligible epsilon alternative");
  r.selected_index = *best;
  r.epsilon_star = r.alternatives[*best];
  return r;
}

inline SelectionResult topsis_select(const DecisionMatrix& matrix, const CriterionWeights& weights) {
  if (matrix.cols() != 4) {
    throw Error(ErrorCode::kDimensionMismatch, "criterion weights cover 4 criteria, matrix has " +
                                                   std::to_string(matrix.cols()));
  }
  const auto w = weights.as_array();
  auto r = topsis(matrix, w);
  r.weights_used = weights;
  return r;
}

// Full pipeline over `grid` (the default grid unless given). When compliance
// is required and a policy is present, alternatives above the cap are also
// barred from selection outright.
inline SelectionResult select_epsilon(const PreferenceProfile& profile, double delta_f,
                                      const std::optional<CompliancePolicy>& policy = std::nullopt,
                                      std::span<const double> grid = kDefaultEpsilonGrid) {
  const CriterionWeights weights = normalize_weights(profile);
  const DecisionMatrix matrix = build_decision_matrix(grid, delta_f, profile.sensitivity, policy);

  std::vector<bool> mask(matrix.rows(), true);
  std::optional<double> cap;
  if (profile.compliance_required && policy) {
    cap = policy->epsilon_cap;
    for (std::size_t i = 0; i < matrix.rows(); ++i) mask[i] = matrix.alternatives[i] <= *cap;
  }

  const auto w = weights.as_array();
  auto r = topsis(matrix, w, mask);
  r.weights_used = weights;
  r.cap_applied = cap;
  return r;
}

// The three reference profiles. The privacy-first profile is evaluated under
// a compliance policy whose cap is the top of the safe range.
struct NamedProfile {
  std::string_view name;
  PreferenceProfile profile;
  std::optional<double> policy_cap;
};

inline const std::array<NamedProfile, 3> kCanonicalProfiles = {{
    {"privacy-first", {5, 1, true, 3}, 2.0},
    {"balanced", {3, 3, false, 2}, std::nullopt},
    {"utility-first", {1, 5, false, 1}, std::nullopt},
}};

}  // namespace partdp
