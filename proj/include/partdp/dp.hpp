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

// Laplace mechanism and sequential-composition budget accounting.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "partdp/dataset.hpp"
#include "partdp/error.hpp"
#include "partdp/privacy_rating.hpp"
#include "partdp/random.hpp"

namespace partdp {

inline constexpr double kDefaultTotalBudget = 4.0;

// Inverse CDF of Lap(0, scale) expressed on u in (-1/2, 1/2).
inline double laplace_from_uniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::fabs(u));
}

inline double laplace_cdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

// Seeded Lap(0, scale) source. One instance is one independent noise stream.
class LaplaceMechanism {
 public:
  LaplaceMechanism(double scale, std::uint64_t seed) : scale_(scale), seed_(seed), rng_(seed) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorCode::kInvalidArgument, "Laplace scale must be positive and finite");
    }
  }

  double scale() const { return scale_; }
  std::uint64_t seed() const { return seed_; }

  double sample() { return laplace_from_uniform(uniform_open01(rng_) - 0.5, scale_); }

 private:
  double scale_;
  std::uint64_t seed_;
  Rng rng_;
};

inline std::vector<double> sample_laplace(double scale, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  LaplaceMechanism mech(scale, seed);
  std::vector<double> out(count);
  for (auto& x : out) x = mech.sample();
  return out;
}

// Adds independent Lap(delta_f / epsilon) noise to every cell. Results are not
// re-clamped, so values may fall outside the ingestion bounds.
inline TimeSeriesDataset add_laplace_noise(const TimeSeriesDataset& data, double epsilon, double delta_f,
                                           std::uint64_t seed) {
  LaplaceMechanism mech(delta_f / epsilon, seed);
  const auto src = data.values();
  std::vector<double> noisy(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) noisy[i] = src[i] + mech.sample();
  return data.with_values(std::move(noisy));
}

namespace detail {

// Correctly rounded sum of a sequence of doubles (Shewchuk partials, as in
// Python's math.fsum). Keeps forty releases at 0.1 summing to exactly 4.0.
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Round half-even across the remaining partials.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

}  // namespace detail

struct LedgerEntry {
  double epsilon = 0.0;
  VersionId version_id = 0;
  std::int64_t timestamp = 0;  // epoch seconds

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Per-dataset privacy budget under sequential composition: spent is the
// correctly rounded sum of admitted releases and never exceeds the total.
class BudgetLedger {
 public:
  explicit BudgetLedger(double total_budget = kDefaultTotalBudget) : total_(total_budget) {
    if (!(total_budget > 0.0) || !std::isfinite(total_budget)) {
      throw Error(ErrorCode::kInvalidArgument, "total budget must be positive and finite");
    }
  }

  double total_budget() const { return total_; }
  double spent() const { return spent_; }
  double remaining() const { return total_ - spent_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  bool admits(double epsilon) const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) return false;
    detail::ExactSum next = sum_;
    next.add(epsilon);
    return next.value() <= total_;
  }

  void charge(double epsilon, VersionId version_id, std::int64_t timestamp) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidArgument, "charged epsilon must be positive");
    }
    if (!admits(epsilon)) {
      throw Error(ErrorCode::kBudgetExceeded, "release at epsilon " + format_double(epsilon) +
                                                  " exceeds budget: spent " + format_double(spent_) +
                                                  " of " + format_double(total_));
    }
    entries_.push_back({epsilon, version_id, timestamp});
    sum_.add(epsilon);
    spent_ = sum_.value();
  }

  // Rebuilds a ledger from recorded entries, re-checking every admission.
  static BudgetLedger replay(double total_budget, const std::vector<LedgerEntry>& entries) {
    BudgetLedger ledger(total_budget);
    for (const auto& e : entries) ledger.charge(e.epsilon, e.version_id, e.timestamp);
    return ledger;
  }

 private:
  double total_;
  double spent_ = 0.0;
  detail::ExactSum sum_;
  std::vector<LedgerEntry> entries_;
};

inline double remaining_budget(const BudgetLedger& ledger) { return ledger.remaining(); }

inline std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Releases a noisy copy of root version `source` at `epsilon`, forking it in
// `store` and charging `ledger`. All preconditions are checked before either
// is touched, so a rejected call leaves both unchanged.
inline const DatasetVersion& privatize(VersionStore& store, VersionId source, double epsilon, double delta_f,
                                       BudgetLedger& ledger, std::uint64_t seed) {
  const DatasetVersion& original = store.get(source);
  if (!original.is_root()) {
    throw Error(ErrorCode::kNoisingNoisyData,
                "version " + std::to_string(source) + " is already noisy; noise is applied to raw data only");
  }
  if (!in_safe_range(epsilon)) {
    throw Error(ErrorCode::kEpsilonOutsideSafeRange,
                "epsilon " + format_double(epsilon) + " outside the safe range [0.1, 2.0]");
  }
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_f must be positive");
  }
  if (!ledger.admits(epsilon)) {
    throw Error(ErrorCode::kBudgetExceeded, "release at epsilon " + format_double(epsilon) +
                                                " exceeds budget: spent " + format_double(ledger.spent()) +
                                                " of " + format_double(ledger.total_budget()));
  }

  TimeSeriesDataset noisy = add_laplace_noise(original.data(), epsilon, delta_f, seed);
  const VersionId new_id = store.next_id();
  ledger.charge(epsilon, new_id, unix_now());
  return store.fork(source, std::move(noisy), Provenance{epsilon, seed, Mechanism::kLaplace, delta_f});
}

}  // namespace partdp
