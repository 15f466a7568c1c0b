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

// Privacy-utility measurement: per-release error reports, epsilon sweeps, and
// the chart documents the CLI and UI render.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "partdp/dataset.hpp"
#include "partdp/dp.hpp"
#include "partdp/error.hpp"
#include "partdp/mcda.hpp"
#include "partdp/random.hpp"

namespace partdp {

inline constexpr int kDefaultSeedsPerPoint = 20;

struct UtilityReport {
  double epsilon = 0.0;
  double mae = 0.0;
  double expected_mae = 0.0;
  std::vector<double> per_series_mae;
  double max_abs_error = 0.0;
};

inline double mean_abs_difference(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::fabs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

inline UtilityReport compute_mae(const DatasetVersion& original, const DatasetVersion& noisy) {
  if (!noisy.provenance || noisy.parent_id != original.version_id) {
    throw Error(ErrorCode::kUnrelatedVersions, "version " + std::to_string(noisy.version_id) +
                                                   " is not a direct noisy child of version " +
                                                   std::to_string(original.version_id));
  }
  const auto& a = original.data();
  const auto& b = noisy.data();
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, "original and noisy shapes differ");

  UtilityReport r;
  r.epsilon = noisy.provenance->epsilon_used;
  r.expected_mae = expected_abs_error(noisy.provenance->delta_f, r.epsilon);
  r.per_series_mae.resize(a.series_count());
  double total = 0.0;
  for (std::size_t s = 0; s < a.series_count(); ++s) {
    const auto ra = a.row(s);
    const auto rb = b.row(s);
    double row_sum = 0.0;
    for (std::size_t t = 0; t < ra.size(); ++t) {
      const double d = std::fabs(ra[t] - rb[t]);
      row_sum += d;
      r.max_abs_error = std::max(r.max_abs_error, d);
    }
    total += row_sum;
    r.per_series_mae[s] = row_sum / static_cast<double>(ra.size());
  }
  r.mae = total / static_cast<double>(a.cell_count());
  return r;
}

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};

namespace detail {

inline double pearson_unchecked(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace detail

inline Correlation correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kDimensionMismatch, "correlation inputs differ in length");
  if (xs.size() < 3) throw Error(ErrorCode::kDegenerateInput, "correlation needs at least 3 points");
  if (detail::is_constant(xs) || detail::is_constant(ys)) {
    throw Error(ErrorCode::kDegenerateInput, "correlation input is constant");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error(ErrorCode::kDegenerateInput, "correlation input is not finite");
    }
  }
  const auto rx = detail::average_ranks(xs);
  const auto ry = detail::average_ranks(ys);
  return {detail::pearson_unchecked(xs, ys), detail::pearson_unchecked(rx, ry)};
}

struct SweepResult {
  std::vector<double> grid;
  std::vector<double> mae_curve;
  std::vector<double> expected_mae;
  // Absent when the curve is too short or constant to correlate.
  std::optional<double> pearson_r;
  std::optional<double> spearman_rho;
  int seeds_per_point = kDefaultSeedsPerPoint;
  std::uint64_t base_seed = 0;
  std::string units;
};

// Mean MAE over `seeds_per_point` independent noisings per grid epsilon. Runs
// outside any budget ledger. Grid points are evaluated concurrently; each
// point's seeds depend only on (base_seed, point index, repetition), so the
// result does not depend on scheduling.
inline SweepResult sweep_epsilon(const TimeSeriesDataset& data, std::span<const double> grid, double delta_f,
                                 int seeds_per_point, std::uint64_t base_seed) {
  validate_grid(grid);
  if (seeds_per_point < 1) throw Error(ErrorCode::kInvalidArgument, "seeds_per_point must be at least 1");
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_f must be positive");
  }

  SweepResult r;
  r.grid.assign(grid.begin(), grid.end());
  r.seeds_per_point = seeds_per_point;
  r.base_seed = base_seed;
  r.units = data.unit_label();
  r.mae_curve.assign(grid.size(), 0.0);
  r.expected_mae.resize(grid.size());

  auto point = [&](std::size_t i) {
    double acc = 0.0;
    for (int k = 0; k < seeds_per_point; ++k) {
      const auto noisy = add_laplace_noise(data, grid[i], delta_f, derive_seed(base_seed, i, k));
      acc += mean_abs_difference(data.values(), noisy.values());
    }
    return acc / seeds_per_point;
  };
  std::vector<std::future<double>> jobs;
  jobs.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) jobs.push_back(std::async(std::launch::async, point, i));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.mae_curve[i] = jobs[i].get();
    r.expected_mae[i] = expected_abs_error(delta_f, grid[i]);
  }

  if (grid.size() >= 3 && !detail::is_constant(r.mae_curve)) {
    const auto c = correlation(r.grid, r.mae_curve);
    r.pearson_r = c.pearson;
    r.spearman_rho = c.spearman;
  }
  return r;
}

// Chart document:
//   {"grid": [...], "mae": [...], "expected_mae": [...], "pearson": x,
//    "spearman": y, "units": "...", "seeds_per_point": n}
// pearson/spearman are omitted when undefined.
inline nlohmann::json chart_data(const SweepResult& sweep) {
  nlohmann::json j;
  j["grid"] = sweep.grid;
  j["mae"] = sweep.mae_curve;
  j["expected_mae"] = sweep.expected_mae;
  if (sweep.pearson_r) j["pearson"] = *sweep.pearson_r;
  if (sweep.spearman_rho) j["spearman"] = *sweep.spearman_rho;
  j["units"] = sweep.units;
  j["seeds_per_point"] = sweep.seeds_per_point;
  return j;
}

inline SweepResult sweep_from_chart(const nlohmann::json& j) {
  SweepResult r;
  r.grid = j.at("grid").get<std::vector<double>>();
  r.mae_curve = j.at("mae").get<std::vector<double>>();
  r.expected_mae = j.at("expected_mae").get<std::vector<double>>();
  if (j.contains("pearson")) r.pearson_r = j.at("pearson").get<double>();
  if (j.contains("spearman")) r.spearman_rho = j.at("spearman").get<double>();
  r.units = j.value("units", std::string());
  r.seeds_per_point = j.value("seeds_per_point", kDefaultSeedsPerPoint);
  if (r.mae_curve.size() != r.grid.size() || r.expected_mae.size() != r.grid.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "chart series lengths differ from grid length");
  }
  return r;
}

inline std::string chart_csv(const SweepResult& sweep) {
  std::string out = "epsilon,mae,expected_mae\n";
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    out += format_double(sweep.grid[i]) + ',' + format_double(sweep.mae_curve[i]) + ',' +
           format_double(sweep.expected_mae[i]) + '\n';
  }
  return out;
}

}  // namespace partdp
