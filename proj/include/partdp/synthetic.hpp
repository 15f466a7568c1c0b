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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "partdp/dataset.hpp"
#include "partdp/error.hpp"
#include "partdp/random.hpp"

namespace partdp {

inline constexpr std::int64_t kSyntheticStepSeconds = 600;  // 10-minute resolution
inline constexpr std::int64_t kSyntheticStepsPerDay = 86400 / kSyntheticStepSeconds;
inline constexpr std::int64_t kSyntheticStartEpoch = 1230768000;  // 2009-01-01T00:00:00Z
inline constexpr double kSyntheticMaxWatts = 10000.0;

namespace detail {

// Gaussian bump on a 24 h circle, hours in [0, 24).
inline double daily_bump(double hour, double center, double width) {
  double d = std::fabs(hour - center);
  d = std::min(d, 24.0 - d);
  return std::exp(-0.5 * (d / width) * (d / width));
}

}  // namespace detail

// Household power draw in watts at 10-minute resolution: a per-household base
// load, morning and evening peaks, multiplicative jitter, and sporadic
// appliance spikes. Deterministic in `seed`; every value lies in [0, 10000].
inline TimeSeriesDataset generate_synthetic(std::int64_t households, std::int64_t days, std::uint64_t seed) {
  if (households < 1 || days < 1) {
    throw Error(ErrorCode::kInvalidArgument, "households and days must both be at least 1");
  }
  const auto n_series = static_cast<std::size_t>(households);
  const auto n_steps = static_cast<std::size_t>(days * kSyntheticStepsPerDay);

  std::vector<std::string> ids;
  ids.reserve(n_series);
  for (std::size_t h = 0; h < n_series; ++h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "H%04zu", h + 1);
    ids.emplace_back(buf);
  }
  std::vector<std::int64_t> timestamps(n_steps);
  for (std::size_t t = 0; t < n_steps; ++t) {
    timestamps[t] = kSyntheticStartEpoch + static_cast<std::int64_t>(t) * kSyntheticStepSeconds;
  }

  std::vector<double> values(n_series * n_steps);
  for (std::size_t h = 0; h < n_series; ++h) {
    Rng rng(derive_seed(seed, h));
    const double base = uniform_between(rng, 150.0, 600.0);
    const double morning_amp = uniform_between(rng, 300.0, 1500.0);
    const double evening_amp = uniform_between(rng, 600.0, 2500.0);
    const double morning_at = uniform_between(rng, 6.0, 8.5);
    const double evening_at = uniform_between(rng, 17.5, 20.5);
    const double spike_rate = uniform_between(rng, 0.01, 0.05);

    for (std::size_t t = 0; t < n_steps; ++t) {
      const double hour = static_cast<double>(t % kSyntheticStepsPerDay) / 6.0;
      double w = base + morning_amp * detail::daily_bump(hour, morning_at, 1.0) +
                 evening_amp * detail::daily_bump(hour, evening_at, 1.8);
      w *= std::exp(0.15 * standard_normal(rng));
      if (uniform_open01(rng) < spike_rate) w += uniform_between(rng, 1000.0, 4000.0);
      w = std::round(std::min(kSyntheticMaxWatts, std::max(0.0, w)) * 10.0) / 10.0;
      values[h * n_steps + t] = w;
    }
  }
  return TimeSeriesDataset(std::move(ids), std::move(timestamps), std::move(values), "W",
                           TimestampFormat::kIso8601);
}

}  // namespace partdp
