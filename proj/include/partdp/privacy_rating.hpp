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

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "partdp/error.hpp"

namespace partdp {

// Every epsilon the library will release at lies in this closed range.
inline constexpr double kSafeEpsilonMin = 0.1;
inline constexpr double kSafeEpsilonMax = 2.0;

inline bool in_safe_range(double epsilon) {
  return epsilon >= kSafeEpsilonMin && epsilon <= kSafeEpsilonMax;
}

struct RatingAnchor {
  double epsilon;
  double score;
};

// (epsilon, 1-5 privacy rating) anchors; ratings between anchors are linear in
// ln(epsilon).
inline constexpr std::array<RatingAnchor, 3> kPrivacyRatingAnchors = {{
    {0.1, 4.8},
    {1.0, 3.2},
    {2.0, 2.1},
}};

// Deterministic 1-5 privacy rating of a release at `epsilon`. Strictly
// decreasing over the safe range.
inline double privacy_rating(double epsilon) {
  if (!in_safe_range(epsilon)) {
    throw Error(ErrorCode::kEpsilonOutsideSafeRange,
                "epsilon " + std::to_string(epsilon) + " outside the safe range [0.1, 2.0]");
  }
  const auto& a = kPrivacyRatingAnchors;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (epsilon == a[i].epsilon) return a[i].score;
    if (epsilon < a[i + 1].epsilon) {
      const double t = (std::log(epsilon) - std::log(a[i].epsilon)) /
                       (std::log(a[i + 1].epsilon) - std::log(a[i].epsilon));
      return std::clamp(a[i].score + (a[i + 1].score - a[i].score) * t, 1.0, 5.0);
    }
  }
  return std::clamp(a.back().score, 1.0, 5.0);
}

}  // namespace partdp
