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

// Independent textbook TOPSIS used as a test oracle. Written against nested
// vectors and a separate formulation (column norms first, then a single
// pass per alternative) so it shares no code with the library.

#pragma once

#include <cmath>
#include <vector>

namespace partdp_test {

struct ReferenceTopsis {
  std::vector<double> closeness;
  std::vector<double> d_plus;
  std::vector<double> d_minus;
};

// x[i][j]: alternative i, criterion j. benefit[j] true for benefit criteria.
inline ReferenceTopsis reference_topsis(const std::vector<std::vector<double>>& x, const std::vector<double>& w,
                                        const std::vector<bool>& benefit) {
  const std::size_t m = x.size();
  const std::size_t n = w.size();
  std::vector<double> norms(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < m; ++i) s += static_cast<long double>(x[i][j]) * x[i][j];
    norms[j] = static_cast<double>(std::sqrt(s));
  }
  std::vector<std::vector<double>> v(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) v[i][j] = norms[j] == 0.0 ? 0.0 : w[j] * (x[i][j] / norms[j]);
  }
  std::vector<double> best(n), worst(n);
  for (std::size_t j = 0; j < n; ++j) {
    double mx = v[0][j], mn = v[0][j];
    for (std::size_t i = 1; i < m; ++i) {
      if (v[i][j] > mx) mx = v[i][j];
      if (v[i][j] < mn) mn = v[i][j];
    }
    best[j] = benefit[j] ? mx : mn;
    worst[j] = benefit[j] ? mn : mx;
  }
  ReferenceTopsis out;
  for (std::size_t i = 0; i < m; ++i) {
    long double sp = 0.0L, sm = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      sp += std::pow(static_cast<long double>(v[i][j]) - best[j], 2);
      sm += std::pow(static_cast<long double>(v[i][j]) - worst[j], 2);
    }
    const double dp = static_cast<double>(std::sqrt(sp));
    const double dm = static_cast<double>(std::sqrt(sm));
    out.d_plus.push_back(dp);
    out.d_minus.push_back(dm);
    out.closeness.push_back(dp + dm == 0.0 ? 0.0 : dm / (dp + dm));
  }
  return out;
}

}  // namespace partdp_test
