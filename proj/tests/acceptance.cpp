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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and runtime limits are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "partdp/partdp.hpp"
#include "support/cli_runner.hpp"
#include "support/stats_reference.hpp"
#include "support/topsis_reference.hpp"

namespace {

using namespace partdp;
using partdp_test::run_cli;
using partdp_test::slurp;
using partdp_test::TempDir;

constexpr double kMaeRelTol = 0.05;
constexpr double kPearsonMax = -0.75;
constexpr double kTopsisTol = 1e-9;
constexpr double kKsAlpha = 0.001;
constexpr double kVarRelTol = 0.03;
constexpr std::size_t kLaplaceSamples = 100000;
constexpr int kTopsisCases = 1000;
constexpr int kBudgetSequences = 500;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(limit_s) + " s limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) { return format_double(v); }

Outcome profile_mapping() {
  TempDir tmp;
  const auto data = tmp / "meters.csv";
  auto r = run_cli("generate --households 200 --days 1 --seed 42 --out " + data.string(), tmp);
  if (r.exit_code != 0) return {false, "generate failed: " + r.err};
  r = run_cli("profiles -i " + data.string() + " --seed 1 --out " + (tmp / "profiles.json").string(), tmp);
  if (r.exit_code != 0) return {false, "profiles failed: " + r.err};
  const auto j = json::parse(slurp(tmp / "profiles.json"));
  const double want[] = {0.1, 1.0, 2.0};
  std::string got;
  bool ok = j.at("profiles").size() == 3;
  for (std::size_t i = 0; i < j.at("profiles").size(); ++i) {
    const double e = j.at("profiles")[i].at("epsilon_star");
    got += (i ? ", " : "") + num(e);
    ok = ok && i < 3 && e == want[i];
  }
  return {ok, "selected eps = (" + got + ")"};
}

Outcome template_scores() {
  const double eps[] = {0.1, 1.0, 2.0};
  const double want[] = {4.8, 3.2, 2.1};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 3; ++i) {
    ImpactContext c;
    c.epsilon = eps[i];
    c.delta_f = 10.0;
    c.expected_mae = c.mae = 10.0 / eps[i];
    c.remaining_budget = 1.0;
    const auto rep = generate_report(c);
    ok = ok && rep.privacy_score == want[i] && rep.provider == ProviderKind::kTemplate;
    got += (i ? ", " : "") + num(rep.privacy_score);
  }
  return {ok, "scores = (" + got + ")"};
}

SweepResult law_sweep() {
  static const SweepResult sweep = [] {
    const auto data = generate_synthetic(700, 1, 42);  // 100800 cells
    return sweep_epsilon(data, kDefaultEpsilonGrid, 10.0, 20, 2024);
  }();
  return sweep;
}

Outcome mae_law() {
  const auto s = law_sweep();
  double worst = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    worst = std::max(worst, std::fabs(s.mae_curve[i] / (10.0 / s.grid[i]) - 1.0));
  }
  return {worst <= kMaeRelTol, "worst relative deviation " + num(worst) + " on 100800 cells x 20 seeds"};
}

Outcome correlation_property() {
  const auto s = law_sweep();
  const bool ok = s.spearman_rho && s.pearson_r && *s.spearman_rho == -1.0 && *s.pearson_r <= kPearsonMax;
  return {ok, "spearman " + (s.spearman_rho ? num(*s.spearman_rho) : "n/a") + ", pearson " +
                  (s.pearson_r ? num(*s.pearson_r) : "n/a")};
}

Outcome topsis_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim_n(2, 9), dim_k(1, 6), coin(0, 1);
  std::uniform_real_distribution<double> val(0.0, 1000.0), wt(0.01, 1.0);
  double worst = 0.0;
  for (int t = 0; t < kTopsisCases; ++t) {
    const int n = dim_n(rng), k = dim_k(rng);
    DecisionMatrix m;
    std::vector<bool> benefit;
    for (int i = 0; i < n; ++i) m.alternatives.push_back(i + 1.0);
    for (int j = 0; j < k; ++j) {
      benefit.push_back(coin(rng) == 1);
      m.criteria.push_back({"c" + std::to_string(j), benefit.back() ? Orientation::kBenefit : Orientation::kCost});
    }
    std::vector<std::vector<double>> x(n, std::vector<double>(k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) m.values.push_back(x[i][j] = val(rng));
    std::vector<double> w(k);
    double sum = 0.0;
    for (auto& v : w) sum += v = wt(rng);
    for (auto& v : w) v /= sum;
    const auto got = topsis(m, w);
    const auto want = partdp_test::reference_topsis(x, w, benefit);
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(got.closeness[i] - want.closeness[i]));
  }
  return {worst <= kTopsisTol, std::to_string(kTopsisCases) + " cases, max |dC| = " + num(worst)};
}

Outcome laplace_fit() {
  bool ok = true;
  std::string detail;
  const double crit = partdp_test::ks_critical_value(kKsAlpha, kLaplaceSamples);
  std::uint64_t seed = 1;
  for (double b : {0.5, 5.0, 100.0}) {
    const auto xs = sample_laplace(b, kLaplaceSamples, seed++);
    const double d = partdp_test::ks_statistic(xs, [b](double x) { return partdp_test::laplace_cdf_reference(x, b); });
    const double var_dev = std::fabs(partdp_test::sample_variance(xs) / (2 * b * b) - 1.0);
    ok = ok && d < crit && var_dev <= kVarRelTol;
    char buf[96];
    std::snprintf(buf, sizeof buf, "b=%g D=%.5f var dev=%.4f; ", b, d, var_dev);
    detail += buf;
  }
  return {ok, detail + "D crit " + num(crit)};
}

Outcome budget_safety() {
  Service svc;
  const std::string csv = write_csv(generate_synthetic(2, 1, 3));
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> op(0, 9), slider(1, 5), sens(1, 3), len(5, 40), coin(0, 1);
  std::uniform_real_distribution<double> budget(0.3, 6.0);
  const std::vector<std::optional<std::string>> policies = {std::nullopt, "strict", "standard", "open"};
  int refused = 0;
  for (int seq = 0; seq < kBudgetSequences; ++seq) {
    const auto id = svc.create_session(budget(rng), policies[rng() % policies.size()]).session_id;
    for (int step = len(rng); step > 0; --step) {
      const json before = session_to_json(svc.inspect(id));
      const int o = op(rng);
      try {
        if (o == 0) svc.upload_dataset(id, csv, ClampBounds{});
        else if (o <= 3) svc.set_preferences(id, PreferenceProfile{slider(rng), slider(rng), coin(rng) == 1, sens(rng)});
        else svc.execute_release(id, rng());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kBudgetExceeded) {
          ++refused;
          if (session_to_json(svc.inspect(id)) != before) return {false, "refused release changed session state"};
        }
      }
      const auto s = svc.inspect(id);
      if (s.ledger.spent() > s.ledger.total_budget()) {
        return {false, "spent " + num(s.ledger.spent()) + " > total " + num(s.ledger.total_budget())};
      }
    }
  }
  return {refused > 0, std::to_string(kBudgetSequences) + " sequences, " + std::to_string(refused) +
                           " BudgetExceeded refusals, all with state unchanged"};
}

Outcome cap_dominance() {
  int cases = 0;
  for (double cap : {1.0, 0.5}) {
    const CompliancePolicy policy{"cap", cap, ""};
    for (int p = 1; p <= 5; ++p)
      for (int a = 1; a <= 5; ++a)
        for (int s = 1; s <= 3; ++s)
          for (double df : {10.0, 10000.0}) {
            ++cases;
            const double e = select_epsilon({p, a, true, s}, df, policy).epsilon_star;
            if (e > cap) {
              return {false, "cap " + num(cap) + " violated at (" + std::to_string(p) + "," + std::to_string(a) +
                                 "," + std::to_string(s) + "): eps " + num(e)};
            }
          }
  }
  return {true, std::to_string(cases) + " profiles within cap"};
}

Outcome monotonicity() {
  const std::vector<std::optional<CompliancePolicy>> policies = {std::nullopt, CompliancePolicy{"c1", 1.0, ""},
                                                                 CompliancePolicy{"c05", 0.5, ""}};
  auto eps = [](int p, int a, bool c, int s, const std::optional<CompliancePolicy>& pol) {
    return select_epsilon({p, a, c, s}, 10.0, pol).epsilon_star;
  };
  int checks = 0;
  for (const auto& pol : policies)
    for (bool c : {false, true})
      for (int s = 1; s <= 3; ++s)
        for (int x = 1; x <= 5; ++x)
          for (int v = 1; v < 5; ++v) {
            checks += 2;
            if (eps(v + 1, x, c, s, pol) > eps(v, x, c, s, pol)) {
              return {false, "eps rises with privacy at accuracy " + std::to_string(x)};
            }
            if (eps(x, v + 1, c, s, pol) < eps(x, v, c, s, pol)) {
              return {false, "eps falls with accuracy at privacy " + std::to_string(x)};
            }
          }
  return {true, std::to_string(checks) + " adjacent-slider comparisons"};
}

Outcome cli_determinism() {
  TempDir tmp;
  const auto data = tmp / "meters.csv";
  auto r = run_cli("generate --households 50 --days 2 --seed 9 --out " + data.string(), tmp);
  if (r.exit_code != 0) return {false, "generate failed"};
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const auto out = tmp / ("run" + std::to_string(i));
    r = run_cli("run -i " + data.string() + " --seed 31337 -o " + out.string(), tmp);
    if (r.exit_code != 0) return {false, "run failed: " + r.err};
    const auto bytes = slurp(out / "noisy.csv");
    if (i == 0) first = bytes;
    else if (bytes != first) return {false, "noisy CSV differs between invocations"};
  }
  return {!first.empty(), "two invocations, " + std::to_string(first.size()) + " identical bytes"};
}

}  // namespace

int main() {
  criterion("profile epsilon mapping", 10, profile_mapping);
  criterion("template privacy scores", 1, template_scores);
  criterion("MAE law", 60, mae_law);
  criterion("correlation property", 60, correlation_property);
  criterion("TOPSIS oracle equivalence", 5, topsis_oracle);
  criterion("Laplace distribution", 10, laplace_fit);
  criterion("budget safety", 0, budget_safety);
  criterion("compliance cap dominance", 0, cap_dominance);
  criterion("selection monotonicity", 0, monotonicity);
  criterion("CLI determinism", 0, cli_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
