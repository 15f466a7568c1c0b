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

#include <gtest/gtest.h>

#include "partdp/partdp.hpp"
#include "support/cli_runner.hpp"

namespace partdp {
namespace {

using partdp_test::run_cli;
using partdp_test::slurp;
using partdp_test::TempDir;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new TempDir;
    const auto r = run_cli("generate --households 200 --days 1 --seed 42 --out " + input().string(), *data_);
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete data_;
    data_ = nullptr;
  }
  static std::filesystem::path input() { return *data_ / "meters.csv"; }

  TempDir tmp_;
  static TempDir* data_;
};

TempDir* Cli::data_ = nullptr;

TEST_F(Cli, GenerateIsDeterministic) {
  const auto a = tmp_ / "a.csv";
  ASSERT_EQ(run_cli("generate --households 200 --days 1 --seed 42 --out " + a.string(), tmp_).exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(input()));
  const auto ds = parse_csv(slurp(a));
  EXPECT_EQ(ds.series_count(), 200u);
  EXPECT_EQ(ds.timestamp_count(), 144u);
  EXPECT_EQ(slurp(a), write_csv(generate_synthetic(200, 1, 42)));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli("generate --households 0 --out " + (tmp_ / "x.csv").string(), tmp_).exit_code, 1);
  EXPECT_EQ(run_cli("run", tmp_).exit_code, 1);
  EXPECT_EQ(run_cli("bogus", tmp_).exit_code, 1);
  EXPECT_EQ(run_cli("run -i " + input().string() + " --privacy 9", tmp_).exit_code, 1);
  EXPECT_FALSE(std::filesystem::exists(tmp_ / "x.csv"));
}

TEST_F(Cli, PrivacyFirstRun) {
  const auto out = tmp_ / "pf";
  const auto r = run_cli("--format json run -i " + input().string() +
                             " --privacy 5 --accuracy 1 --compliance --sensitivity 3 --policy open --seed 7 -o " +
                             out.string(),
                         tmp_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("epsilon_star"), 0.1);
  EXPECT_EQ(j.at("privacy_score"), 4.8);
  const auto noisy = parse_csv(slurp(out / "noisy.csv"));
  EXPECT_EQ(noisy.series_count(), 200u);
  const auto utility = json::parse(slurp(out / "utility_report.json"));
  EXPECT_EQ(utility.at("epsilon"), 0.1);
  EXPECT_EQ(utility.at("seed"), 7u);
  const auto impact = json::parse(slurp(out / "impact_report.json"));
  EXPECT_EQ(impact.at("privacy_score"), 4.8);
  EXPECT_EQ(impact.at("provider"), "template");
}

TEST_F(Cli, UtilityFirstRunMatchesMaeLaw) {
  const auto out = tmp_ / "uf";
  const auto r = run_cli("--format json run -i " + input().string() +
                             " --lower 0 --upper 10 --privacy 1 --accuracy 5 --sensitivity 1 --seed 11 -o " +
                             out.string(),
                         tmp_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("epsilon_star"), 2.0);
  EXPECT_NEAR(j.at("mae").get<double>() / 5.0, 1.0, 0.05);
  EXPECT_EQ(j.at("expected_mae"), 5.0);
}

TEST_F(Cli, FixedSeedIsByteIdentical) {
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const auto out = tmp_ / ("rep" + std::to_string(i));
    const auto r = run_cli("run -i " + input().string() + " --seed 123 -o " + out.string(), tmp_);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto bytes = slurp(out / "noisy.csv") + slurp(out / "utility_report.json") +
                       slurp(out / "impact_report.json");
    if (i == 0) first = bytes;
    else EXPECT_EQ(bytes, first);
  }
}

TEST_F(Cli, PipelineErrorsExitTwoAndLeaveNoOutputs) {
  const auto out = tmp_ / "none";
  auto r = run_cli("run -i " + (tmp_ / "missing.csv").string() + " --seed 1 -o " + out.string(), tmp_);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err).at("code"), "IoError");
  EXPECT_FALSE(std::filesystem::exists(out / "noisy.csv"));

  {
    std::ofstream bad(tmp_ / "bad.csv");
    bad << "timestamp,A\n0,12\n600,abc\n";
  }
  r = run_cli("run -i " + (tmp_ / "bad.csv").string() + " --seed 1 -o " + out.string(), tmp_);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err).at("code"), "MalformedCsv");
  EXPECT_FALSE(std::filesystem::exists(out / "noisy.csv"));

  r = run_cli("run -i " + input().string() + " --policy nonexistent --seed 1 -o " + out.string(), tmp_);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err).at("code"), "UnknownPolicy");

  r = run_cli("run -i " + input().string() + " --budget 0.05 --privacy 5 --accuracy 1 --seed 1 -o " + out.string(),
              tmp_);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err).at("code"), "BudgetExceeded");
  EXPECT_FALSE(std::filesystem::exists(out / "noisy.csv"));
}

TEST_F(Cli, SweepWritesChartFiles) {
  const auto out = tmp_ / "sweep.json";
  auto r = run_cli("--format json sweep -i " + input().string() + " --seeds-per-point 2 --seed 5 --out " + out.string(),
                   tmp_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto chart = json::parse(slurp(out));
  EXPECT_EQ(chart.at("grid").size(), 5u);
  EXPECT_EQ(chart.at("spearman"), -1.0);
  const auto csv = slurp(tmp_ / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,mae,expected_mae");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);

  r = run_cli("sweep -i " + input().string() + " --grid 0.1,5.0 --out " + (tmp_ / "x.json").string(), tmp_);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err).at("code"), "GridOutsideSafeRange");
  EXPECT_FALSE(std::filesystem::exists(tmp_ / "x.json"));
}

TEST_F(Cli, ProfilesTableAndJson) {
  auto r = run_cli("profiles -i " + input().string() + " --seed 3 --out " + (tmp_ / "p.json").string(), tmp_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("Selected eps"), std::string::npos);
  EXPECT_NE(r.out.find("MAE"), std::string::npos);
  EXPECT_NE(r.out.find("Privacy score"), std::string::npos);
  const auto j = json::parse(slurp(tmp_ / "p.json"));
  ASSERT_EQ(j.at("profiles").size(), 3u);
  const double expected[] = {0.1, 1.0, 2.0};
  const double scores[] = {4.8, 3.2, 2.1};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(j.at("profiles")[i].at("epsilon_star"), expected[i]);
    EXPECT_EQ(j.at("profiles")[i].at("privacy_score"), scores[i]);
  }
  r = run_cli("--format csv profiles -i " + input().string() + " --seed 3 --out " + (tmp_ / "q.json").string(), tmp_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find(',')), "profile");
}

}  // namespace
}  // namespace partdp
