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

// partdp: batch front end. Calls the library directly; no server needed.
// Exit codes: 0 success, 1 usage error, 2 pipeline error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "partdp/partdp.hpp"

namespace fs = std::filesystem;
using partdp::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitPipeline = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw partdp::Error(partdp::ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Stages every file under a temporary name, then renames them into place, so
// a failure while writing leaves no partial outputs behind.
void write_files_atomically(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> staged;
  try {
    for (const auto& [path, content] : files) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      fs::path tmp = path;
      tmp += ".partial";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw partdp::Error(partdp::ErrorCode::kIoError, "cannot write " + tmp.string());
      staged.push_back(tmp);
      out << content;
      out.close();
      if (!out) throw partdp::Error(partdp::ErrorCode::kIoError, "short write to " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& tmp : staged) fs::remove(tmp, ec);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);
}

std::uint64_t seed_or_random(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw partdp::Error(partdp::ErrorCode::kInvalidArgument, "grid entry `" + item + "` is not a number");
    }
  }
  return grid;
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct Common {
  std::string input;
  double lower = 0.0;
  double upper = 10000.0;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--input,-i", c.input, "Input CSV (timestamp column + one column per series)")->required();
  cmd->add_option("--lower", c.lower, "Clamping lower bound")->capture_default_str();
  cmd->add_option("--upper", c.upper, "Clamping upper bound")->capture_default_str();
  cmd->add_option("--seed", c.seed, "64-bit seed (random and reported when omitted)");
}

partdp::DatasetVersion load_root(const Common& c) {
  const partdp::ClampBounds bounds{c.lower, c.upper};
  return partdp::ingest_csv(read_file(c.input), bounds);
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  int households = 200;
  int days = 1;
  std::uint64_t seed = 42;
  std::string out;
};

void cmd_generate(const GenerateArgs& a, const std::string& format) {
  const auto data = partdp::generate_synthetic(a.households, a.days, a.seed);
  write_files_atomically({{a.out, partdp::write_csv(data)}});
  const json summary = {{"path", a.out},
                        {"series_count", data.series_count()},
                        {"timestamp_count", data.timestamp_count()},
                        {"seed", a.seed}};
  if (format == "json") {
    std::cout << summary.dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << "path,series_count,timestamp_count,seed\n"
              << a.out << ',' << data.series_count() << ',' << data.timestamp_count() << ',' << a.seed << '\n';
  } else {
    std::cout << "wrote " << a.out << " (" << data.series_count() << " series x " << data.timestamp_count()
              << " timestamps)\n";
  }
}

// --- run --------------------------------------------------------------------

struct RunArgs {
  Common common;
  partdp::PreferenceProfile profile;
  std::optional<std::string> policy;
  std::string policy_file;
  double budget = partdp::kDefaultTotalBudget;
  std::string out_dir = ".";
};

void cmd_run(const RunArgs& a, const std::string& format) {
  a.profile.validate();
  const partdp::PolicySet policies =
      a.policy_file.empty() ? partdp::PolicySet::defaults() : partdp::PolicySet::load(a.policy_file);
  std::optional<partdp::CompliancePolicy> policy;
  if (a.policy) policy = policies.get(*a.policy);

  partdp::VersionStore store(load_root(a.common));
  const double delta_f = partdp::ClampBounds{a.common.lower, a.common.upper}.sensitivity();
  const auto selection = partdp::select_epsilon(a.profile, delta_f, policy);

  const std::uint64_t seed = seed_or_random(a.common.seed);
  partdp::BudgetLedger ledger(a.budget);
  const auto& noisy = partdp::privatize(store, 0, selection.epsilon_star, delta_f, ledger, seed);
  const auto utility = partdp::compute_mae(store.root(), noisy);

  partdp::ImpactContext ctx;
  ctx.epsilon = selection.epsilon_star;
  ctx.delta_f = delta_f;
  ctx.mae = utility.mae;
  ctx.expected_mae = utility.expected_mae;
  ctx.dataset = {noisy.data().series_count(), noisy.data().timestamp_count(), noisy.data().unit_label()};
  ctx.profile = a.profile;
  ctx.cap_applied = selection.cap_applied;
  ctx.remaining_budget = ledger.remaining();
  const auto impact = partdp::generate_report(ctx);

  json utility_doc = utility;
  utility_doc["seed"] = seed;
  utility_doc["selection"] = selection;
  const fs::path dir(a.out_dir);
  write_files_atomically({{dir / "noisy.csv", partdp::write_csv(noisy.data())},
                          {dir / "utility_report.json", utility_doc.dump(2) + "\n"},
                          {dir / "impact_report.json", json(impact).dump(2) + "\n"}});

  if (format == "json") {
    std::cout << json{{"epsilon_star", selection.epsilon_star},
                      {"mae", utility.mae},
                      {"expected_mae", utility.expected_mae},
                      {"privacy_score", impact.privacy_score},
                      {"seed", seed},
                      {"out_dir", a.out_dir}}
                     .dump(2)
              << '\n';
  } else if (format == "csv") {
    std::cout << "epsilon_star,mae,expected_mae,privacy_score,seed\n"
              << partdp::format_double(selection.epsilon_star) << ',' << partdp::format_double(utility.mae) << ','
              << partdp::format_double(utility.expected_mae) << ',' << partdp::format_double(impact.privacy_score)
              << ',' << seed << '\n';
  } else {
    std::cout << "epsilon*       " << partdp::format_double(selection.epsilon_star) << '\n'
              << "MAE            " << fmt(utility.mae, 3) << ' ' << noisy.data().unit_label() << " (expected "
              << fmt(utility.expected_mae, 3) << ")\n"
              << "privacy score  " << fmt(impact.privacy_score, 1) << '\n'
              << "seed           " << seed << '\n'
              << "outputs        " << (dir / "noisy.csv").string() << ", utility_report.json, impact_report.json\n";
  }
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string grid;
  int seeds_per_point = partdp::kDefaultSeedsPerPoint;
  std::string out = "sweep.json";
};

void cmd_sweep(const SweepArgs& a, const std::string& format) {
  std::vector<double> grid = a.grid.empty()
                                 ? std::vector<double>(partdp::kDefaultEpsilonGrid.begin(),
                                                       partdp::kDefaultEpsilonGrid.end())
                                 : parse_grid(a.grid);
  partdp::validate_grid(grid);
  const auto root = load_root(a.common);
  const double delta_f = partdp::ClampBounds{a.common.lower, a.common.upper}.sensitivity();
  const std::uint64_t seed = seed_or_random(a.common.seed);
  const auto sweep = partdp::sweep_epsilon(root.data(), grid, delta_f, a.seeds_per_point, seed);

  json chart = partdp::chart_data(sweep);
  chart["base_seed"] = seed;
  fs::path csv_path(a.out);
  csv_path.replace_extension(".csv");
  write_files_atomically({{a.out, chart.dump(2) + "\n"}, {csv_path, partdp::chart_csv(sweep)}});

  auto coef = [](const std::optional<double>& v) { return v ? partdp::format_double(*v) : std::string("undefined"); };
  if (format == "json") {
    std::cout << chart.dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << partdp::chart_csv(sweep);
  } else {
    std::cout << "epsilon   mae           expected_mae\n";
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
      std::printf("%-9s %-13s %s\n", partdp::format_double(sweep.grid[i]).c_str(), fmt(sweep.mae_curve[i], 4).c_str(),
                  fmt(sweep.expected_mae[i], 4).c_str());
    }
    std::cout << "pearson   " << coef(sweep.pearson_r) << '\n'
              << "spearman  " << coef(sweep.spearman_rho) << '\n'
              << "seed      " << seed << '\n';
  }
}

// --- profiles ---------------------------------------------------------------

struct ProfilesArgs {
  Common common;
  std::string out = "profiles.json";
};

void cmd_profiles(const ProfilesArgs& a, const std::string& format) {
  partdp::VersionStore store(load_root(a.common));
  const double delta_f = partdp::ClampBounds{a.common.lower, a.common.upper}.sensitivity();
  const std::uint64_t seed = seed_or_random(a.common.seed);

  json rows = json::array();
  std::vector<std::string> names;
  std::vector<double> eps, mae, score;
  for (std::size_t i = 0; i < partdp::kCanonicalProfiles.size(); ++i) {
    const auto& named = partdp::kCanonicalProfiles[i];
    std::optional<partdp::CompliancePolicy> policy;
    if (named.policy_cap) policy = partdp::CompliancePolicy{"canonical", *named.policy_cap, ""};
    const auto selection = partdp::select_epsilon(named.profile, delta_f, policy);

    // Each profile is an independent release with its own ledger.
    partdp::BudgetLedger ledger;
    const std::uint64_t profile_seed = partdp::derive_seed(seed, i);
    const auto& noisy = partdp::privatize(store, 0, selection.epsilon_star, delta_f, ledger, profile_seed);
    const auto utility = partdp::compute_mae(store.root(), noisy);
    const double privacy = partdp::template_score(selection.epsilon_star);

    names.emplace_back(named.name);
    eps.push_back(selection.epsilon_star);
    mae.push_back(utility.mae);
    score.push_back(privacy);
    rows.push_back({{"profile", named.name},
                    {"sliders", named.profile},
                    {"policy_cap", named.policy_cap ? json(*named.policy_cap) : json(nullptr)},
                    {"epsilon_star", selection.epsilon_star},
                    {"mae", utility.mae},
                    {"expected_mae", utility.expected_mae},
                    {"privacy_score", privacy},
                    {"seed", profile_seed},
                    {"closeness", selection.closeness}});
  }
  const json doc = {{"delta_f", delta_f}, {"base_seed", seed}, {"profiles", rows}};
  write_files_atomically({{a.out, doc.dump(2) + "\n"}});

  if (format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << "profile,epsilon_star,mae,privacy_score\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::cout << names[i] << ',' << partdp::format_double(eps[i]) << ',' << partdp::format_double(mae[i]) << ','
                << partdp::format_double(score[i]) << '\n';
    }
  } else {
    std::printf("%-16s", "");
    for (const auto& n : names) std::printf("%-16s", n.c_str());
    std::printf("\n%-16s", "Selected eps");
    for (double v : eps) std::printf("%-16s", fmt(v, 1).c_str());
    std::printf("\n%-16s", "MAE");
    for (double v : mae) std::printf("%-16s", fmt(v, 2).c_str());
    std::printf("\n%-16s", "Privacy score");
    for (double v : score) std::printf("%-16s", fmt(v, 1).c_str());
    std::printf("\n");
  }
}

std::string profiles_help() {
  std::string out = "Canonical profiles (privacy, accuracy, compliance, sensitivity):\n";
  for (const auto& p : partdp::kCanonicalProfiles) {
    out += "  " + std::string(p.name) + ": " + std::to_string(p.profile.privacy) + ", " +
           std::to_string(p.profile.accuracy) + ", " +
           (p.profile.compliance_required ? "required (cap " + fmt(*p.policy_cap, 1) + ")" : std::string("off")) +
           ", " + std::to_string(p.profile.sensitivity) + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Participatory differential-privacy configuration for time-series data"};
  app.require_subcommand(1);
  app.footer(profiles_help());
  std::string format = "table";
  app.add_option("--format", format, "Stdout format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic household load CSV (10-minute resolution)");
  generate->add_option("--households", gen.households, "Number of series")->check(CLI::Range(1, 1000000));
  generate->add_option("--days", gen.days, "Days of data")->check(CLI::Range(1, 3650));
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--out,-o", gen.out, "Output CSV path")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Select epsilon from sliders, release, and write reports");
  add_common(run_cmd, run.common);
  run_cmd->add_option("--privacy", run.profile.privacy, "Privacy slider 1-5")->check(CLI::Range(1, 5));
  run_cmd->add_option("--accuracy", run.profile.accuracy, "Accuracy slider 1-5")->check(CLI::Range(1, 5));
  run_cmd->add_flag("--compliance", run.profile.compliance_required, "Require policy compliance");
  run_cmd->add_option("--sensitivity", run.profile.sensitivity, "Data sensitivity 1-3")->check(CLI::Range(1, 3));
  run_cmd->add_option("--policy", run.policy, "Compliance policy name");
  run_cmd->add_option("--policy-file", run.policy_file, "Policy JSON file (built-in set when omitted)");
  run_cmd->add_option("--budget", run.budget, "Total privacy budget")->capture_default_str();
  run_cmd->add_option("--out-dir,-o", run.out_dir, "Directory for noisy.csv and report JSON")->capture_default_str();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Simulated MAE across an epsilon grid (no budget spent)");
  add_common(sweep, sw.common);
  sweep->add_option("--grid", sw.grid, "Comma-separated epsilons (default 0.1,0.5,1.0,1.5,2.0)");
  sweep->add_option("--seeds-per-point", sw.seeds_per_point, "Noisings per grid point")->check(CLI::PositiveNumber);
  sweep->add_option("--out,-o", sw.out, "Chart JSON path; CSV is written beside it")->capture_default_str();

  ProfilesArgs pr;
  auto* profiles = app.add_subcommand("profiles", "Compare the canonical profiles side by side");
  add_common(profiles, pr.common);
  profiles->add_option("--out,-o", pr.out, "JSON output path")->capture_default_str();
  profiles->footer(profiles_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) cmd_generate(gen, format);
    if (*run_cmd) cmd_run(run, format);
    if (*sweep) cmd_sweep(sw, format);
    if (*profiles) cmd_profiles(pr, format);
  } catch (const partdp::Error& e) {
    std::cerr << partdp::error_json(e).dump() << '\n';
    return kExitPipeline;
  } catch (const fs::filesystem_error& e) {
    std::cerr << partdp::error_json(partdp::Error(partdp::ErrorCode::kIoError, e.what())).dump() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << partdp::error_json(partdp::Error(partdp::ErrorCode::kInternal, e.what())).dump() << '\n';
    return kExitPipeline;
  }
  return 0;
}
