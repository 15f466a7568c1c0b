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

// Stateful sessions for the participatory configuration workflow:
//
//   upload -> set_preferences* -> (release | sweep)*
//
// A session owns one uploaded dataset, its version tree, a budget ledger and
// an append-only event history. Selection is free; only releases spend budget.
//
// Concurrency: the session table is guarded by a shared mutex. Each session
// has its own reader/writer lock. Mutating requests (upload, preferences,
// release, sweep) take it exclusively and so queue behind one another;
// history, export and inspection take it shared and run concurrently.
// Different sessions never contend.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "partdp/analysis.hpp"
#include "partdp/dataset.hpp"
#include "partdp/dp.hpp"
#include "partdp/error.hpp"
#include "partdp/explain.hpp"
#include "partdp/json_io.hpp"
#include "partdp/mcda.hpp"
#include "partdp/policy.hpp"

namespace partdp {

struct HistoryEvent {
  std::string event_kind;  // upload | selection | release | sweep
  json payload;
  std::int64_t timestamp = 0;

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

inline void to_json(json& j, const HistoryEvent& e) {
  j = {{"event_kind", e.event_kind}, {"payload", e.payload}, {"timestamp", e.timestamp}};
}

inline void from_json(const json& j, HistoryEvent& e) {
  e.event_kind = j.at("event_kind").get<std::string>();
  e.payload = j.at("payload");
  e.timestamp = j.at("timestamp").get<std::int64_t>();
}

struct Session {
  std::string session_id;
  std::optional<VersionStore> versions;
  ClampBounds bounds;
  BudgetLedger ledger;
  std::optional<PreferenceProfile> current_profile;
  std::optional<SelectionResult> last_selection;
  std::vector<HistoryEvent> history;
  std::optional<CompliancePolicy> policy;

  double delta_f() const { return bounds.sensitivity(); }
};

// Full snapshot including payload values.
inline json session_to_json(const Session& s) {
  json versions = json::array();
  if (s.versions) {
    for (const auto& v : s.versions->versions()) {
      json entry = version_descriptor(v);
      entry["payload"] = v.data();
      versions.push_back(std::move(entry));
    }
  }
  return {{"session_id", s.session_id},
          {"bounds", {{"lower", s.bounds.lower}, {"upper", s.bounds.upper}}},
          {"ledger", ledger_json(s.ledger)},
          {"current_profile", s.current_profile ? json(*s.current_profile) : json(nullptr)},
          {"last_selection", s.last_selection ? json(*s.last_selection) : json(nullptr)},
          {"history", s.history},
          {"policy", s.policy ? json(*s.policy) : json(nullptr)},
          {"versions", versions}};
}

inline Session session_from_json(const json& j) {
  Session s;
  s.session_id = j.at("session_id").get<std::string>();
  s.bounds = {j.at("bounds").at("lower").get<double>(), j.at("bounds").at("upper").get<double>()};
  s.ledger = ledger_from_json(j.at("ledger"));
  if (!j.at("current_profile").is_null()) s.current_profile = profile_from_json(j.at("current_profile"));
  if (!j.at("last_selection").is_null()) s.last_selection = j.at("last_selection").get<SelectionResult>();
  s.history = j.at("history").get<std::vector<HistoryEvent>>();
  if (!j.at("policy").is_null()) s.policy = j.at("policy").get<CompliancePolicy>();
  const auto& versions = j.at("versions");
  for (const auto& v : versions) {
    auto payload = dataset_from_json(v.at("payload"));
    if (!s.versions) {
      s.versions.emplace(DatasetVersion{0, std::nullopt, std::make_shared<const TimeSeriesDataset>(std::move(payload)),
                                        std::nullopt});
    } else {
      s.versions->fork(v.at("parent_id").get<VersionId>(), std::move(payload), v.at("provenance").get<Provenance>());
    }
  }
  return s;
}

struct ServiceConfig {
  double default_total_budget = kDefaultTotalBudget;
  PolicySet policies = PolicySet::defaults();
  bool allow_raw_export = false;
  ProviderKind explain_provider = ProviderKind::kTemplate;
  std::shared_ptr<CompletionClient> completion_client;
  bool explain_fallback = true;
  std::optional<std::filesystem::path> snapshot_dir;
  int default_seeds_per_point = kDefaultSeedsPerPoint;
};

struct SessionCreated {
  std::string session_id;
  double total_budget = 0.0;
  std::optional<CompliancePolicy> policy;
};

struct UploadResult {
  VersionId version_id = 0;
  std::size_t series_count = 0;
  std::size_t timestamp_count = 0;
  double delta_f = 0.0;
};

struct PreferenceOutcome {
  SelectionResult selection;
  DecisionMatrix matrix;
};

struct ReleaseOutcome {
  json version;  // descriptor
  std::uint64_t seed = 0;
  UtilityReport utility;
  ImpactReport impact;
  json ledger;
};

class Service {
 public:
  explicit Service(ServiceConfig config = {}) : config_(std::move(config)) {}

  const ServiceConfig& config() const { return config_; }

  SessionCreated create_session(std::optional<double> total_budget = std::nullopt,
                                const std::optional<std::string>& policy_name = std::nullopt) {
    auto slot = std::make_shared<Slot>();
    slot->session.ledger = BudgetLedger(total_budget.value_or(config_.default_total_budget));
    if (policy_name) slot->session.policy = config_.policies.get(*policy_name);
    slot->session.session_id = new_session_id();

    SessionCreated out{slot->session.session_id, slot->session.ledger.total_budget(), slot->session.policy};
    std::unique_lock lock(table_mutex_);
    sessions_.emplace(out.session_id, std::move(slot));
    return out;
  }

  UploadResult upload_dataset(const std::string& id, std::string_view csv, const ClampBounds& bounds,
                              const IngestOptions& options = {}) {
    return with_session(id, [&](Session& s) {
      if (s.versions) {
        throw Error(ErrorCode::kDatasetAlreadyUploaded, "session " + id + " already holds a dataset");
      }
      DatasetVersion root = ingest_csv(csv, bounds, options);
      UploadResult out{0, root.data().series_count(), root.data().timestamp_count(), bounds.sensitivity()};
      s.versions.emplace(std::move(root));
      s.bounds = bounds;
      append(s, "upload",
             {{"version_id", 0},
              {"shape", {out.series_count, out.timestamp_count}},
              {"delta_f", out.delta_f},
              {"bounds", {{"lower", bounds.lower}, {"upper", bounds.upper}}}});
      return out;
    });
  }

  PreferenceOutcome set_preferences(const std::string& id, const PreferenceProfile& profile) {
    return with_session(id, [&](Session& s) {
      profile.validate();
      require_dataset(s);
      PreferenceOutcome out{select_epsilon(profile, s.delta_f(), s.policy),
                            build_decision_matrix(kDefaultEpsilonGrid, s.delta_f(), profile.sensitivity, s.policy)};
      s.current_profile = profile;
      s.last_selection = out.selection;
      append(s, "selection",
             {{"profile", profile},
              {"epsilon_star", out.selection.epsilon_star},
              {"closeness", out.selection.closeness},
              {"cap_applied", out.selection.cap_applied ? json(*out.selection.cap_applied) : json(nullptr)}});
      return out;
    });
  }

  ReleaseOutcome execute_release(const std::string& id, std::optional<std::uint64_t> seed = std::nullopt) {
    return with_session(id, [&](Session& s) {
      require_dataset(s);
      if (!s.last_selection || !s.current_profile) {
        throw Error(ErrorCode::kNoSelection, "set preferences before requesting a release");
      }
      const std::uint64_t used_seed = seed ? *seed : random_seed();
      const double eps = s.last_selection->epsilon_star;
      const DatasetVersion& noisy = privatize(*s.versions, 0, eps, s.delta_f(), s.ledger, used_seed);

      ReleaseOutcome out;
      out.version = version_descriptor(noisy);
      out.seed = used_seed;
      out.utility = compute_mae(s.versions->root(), noisy);

      ImpactContext ctx;
      ctx.epsilon = eps;
      ctx.delta_f = s.delta_f();
      ctx.mae = out.utility.mae;
      ctx.expected_mae = out.utility.expected_mae;
      ctx.dataset = {noisy.data().series_count(), noisy.data().timestamp_count(), noisy.data().unit_label()};
      ctx.profile = *s.current_profile;
      ctx.cap_applied = s.last_selection->cap_applied;
      ctx.remaining_budget = s.ledger.remaining();
      out.impact = generate_report(
          ctx, ExplainOptions{config_.explain_provider, config_.completion_client.get(), config_.explain_fallback});
      out.ledger = ledger_json(s.ledger);

      append(s, "release",
             {{"version_id", noisy.version_id},
              {"epsilon", eps},
              {"seed", used_seed},
              {"mae", out.utility.mae},
              {"expected_mae", out.utility.expected_mae},
              {"privacy_score", out.impact.privacy_score},
              {"provider", provider_name(out.impact.provider)}});
      return out;
    });
  }

  SweepResult run_sweep(const std::string& id, std::optional<std::vector<double>> grid = std::nullopt,
                        std::optional<int> seeds_per_point = std::nullopt,
                        std::optional<std::uint64_t> base_seed = std::nullopt) {
    return with_session(id, [&](Session& s) {
      require_dataset(s);
      const std::vector<double> g = grid ? *grid : std::vector<double>(kDefaultEpsilonGrid.begin(), kDefaultEpsilonGrid.end());
      const std::uint64_t seed = base_seed ? *base_seed : random_seed();
      SweepResult r = sweep_epsilon(s.versions->root().data(), g, s.delta_f(),
                                    seeds_per_point.value_or(config_.default_seeds_per_point), seed);
      json payload = chart_data(r);
      payload["base_seed"] = seed;
      append(s, "sweep", std::move(payload));
      return r;
    });
  }

  json get_history(const std::string& id) {
    return read_session(id, [&](const Session& s) {
      json versions = json::array();
      if (s.versions) {
        for (const auto& v : s.versions->versions()) versions.push_back(version_descriptor(v));
      }
      return json{{"session_id", s.session_id},
                  {"events", s.history},
                  {"ledger", ledger_json(s.ledger)},
                  {"versions", versions},
                  {"policy", s.policy ? json(*s.policy) : json(nullptr)}};
    });
  }

  std::string export_version(const std::string& id, VersionId version_id) {
    return read_session(id, [&](const Session& s) {
      require_dataset(s);
      const DatasetVersion& v = s.versions->get(version_id);
      if (v.is_root() && !config_.allow_raw_export) {
        throw Error(ErrorCode::kRawExportDisabled, "raw dataset export is disabled on this server");
      }
      return write_csv(v.data());
    });
  }

  // Snapshot copy of a session's state.
  Session inspect(const std::string& id) {
    return read_session(id, [](const Session& s) { return s; });
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(table_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
  }

  // Writes every in-memory session to <snapshot_dir>/<id>.json.
  void persist_all() {
    if (!config_.snapshot_dir) return;
    std::filesystem::create_directories(*config_.snapshot_dir);
    for (const auto& id : session_ids()) {
      const json doc = read_session(id, [](const Session& s) { return session_to_json(s); });
      const auto path = *config_.snapshot_dir / (id + ".json");
      const auto tmp = *config_.snapshot_dir / (id + ".json.tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::kIoError, "cannot write snapshot " + tmp.string());
        out << doc.dump();
      }
      std::filesystem::rename(tmp, path);
    }
  }

 private:
  struct Slot {
    std::shared_mutex mutex;
    Session session;
  };

  template <typename Fn>
  auto with_session(const std::string& id, Fn&& fn) -> std::invoke_result_t<Fn&, Session&> {
    std::shared_ptr<Slot> slot = find(id);
    std::unique_lock lock(slot->mutex);
    return fn(slot->session);
  }

  template <typename Fn>
  auto read_session(const std::string& id, Fn&& fn) -> std::invoke_result_t<Fn&, const Session&> {
    std::shared_ptr<Slot> slot = find(id);
    std::shared_lock lock(slot->mutex);
    return fn(std::as_const(slot->session));
  }

  std::shared_ptr<Slot> find(const std::string& id) {
    {
      std::shared_lock lock(table_mutex_);
      if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    }
    if (auto loaded = load_snapshot(id)) {
      std::unique_lock lock(table_mutex_);
      auto [it, inserted] = sessions_.emplace(id, std::move(loaded));
      return it->second;
    }
    throw Error(ErrorCode::kUnknownSession, "unknown session `" + id + "`");
  }

  std::shared_ptr<Slot> load_snapshot(const std::string& id) const {
    if (!config_.snapshot_dir || !is_session_token(id)) return nullptr;
    const auto path = *config_.snapshot_dir / (id + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    std::ostringstream buf;
    buf << in.rdbuf();
    auto slot = std::make_shared<Slot>();
    try {
      slot->session = session_from_json(json::parse(buf.str()));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIoError, "corrupt session snapshot " + path.string() + ": " + e.what());
    }
    return slot;
  }

  static bool is_session_token(const std::string& id) {
    if (id.size() != 32) return false;
    return std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
  }

  static void require_dataset(const Session& s) {
    if (!s.versions) throw Error(ErrorCode::kNoDatasetUploaded, "upload a dataset first");
  }

  static void append(Session& s, std::string kind, json payload) {
    s.history.push_back({std::move(kind), std::move(payload), unix_now()});
  }

  std::uint64_t random_seed() {
    std::lock_guard lock(rng_mutex_);
    return entropy_();
  }

  std::string new_session_id() {
    std::lock_guard lock(rng_mutex_);
    char buf[33];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(entropy_()),
                  static_cast<unsigned long long>(entropy_()));
    return buf;
  }

  ServiceConfig config_;
  mutable std::shared_mutex table_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 entropy_{std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32)};
};

}  // namespace partdp
