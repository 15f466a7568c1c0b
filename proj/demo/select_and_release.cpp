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

// Library walk-through: synthesize a small dataset, select epsilon for each
// canonical profile, release once, and print the resulting reports.

#include <iostream>

#include "partdp/partdp.hpp"

int main() {
  const partdp::ClampBounds bounds{0.0, 10000.0};
  auto data = partdp::generate_synthetic(20, 1, 7);
  partdp::VersionStore store(partdp::DatasetVersion{0, std::nullopt,
                                                    std::make_shared<const partdp::TimeSeriesDataset>(
                                                        data.clamped(bounds)),
                                                    std::nullopt});
  partdp::BudgetLedger ledger;

  for (const auto& named : partdp::kCanonicalProfiles) {
    std::optional<partdp::CompliancePolicy> policy;
    if (named.policy_cap) policy = partdp::CompliancePolicy{"demo", *named.policy_cap, ""};
    const auto selection = partdp::select_epsilon(named.profile, bounds.sensitivity(), policy);
    std::cout << named.name << ": epsilon* = " << selection.epsilon_star << "\n";
  }

  const auto selection = partdp::select_epsilon(partdp::PreferenceProfile{}, bounds.sensitivity());
  const auto& noisy = partdp::privatize(store, 0, selection.epsilon_star, bounds.sensitivity(), ledger, 2024);
  const auto utility = partdp::compute_mae(store.root(), noisy);

  partdp::ImpactContext ctx;
  ctx.epsilon = selection.epsilon_star;
  ctx.delta_f = bounds.sensitivity();
  ctx.mae = utility.mae;
  ctx.expected_mae = utility.expected_mae;
  ctx.dataset = {noisy.data().series_count(), noisy.data().timestamp_count(), noisy.data().unit_label()};
  ctx.remaining_budget = ledger.remaining();

  std::cout << partdp::json(utility).dump(2) << "\n"
            << partdp::json(partdp::generate_report(ctx)).dump(2) << "\n";
  return 0;
}
