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

// Impact reports: a 1-5 privacy score, a plain-language narrative, caveats and
// refinement suggestions for a release. Reports come from an external language
// model when one is configured and reachable, otherwise from a deterministic
// template.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partdp/error.hpp"
#include "partdp/mcda.hpp"
#include "partdp/privacy_rating.hpp"
#include "partdp/prompt_asset.hpp"

namespace partdp {

struct DatasetSummary {
  std::size_t series_count = 0;
  std::size_t timestamp_count = 0;
  std::string unit_label;
};

struct ImpactContext {
  double epsilon = 1.0;
  double delta_f = 1.0;
  double mae = 0.0;
  double expected_mae = 0.0;
  DatasetSummary dataset;
  PreferenceProfile profile;
  std::optional<double> cap_applied;
  double remaining_budget = 0.0;

  void validate() const {
    for (double v : {epsilon, delta_f, mae, expected_mae, remaining_budget}) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "impact context has a non-finite field");
    }
    if (cap_applied && !std::isfinite(*cap_applied)) {
      throw Error(ErrorCode::kInvalidArgument, "impact context cap is not finite");
    }
    if (!in_safe_range(epsilon)) {
      throw Error(ErrorCode::kEpsilonOutsideSafeRange, "impact context epsilon outside [0.1, 2.0]");
    }
    profile.validate();
  }
};

// Partial slider preset; unset fields keep their current value.
struct ProfileChange {
  std::optional<int> privacy;
  std::optional<int> accuracy;
  std::optional<bool> compliance_required;
  std::optional<int> sensitivity;

  PreferenceProfile apply(PreferenceProfile p) const {
    if (privacy) p.privacy = *privacy;
    if (accuracy) p.accuracy = *accuracy;
    if (compliance_required) p.compliance_required = *compliance_required;
    if (sensitivity) p.sensitivity = *sensitivity;
    return p;
  }

  friend bool operator==(const ProfileChange&, const ProfileChange&) = default;
};

struct RefinementSuggestion {
  std::string description;
  ProfileChange suggested_profile_change;
};

enum class ProviderKind { kExternalLlm, kTemplate };

inline std::string_view provider_name(ProviderKind k) {
  return k == ProviderKind::kExternalLlm ? "external_llm" : "template";
}

struct ImpactReport {
  double privacy_score = 0.0;
  std::string narrative;
  std::vector<std::string> caveats;
  std::vector<RefinementSuggestion> refinement_suggestions;
  ProviderKind provider = ProviderKind::kTemplate;
};

inline double template_score(double epsilon) { return privacy_rating(epsilon); }

// Relative deviation of observed from expected MAE that triggers a
// refinement suggestion.
inline constexpr double kMaeDeviationThreshold = 0.25;

// Phrases no report may contain; they overstate what noise injection achieves.
inline constexpr std::array<std::string_view, 8> kForbiddenClaims = {
    "zero risk",        "no risk",          "risk-free",           "impossible to re-identify",
    "cannot be re-identified", "completely anonymous", "fully anonymous", "guarantees anonymity",
};

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool contains_forbidden_claim(std::string_view text) {
  const std::string lower = to_lower(text);
  return std::any_of(kForbiddenClaims.begin(), kForbiddenClaims.end(),
                     [&](std::string_view claim) { return lower.find(claim) != std::string::npos; });
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::string protection_phrase(double score) {
  if (score >= 4.0) return "strong";
  if (score >= 3.0) return "moderate";
  if (score >= 2.0) return "limited";
  return "weak";
}

}  // namespace detail

inline std::string template_narrative(const ImpactContext& c) {
  const double score = template_score(c.epsilon);
  const std::string& u = c.dataset.unit_label;
  std::string s = "The release uses a privacy budget of epsilon = " + detail::fixed(c.epsilon, 2) +
                  ", adding Laplace noise with scale " + detail::fixed(c.delta_f / c.epsilon, 2) + " " + u +
                  " to each of the " + std::to_string(c.dataset.series_count * c.dataset.timestamp_count) +
                  " readings (" + std::to_string(c.dataset.series_count) + " series x " +
                  std::to_string(c.dataset.timestamp_count) + " timestamps). ";
  s += "This corresponds to " + detail::protection_phrase(score) + " protection (privacy score " +
       detail::fixed(score, 1) + " of 5). ";
  s += "Readings are off by " + detail::fixed(c.mae, 2) + " " + u + " on average, against an expected " +
       detail::fixed(c.expected_mae, 2) + " " + u + ". ";
  if (c.epsilon <= 0.5) {
    s += "Individual consumption patterns are heavily masked, but short-term peaks and per-household "
         "forecasts will be unreliable.";
  } else if (c.epsilon < 1.5) {
    s += "Aggregate daily shapes remain visible while single readings carry noticeable noise.";
  } else {
    s += "The data stays close to the original and suits forecasting, but distinctive household "
         "behaviour is easier to single out.";
  }
  if (c.cap_applied) s += " A compliance cap of epsilon <= " + detail::fixed(*c.cap_applied, 2) + " was enforced.";
  return s;
}

inline std::vector<std::string> template_caveats(const ImpactContext& c) {
  std::vector<std::string> out = {
      "Differential privacy limits, but does not eliminate, the risk that an individual's data "
      "influences what is released; the score is a heuristic summary, not a guarantee.",
      "Noisy values are not re-clamped, so some released readings fall outside the original range.",
  };
  if (c.expected_mae > 0.0 && std::fabs(c.mae - c.expected_mae) / c.expected_mae > kMaeDeviationThreshold) {
    out.push_back("Observed error differs from the expected error by more than 25%; the dataset may be too "
                  "small for the average to settle.");
  }
  if (c.remaining_budget < kSafeEpsilonMin) {
    out.push_back("The remaining privacy budget cannot cover another release.");
  }
  return out;
}

inline std::vector<RefinementSuggestion> template_suggestions(const ImpactContext& c) {
  std::vector<RefinementSuggestion> out;
  const auto& p = c.profile;
  if (c.expected_mae > 0.0 && std::fabs(c.mae - c.expected_mae) / c.expected_mae > kMaeDeviationThreshold) {
    out.push_back({"Observed error is far from its expectation; run an epsilon sweep with more seeds before "
                   "relying on this release.",
                   {}});
  }
  if (c.remaining_budget < kSafeEpsilonMin) {
    out.push_back({"Budget is exhausted: reuse this release instead of requesting a new one.", {}});
  }
  if (p.accuracy < 5 && c.epsilon < kSafeEpsilonMax) {
    out.push_back({"Raise the accuracy priority to reduce noise at the cost of weaker protection.",
                   ProfileChange{std::nullopt, p.accuracy + 1, std::nullopt, std::nullopt}});
  }
  if (p.privacy < 5 && c.epsilon > kSafeEpsilonMin) {
    out.push_back({"Raise the privacy priority for stronger protection at the cost of accuracy.",
                   ProfileChange{p.privacy + 1, std::nullopt, std::nullopt, std::nullopt}});
  }
  if (!p.compliance_required) {
    out.push_back({"Turn on compliance to enforce the session's regulatory epsilon cap.",
                   ProfileChange{std::nullopt, std::nullopt, true, std::nullopt}});
  }
  return out;
}

inline ImpactReport template_report(const ImpactContext& c) {
  c.validate();
  return {template_score(c.epsilon), template_narrative(c), template_caveats(c), template_suggestions(c),
          ProviderKind::kTemplate};
}

// Fills {{placeholders}} in the shipped prompt template.
inline std::string render_prompt(const ImpactContext& c, std::string_view tmpl = kPromptTemplate) {
  const auto num = [](double v) { return detail::fixed(v, 4); };
  const std::vector<std::pair<std::string, std::string>> fields = {
      {"epsilon", num(c.epsilon)},
      {"delta_f", num(c.delta_f)},
      {"noise_scale", num(c.delta_f / c.epsilon)},
      {"mae", num(c.mae)},
      {"expected_mae", num(c.expected_mae)},
      {"series_count", std::to_string(c.dataset.series_count)},
      {"timestamp_count", std::to_string(c.dataset.timestamp_count)},
      {"unit_label", c.dataset.unit_label},
      {"privacy", std::to_string(c.profile.privacy)},
      {"accuracy", std::to_string(c.profile.accuracy)},
      {"compliance_required", c.profile.compliance_required ? "yes" : "no"},
      {"sensitivity", std::to_string(c.profile.sensitivity)},
      {"cap_applied", c.cap_applied ? num(*c.cap_applied) : "none"},
      {"remaining_budget", num(c.remaining_budget)},
  };
  std::string out(tmpl);
  for (const auto& [key, value] : fields) {
    const std::string token = "{{" + key + "}}";
    for (std::size_t pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos + value.size())) {
      out.replace(pos, token.size(), value);
    }
  }
  return out;
}

struct ParsedProviderResponse {
  std::optional<double> score;
  std::string narrative;
};

// Tolerant parse of "PRIVACY_SCORE: x" / "NARRATIVE: ..." responses. Labels
// are case-insensitive, "privacy score" is accepted for the score label, and
// when no NARRATIVE label is present the remaining text is the narrative.
inline ParsedProviderResponse parse_provider_response(std::string_view text) {
  ParsedProviderResponse out;
  const std::string lower = to_lower(text);

  for (std::string_view label : {"privacy_score", "privacy score"}) {
    const std::size_t at = lower.find(label);
    if (at == std::string::npos) continue;
    std::size_t pos = at + label.size();
    while (pos < text.size() && (text[pos] == ':' || text[pos] == '*' || text[pos] == ' ' || text[pos] == '=')) {
      ++pos;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec == std::errc() && std::isfinite(v)) out.score = v;
    break;
  }

  const std::size_t n = lower.find("narrative");
  std::string narrative;
  if (n != std::string::npos) {
    std::size_t pos = n + std::string_view("narrative").size();
    while (pos < text.size() && (text[pos] == ':' || text[pos] == '*' || text[pos] == ' ')) ++pos;
    narrative = std::string(text.substr(pos));
  } else {
    std::size_t line_start = 0;
    while (line_start < text.size()) {
      std::size_t line_end = text.find('\n', line_start);
      if (line_end == std::string_view::npos) line_end = text.size();
      const std::string_view line = text.substr(line_start, line_end - line_start);
      if (to_lower(line).find("privacy") == std::string::npos || to_lower(line).find("score") == std::string::npos) {
        if (!narrative.empty()) narrative += '\n';
        narrative += line;
      }
      line_start = line_end + 1;
    }
  }
  while (!narrative.empty() && std::isspace(static_cast<unsigned char>(narrative.back()))) narrative.pop_back();
  while (!narrative.empty() && std::isspace(static_cast<unsigned char>(narrative.front()))) narrative.erase(0, 1);
  out.narrative = std::move(narrative);
  return out;
}

// Text-completion backend for the external provider path. Implementations
// throw Error(kProviderUnavailable) when the endpoint cannot be reached.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

struct ExplainOptions {
  ProviderKind provider = ProviderKind::kTemplate;
  // Non-owning; required for the external path, otherwise the template is used.
  CompletionClient* client = nullptr;
  bool allow_fallback = true;
};

inline ImpactReport generate_report(const ImpactContext& context, const ExplainOptions& options = {}) {
  context.validate();
  ImpactReport base = template_report(context);
  if (options.provider == ProviderKind::kTemplate) return base;

  if (options.client == nullptr) {
    if (!options.allow_fallback) {
      throw Error(ErrorCode::kProviderUnavailable, "no external explanation provider is configured");
    }
    base.caveats.push_back("No external explanation provider is configured; this report was generated from "
                           "a fixed template.");
    return base;
  }

  std::string response;
  try {
    response = options.client->complete(render_prompt(context));
  } catch (const Error& e) {
    if (!options.allow_fallback) throw;
    base.caveats.push_back(std::string("The external explanation provider was unavailable (") + e.what() +
                           "); this report was generated from a fixed template.");
    return base;
  }

  const ParsedProviderResponse parsed = parse_provider_response(response);
  ImpactReport report = base;
  bool external_content = false;
  if (parsed.score) {
    external_content = true;
    report.privacy_score = std::clamp(*parsed.score, 1.0, 5.0);
  } else {
    if (!options.allow_fallback) {
      throw Error(ErrorCode::kMalformedProviderResponse, "provider response has no parseable privacy score");
    }
    report.caveats.push_back("The external provider did not return a usable privacy score; the template score "
                             "is shown instead.");
  }
  if (parsed.narrative.empty()) {
    report.caveats.push_back("The external provider returned no narrative; the template narrative is shown.");
  } else if (contains_forbidden_claim(parsed.narrative)) {
    report.caveats.push_back("The external narrative overstated the protection achieved and was replaced by the "
                             "template narrative.");
  } else {
    report.narrative = parsed.narrative;
    external_content = true;
  }
  if (!external_content) return report;
  report.provider = ProviderKind::kExternalLlm;
  report.caveats.push_back("Generated by a language model; treat the narrative as an aid to discussion, not an "
                           "audit.");
  return report;
}

}  // namespace partdp
