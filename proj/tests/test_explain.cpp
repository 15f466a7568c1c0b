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

// Impact reports: template path, provider parsing and fallback, and the
// HTTP completion client against a local stand-in endpoint.

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "httplib.h"
#include "partdp/llm_client.hpp"
#include "partdp/partdp.hpp"

namespace partdp {
namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInternal;
}

ImpactContext context(double eps, double mae_ratio = 1.0, double remaining = 3.0) {
  ImpactContext c;
  c.epsilon = eps;
  c.delta_f = 10000;
  c.expected_mae = 10000 / eps;
  c.mae = c.expected_mae * mae_ratio;
  c.dataset = {200, 144, "W"};
  c.profile = {3, 3, false, 2};
  c.remaining_budget = remaining;
  return c;
}

class ScriptedClient : public CompletionClient {
 public:
  explicit ScriptedClient(std::string reply, bool fail = false) : reply_(std::move(reply)), fail_(fail) {}
  std::string complete(const std::string& prompt) override {
    last_prompt = prompt;
    if (fail_) throw Error(ErrorCode::kProviderUnavailable, "offline");
    return reply_;
  }
  std::string last_prompt;

 private:
  std::string reply_;
  bool fail_;
};

TEST(TemplateScore, AnchorsAndInterpolation) {
  EXPECT_EQ(template_score(0.1), 4.8);
  EXPECT_EQ(template_score(1.0), 3.2);
  EXPECT_EQ(template_score(2.0), 2.1);
  const double at_half = 4.8 + (3.2 - 4.8) * (std::log(0.5) - std::log(0.1)) / (std::log(1.0) - std::log(0.1));
  EXPECT_NEAR(template_score(0.5), at_half, 1e-12);
  EXPECT_NEAR(template_score(0.5), 3.68, 0.01);
  const double at_1_5 = 3.2 + (2.1 - 3.2) * (std::log(1.5) - std::log(1.0)) / (std::log(2.0) - std::log(1.0));
  EXPECT_NEAR(template_score(1.5), at_1_5, 1e-12);
  EXPECT_NEAR(template_score(1.5), 2.56, 0.01);
  double prev = 6.0;
  for (int i = 0; i < 100; ++i) {
    const double e = 0.1 + 1.9 * i / 99.0;
    EXPECT_LT(template_score(e), prev);
    prev = template_score(e);
  }
  EXPECT_GT(template_score(0.3), 3.2);
  EXPECT_LT(template_score(0.3), 4.8);
}

TEST(TemplateReport, InvariantsHoldAcrossContexts) {
  for (double eps : {0.1, 0.3, 0.5, 1.0, 1.5, 2.0}) {
    for (double ratio : {0.5, 1.0, 1.4}) {
      for (double remaining : {0.0, 0.05, 2.0}) {
        const auto r = generate_report(context(eps, ratio, remaining));
        EXPECT_EQ(r.provider, ProviderKind::kTemplate);
        EXPECT_GE(r.privacy_score, 1.0);
        EXPECT_LE(r.privacy_score, 5.0);
        EXPECT_FALSE(r.caveats.empty());
        EXPECT_FALSE(contains_forbidden_claim(r.narrative));
        for (const auto& c : r.caveats) EXPECT_FALSE(contains_forbidden_claim(c));
        if (ratio != 1.0 || remaining < 0.1) EXPECT_FALSE(r.refinement_suggestions.empty());
        EXPECT_EQ(json(r), json(generate_report(context(eps, ratio, remaining))));  // deterministic
      }
    }
  }
  EXPECT_EQ(code_of([] { generate_report(context(3.0)); }), ErrorCode::kEpsilonOutsideSafeRange);
  auto bad = context(1.0);
  bad.mae = NAN;
  EXPECT_EQ(code_of([&] { generate_report(bad); }), ErrorCode::kInvalidArgument);
}

TEST(TemplateReport, JsonSchema) {
  const json j = generate_report(context(1.0));
  for (const char* key : {"privacy_score", "narrative", "caveats", "refinement_suggestions", "provider"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("provider"), "template");
  const auto back = j.get<ImpactReport>();
  EXPECT_EQ(json(back), j);
}

TEST(Prompt, CarriesEveryContextField) {
  const std::string p = render_prompt(context(1.0));
  EXPECT_EQ(p.find("{{"), std::string::npos);
  EXPECT_NE(p.find("1.0000"), std::string::npos);
  EXPECT_NE(p.find("10000.0000"), std::string::npos);
  EXPECT_NE(p.find("PRIVACY_SCORE"), std::string::npos);
  EXPECT_EQ(std::string(kPromptTemplateVersion), "impact_report_v1");
}

TEST(ProviderParsing, TolerantLabels) {
  auto a = parse_provider_response("PRIVACY_SCORE: 3.5\nNARRATIVE: Moderate protection.");
  ASSERT_TRUE(a.score);
  EXPECT_EQ(*a.score, 3.5);
  EXPECT_EQ(a.narrative, "Moderate protection.");
  auto b = parse_provider_response("**Privacy score**: 4\nThe data is well masked.");
  ASSERT_TRUE(b.score);
  EXPECT_EQ(*b.score, 4.0);
  EXPECT_EQ(b.narrative, "The data is well masked.");
  EXPECT_FALSE(parse_provider_response("no structure at all").score);
}

TEST(ExternalProvider, UsesStructuredReply) {
  ScriptedClient client("PRIVACY_SCORE: 7\nNARRATIVE: Noise hides individual habits.");
  const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, &client, true});
  EXPECT_EQ(r.provider, ProviderKind::kExternalLlm);
  EXPECT_EQ(r.privacy_score, 5.0);  // clamped
  EXPECT_EQ(r.narrative, "Noise hides individual habits.");
  EXPECT_NE(client.last_prompt.find("epsilon"), std::string::npos);
}

TEST(ExternalProvider, FallsBackWithCaveat) {
  const auto base = generate_report(context(1.0));
  {
    ScriptedClient offline("", true);
    const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, &offline, true});
    EXPECT_EQ(r.provider, ProviderKind::kTemplate);
    EXPECT_EQ(r.privacy_score, 3.2);
    EXPECT_EQ(r.caveats.size(), base.caveats.size() + 1);
    EXPECT_EQ(code_of([&] { generate_report(context(1.0), {ProviderKind::kExternalLlm, &offline, false}); }),
              ErrorCode::kProviderUnavailable);
  }
  {
    ScriptedClient garbled("I would rather not say.");
    const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, &garbled, true});
    EXPECT_EQ(r.privacy_score, 3.2);
    EXPECT_GT(r.caveats.size(), base.caveats.size());
    EXPECT_EQ(code_of([&] { generate_report(context(1.0), {ProviderKind::kExternalLlm, &garbled, false}); }),
              ErrorCode::kMalformedProviderResponse);
  }
  {
    ScriptedClient boastful("PRIVACY_SCORE: 5\nNARRATIVE: The data is now completely anonymous.");
    const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, &boastful, true});
    EXPECT_EQ(r.narrative, base.narrative);
    EXPECT_FALSE(contains_forbidden_claim(r.narrative));
  }
  {
    const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, nullptr, true});
    EXPECT_EQ(r.provider, ProviderKind::kTemplate);
    EXPECT_EQ(code_of([] { generate_report(context(1.0), {ProviderKind::kExternalLlm, nullptr, false}); }),
              ErrorCode::kProviderUnavailable);
  }
}

// Local stand-in for a chat-completions endpoint.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::atomic<int> hits{0};
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpCompletionClient, SpeaksChatCompletions) {
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res) {
    const json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "PRIVACY_SCORE: 3\nNARRATIVE: ok"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  LlmConfig cfg;
  cfg.endpoint = ep.url();
  cfg.api_key = "k";
  cfg.model = "m";
  HttpCompletionClient client(cfg);
  EXPECT_EQ(client.complete("hello"), "PRIVACY_SCORE: 3\nNARRATIVE: ok");
  const auto sent = json::parse(ep.last_body);
  EXPECT_EQ(sent.at("model"), "m");
  EXPECT_EQ(sent.at("messages").back().at("content"), "hello");
  EXPECT_EQ(ep.last_auth, "Bearer k");

  const auto r = generate_report(context(1.0), {ProviderKind::kExternalLlm, &client, true});
  EXPECT_EQ(r.provider, ProviderKind::kExternalLlm);
  EXPECT_EQ(r.privacy_score, 3.0);
}

TEST(HttpCompletionClient, RetriesOnceThenGivesUp) {
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  LlmConfig cfg;
  cfg.endpoint = ep.url();
  HttpCompletionClient client(cfg);
  EXPECT_EQ(code_of([&] { client.complete("x"); }), ErrorCode::kProviderUnavailable);
  EXPECT_EQ(ep.hits.load(), 2);
  const auto r = generate_report(context(0.1), {ProviderKind::kExternalLlm, &client, true});
  EXPECT_EQ(r.privacy_score, 4.8);
  EXPECT_EQ(r.provider, ProviderKind::kTemplate);
}

TEST(HttpCompletionClient, MalformedPayloadAndUnreachableHost) {
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
  LlmConfig cfg;
  cfg.endpoint = ep.url();
  EXPECT_EQ(code_of([&] { HttpCompletionClient(cfg).complete("x"); }), ErrorCode::kMalformedProviderResponse);

  LlmConfig dead;
  dead.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  dead.timeout_seconds = 2;
  EXPECT_EQ(code_of([&] { HttpCompletionClient(dead).complete("x"); }), ErrorCode::kProviderUnavailable);
  EXPECT_EQ(code_of([] { split_url("no-scheme"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace partdp
