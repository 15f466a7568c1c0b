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

// HTTP+JSON binding of the session service.
//
//   POST /api/sessions                           create a session
//   POST /api/sessions/{id}/dataset              upload CSV (raw body or multipart)
//   PUT  /api/sessions/{id}/preferences          select epsilon from sliders
//   POST /api/sessions/{id}/release              privatize at the selected epsilon
//   POST /api/sessions/{id}/sweep                simulated epsilon sweep
//   GET  /api/sessions/{id}/history              event log, ledger, version tree
//   GET  /api/sessions/{id}/versions/{vid}/export  CSV download
//   GET  /api/policies                           compliance policies
//
// Failures answer with {"code", "message", "retryable"} and the status code
// listed for the error in error.hpp.

#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "partdp/error.hpp"
#include "partdp/json_io.hpp"
#include "partdp/service.hpp"

namespace partdp {

namespace http_detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, const Error& e) {
  send_json(res, error_info(e.code()).http_status, error_json(e));
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::kInvalidArgument, std::string("bad request body: ") + e.what()));
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorCode::kInternal, e.what()));
    }
  };
}

// Empty body reads as {}.
inline json body_object(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  return j;
}

// Accepts a JSON unsigned integer or its decimal string form (for clients
// whose numbers cannot hold 64 bits).
inline std::optional<std::uint64_t> seed_field(const json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  const auto& v = body.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::uint64_t out = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && end == s.data() + s.size() && !s.empty()) return out;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("`") + key + "` must be an unsigned 64-bit integer");
}

inline double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const auto s = req.get_param_value(key);
  double out = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidBounds, std::string("query parameter `") + key + "` is not a number");
  }
  return out;
}

inline std::string upload_bytes(const httplib::Request& req) {
  if (!req.is_multipart_form_data()) return req.body;
  if (req.has_file("file")) return req.get_file_value("file").content;
  if (!req.files.empty()) return req.files.begin()->second.content;
  throw Error(ErrorCode::kMalformedCsv, "multipart upload carries no file part");
}

inline VersionId parse_version_id(const std::string& s) {
  VersionId out = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kUnknownVersion, "version id `" + s + "` is not an integer");
  }
  return out;
}

}  // namespace http_detail

inline void install_routes(httplib::Server& server, Service& service) {
  using namespace http_detail;
  using httplib::Request;
  using httplib::Response;

  server.Post("/api/sessions", guarded([&service](const Request& req, Response& res) {
                const json body = body_object(req);
                std::optional<double> budget;
                std::optional<std::string> policy;
                if (body.contains("total_budget") && !body.at("total_budget").is_null()) {
                  budget = body.at("total_budget").get<double>();
                }
                if (body.contains("policy_name") && !body.at("policy_name").is_null()) {
                  policy = body.at("policy_name").get<std::string>();
                }
                const auto s = service.create_session(budget, policy);
                send_json(res, 201,
                          {{"session_id", s.session_id},
                           {"total_budget", s.total_budget},
                           {"policy", s.policy ? json(*s.policy) : json(nullptr)}});
              }));

  server.Post(R"(/api/sessions/([^/]+)/dataset)", guarded([&service](const Request& req, Response& res) {
                ClampBounds bounds;
                bounds.lower = query_double(req, "lower", bounds.lower);
                bounds.upper = query_double(req, "upper", bounds.upper);
                IngestOptions options;
                if (req.has_param("fill_missing")) options.fill_missing = req.get_param_value("fill_missing") == "true";
                if (req.has_param("unit")) options.unit_label = req.get_param_value("unit");
                const auto r = service.upload_dataset(req.matches[1], upload_bytes(req), bounds, options);
                send_json(res, 201,
                          {{"version_id", r.version_id},
                           {"shape", {r.series_count, r.timestamp_count}},
                           {"delta_f", r.delta_f}});
              }));

  server.Put(R"(/api/sessions/([^/]+)/preferences)", guarded([&service](const Request& req, Response& res) {
               const json body = json::parse(req.body, nullptr, false);
               if (body.is_discarded()) throw Error(ErrorCode::kInvalidProfile, "body is not JSON");
               const auto out = service.set_preferences(req.matches[1], profile_from_json(body));
               json j = out.selection;
               j["decision_matrix"] = out.matrix;
               j["profile"] = body;
               send_json(res, 200, j);
             }));

  server.Post(R"(/api/sessions/([^/]+)/release)", guarded([&service](const Request& req, Response& res) {
                const auto out = service.execute_release(req.matches[1], seed_field(body_object(req), "seed"));
                send_json(res, 201,
                          {{"version", out.version},
                           {"seed", out.seed},
                           {"utility_report", out.utility},
                           {"impact_report", out.impact},
                           {"ledger", out.ledger}});
              }));

  server.Post(R"(/api/sessions/([^/]+)/sweep)", guarded([&service](const Request& req, Response& res) {
                const json body = body_object(req);
                std::optional<std::vector<double>> grid;
                std::optional<int> seeds;
                if (body.contains("grid") && !body.at("grid").is_null()) grid = body.at("grid").get<std::vector<double>>();
                if (body.contains("seeds_per_point") && !body.at("seeds_per_point").is_null()) {
                  seeds = body.at("seeds_per_point").get<int>();
                }
                const auto seed = seed_field(body, "base_seed");
                const auto r = service.run_sweep(req.matches[1], grid, seeds, seed);
                json j = chart_data(r);
                j["base_seed"] = r.base_seed;
                send_json(res, 200, j);
              }));

  server.Get(R"(/api/sessions/([^/]+)/history)", guarded([&service](const Request& req, Response& res) {
               send_json(res, 200, service.get_history(req.matches[1]));
             }));

  server.Get(R"(/api/sessions/([^/]+)/versions/([^/]+)/export)",
             guarded([&service](const Request& req, Response& res) {
               const std::string id = req.matches[1];
               const VersionId vid = parse_version_id(req.matches[2]);
               res.status = 200;
               res.set_header("Content-Disposition",
                              "attachment; filename=\"version_" + std::to_string(vid) + ".csv\"");
               res.set_content(service.export_version(id, vid), "text/csv");
             }));

  server.Get("/api/policies", guarded([&service](const Request&, Response& res) {
               send_json(res, 200, {{"policies", service.config().policies.all()}});
             }));
}

}  // namespace partdp
