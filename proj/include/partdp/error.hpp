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

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace partdp {

// Closed set of failure kinds. Every module reports failures through
// partdp::Error carrying one of these; the HTTP layer maps them 1:1 onto
// ApiError bodies.
enum class ErrorCode {
  kMalformedCsv,
  kEmptyDataset,
  kNonMonotonicTimestamps,
  kInvalidBounds,
  kShapeMismatch,
  kUnknownVersion,
  kInvalidProfile,
  kInvalidPolicy,
  kEmptyGrid,
  kGridOutsideSafeRange,
  kDimensionMismatch,
  kNoFeasibleAlternative,
  kInvalidArgument,
  kBudgetExceeded,
  kEpsilonOutsideSafeRange,
  kNoisingNoisyData,
  kUnrelatedVersions,
  kDegenerateInput,
  kProviderUnavailable,
  kMalformedProviderResponse,
  kUnknownPolicy,
  kUnknownSession,
  kDatasetAlreadyUploaded,
  kNoDatasetUploaded,
  kNoSelection,
  kRawExportDisabled,
  kIoError,
  kInternal,
};

struct ErrorInfo {
  ErrorCode code;
  std::string_view name;
  bool retryable;
  int http_status;
};

// clang-format off
inline constexpr std::array<ErrorInfo, 28> kErrorTable = {{
  {ErrorCode::kMalformedCsv,              "MalformedCsv",              true,  400},
  {ErrorCode::kEmptyDataset,              "EmptyDataset",              true,  400},
  {ErrorCode::kNonMonotonicTimestamps,    "NonMonotonicTimestamps",    true,  400},
  {ErrorCode::kInvalidBounds,             "InvalidBounds",             true,  400},
  {ErrorCode::kShapeMismatch,             "ShapeMismatch",             false, 400},
  {ErrorCode::kUnknownVersion,            "UnknownVersion",            false, 404},
  {ErrorCode::kInvalidProfile,            "InvalidProfile",            true,  400},
  {ErrorCode::kInvalidPolicy,             "InvalidPolicy",             false, 400},
  {ErrorCode::kEmptyGrid,                 "EmptyGrid",                 true,  400},
  {ErrorCode::kGridOutsideSafeRange,      "GridOutsideSafeRange",      true,  400},
  {ErrorCode::kDimensionMismatch,         "DimensionMismatch",         false, 400},
  {ErrorCode::kNoFeasibleAlternative,     "NoFeasibleAlternative",     false, 409},
  {ErrorCode::kInvalidArgument,           "InvalidArgument",           true,  400},
  {ErrorCode::kBudgetExceeded,            "BudgetExceeded",            false, 409},
  {ErrorCode::kEpsilonOutsideSafeRange,   "EpsilonOutsideSafeRange",   true,  400},
  {ErrorCode::kNoisingNoisyData,          "NoisingNoisyData",          false, 409},
  {ErrorCode::kUnrelatedVersions,         "UnrelatedVersions",         false, 400},
  {ErrorCode::kDegenerateInput,           "DegenerateInput",           false, 400},
  {ErrorCode::kProviderUnavailable,       "ProviderUnavailable",       true,  502},
  {ErrorCode::kMalformedProviderResponse, "MalformedProviderResponse", true,  502},
  {ErrorCode::kUnknownPolicy,             "UnknownPolicy",             false, 404},
  {ErrorCode::kUnknownSession,            "UnknownSession",            false, 404},
  {ErrorCode::kDatasetAlreadyUploaded,    "DatasetAlreadyUploaded",    false, 409},
  {ErrorCode::kNoDatasetUploaded,         "NoDatasetUploaded",         true,  409},
  {ErrorCode::kNoSelection,               "NoSelection",               true,  409},
  {ErrorCode::kRawExportDisabled,         "RawExportDisabled",         false, 403},
  {ErrorCode::kIoError,                   "IoError",                   true,  500},
  {ErrorCode::kInternal,                  "Internal",                  false, 500},
}};
// clang-format on

constexpr bool error_table_is_ordered() {
  for (std::size_t i = 0; i < kErrorTable.size(); ++i) {
    if (static_cast<std::size_t>(kErrorTable[i].code) != i) return false;
  }
  return true;
}
static_assert(error_table_is_ordered());

constexpr const ErrorInfo& error_info(ErrorCode code) {
  return kErrorTable[static_cast<std::size_t>(code)];
}

constexpr std::string_view error_name(ErrorCode code) { return error_info(code).name; }

inline std::optional<ErrorCode> error_code_from_name(std::string_view name) {
  for (const auto& info : kErrorTable) {
    if (info.name == name) return info.code;
  }
  return std::nullopt;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool retryable() const noexcept { return error_info(code_).retryable; }

 private:
  ErrorCode code_;
};

}  // namespace partdp
