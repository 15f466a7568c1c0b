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

// Time-series datasets: CSV ingestion with clamping, CSV export, and the
// immutable version store that records every noisy release.
//
// CSV layout: the first header cell is `timestamp`, the remaining header cells
// are series identifiers. One row per timestamp. Timestamps are either all
// ISO-8601 (UTC or with a numeric offset) or all integer epoch seconds, and
// must be strictly increasing with a constant step.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "partdp/error.hpp"

namespace partdp {

using VersionId = std::int64_t;

struct ClampBounds {
  double lower = 0.0;
  double upper = 10000.0;

  // Per-cell sensitivity of the identity release over clamped values.
  double sensitivity() const { return upper - lower; }

  void validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
      throw Error(ErrorCode::kInvalidBounds,
                  "clamp bounds require finite lower < upper, got [" + std::to_string(lower) +
                      ", " + std::to_string(upper) + "]");
    }
  }

  double clamp(double v) const { return std::min(upper, std::max(lower, v)); }
};

enum class TimestampFormat { kIso8601, kEpochSeconds };

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

template <typename Int>
bool parse_fixed_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Parses `YYYY-MM-DDTHH:MM:SS` with an optional `Z` or `+HH:MM`/`-HH:MM`
// suffix (a space may replace `T`). Returns epoch seconds.
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  std::int64_t year = 0;
  unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!detail::parse_fixed_int(s.substr(0, 4), year) ||
      !detail::parse_fixed_int(s.substr(5, 2), month) ||
      !detail::parse_fixed_int(s.substr(8, 2), day) ||
      !detail::parse_fixed_int(s.substr(11, 2), hour) ||
      !detail::parse_fixed_int(s.substr(14, 2), minute) ||
      !detail::parse_fixed_int(s.substr(17, 2), second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
    return std::nullopt;
  }
  std::int64_t offset = 0;
  std::string_view rest = s.substr(19);
  if (rest == "Z" || rest.empty()) {
    offset = 0;
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    unsigned oh = 0, om = 0;
    if (!detail::parse_fixed_int(rest.substr(1, 2), oh) ||
        !detail::parse_fixed_int(rest.substr(4, 2), om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset = (rest[0] == '+' ? 1 : -1) * static_cast<std::int64_t>(oh * 3600 + om * 60);
  } else {
    return std::nullopt;
  }
  const std::int64_t days = detail::days_from_civil(year, month, day);
  return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

// Formats epoch seconds as `YYYY-MM-DDTHH:MM:SSZ`.
inline std::string format_iso8601(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t secs = epoch_seconds % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  detail::civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return buf;
}

// Shortest decimal representation that round-trips to the same double.
// Shortest round-trip text; plain decimals unless the magnitude is extreme.
inline std::string format_double(double v) {
  char buf[64];
  const double a = std::fabs(v);
  const bool plain = a == 0.0 || (a >= 1e-6 && a < 1e15);
  auto [ptr, ec] = plain ? std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Series-major matrix of readings: one row per series, one column per
// timestamp.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset() = default;

  TimeSeriesDataset(std::vector<std::string> series_ids, std::vector<std::int64_t> timestamps,
                    std::vector<double> values, std::string unit_label = "W",
                    TimestampFormat format = TimestampFormat::kIso8601)
      : series_ids_(std::move(series_ids)),
        timestamps_(std::move(timestamps)),
        values_(std::move(values)),
        unit_label_(std::move(unit_label)),
        format_(format) {
    validate();
  }

  std::size_t series_count() const { return series_ids_.size(); }
  std::size_t timestamp_count() const { return timestamps_.size(); }
  std::size_t cell_count() const { return values_.size(); }
  std::pair<std::size_t, std::size_t> shape() const { return {series_count(), timestamp_count()}; }

  const std::vector<std::string>& series_ids() const { return series_ids_; }
  const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t series) const {
    return std::span<const double>(values_).subspan(series * timestamp_count(), timestamp_count());
  }
  double at(std::size_t series, std::size_t t) const { return values_[series * timestamp_count() + t]; }
  const std::string& unit_label() const { return unit_label_; }
  TimestampFormat timestamp_format() const { return format_; }

  bool same_shape(const TimeSeriesDataset& other) const { return shape() == other.shape(); }

  // Copy with the same axes and a replacement value matrix.
  TimeSeriesDataset with_values(std::vector<double> values) const {
    if (values.size() != values_.size()) {
      throw Error(ErrorCode::kShapeMismatch, "replacement matrix has " +
                                                 std::to_string(values.size()) + " cells, expected " +
                                                 std::to_string(values_.size()));
    }
    return TimeSeriesDataset(series_ids_, timestamps_, std::move(values), unit_label_, format_);
  }

  TimeSeriesDataset clamped(const ClampBounds& bounds) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [&](double v) { return bounds.clamp(v); });
    return with_values(std::move(out));
  }

  friend bool operator==(const TimeSeriesDataset&, const TimeSeriesDataset&) = default;

 private:
  void validate() const {
    if (series_ids_.empty() || timestamps_.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "dataset needs at least one series and one timestamp");
    }
    if (values_.size() != series_ids_.size() * timestamps_.size()) {
      throw Error(ErrorCode::kShapeMismatch, "value matrix does not match series x timestamp count");
    }
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
      if (timestamps_[i] <= timestamps_[i - 1]) {
        throw Error(ErrorCode::kNonMonotonicTimestamps,
                    "timestamps must be strictly increasing (row " + std::to_string(i + 1) + ")");
      }
    }
    if (timestamps_.size() > 2) {
      const std::int64_t step = timestamps_[1] - timestamps_[0];
      for (std::size_t i = 2; i < timestamps_.size(); ++i) {
        if (timestamps_[i] - timestamps_[i - 1] != step) {
          throw Error(ErrorCode::kMalformedCsv,
                      "irregular timestamp step at row " + std::to_string(i + 1) + ": expected " +
                          std::to_string(step) + " s");
        }
      }
    }
  }

  std::vector<std::string> series_ids_;
  std::vector<std::int64_t> timestamps_;
  std::vector<double> values_;
  std::string unit_label_ = "W";
  TimestampFormat format_ = TimestampFormat::kIso8601;
};

struct IngestOptions {
  // Replace empty cells with the mean of the series' present values instead
  // of rejecting the file.
  bool fill_missing = false;
  std::string unit_label = "W";
};

// Parses the CSV external format. Values are returned unclamped.
inline TimeSeriesDataset parse_csv(std::string_view bytes, const IngestOptions& options = {}) {
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xEF &&
      static_cast<unsigned char>(bytes[1]) == 0xBB && static_cast<unsigned char>(bytes[2]) == 0xBF) {
    bytes.remove_prefix(3);
  }

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < bytes.size();) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    std::string_view line = bytes.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kEmptyDataset, "CSV input is empty");

  const auto header = detail::split_fields(lines[0]);
  if (header[0] != "timestamp") {
    throw Error(ErrorCode::kMalformedCsv, "first header cell must be `timestamp`");
  }
  std::vector<std::string> ids;
  std::unordered_set<std::string_view> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) {
      throw Error(ErrorCode::kMalformedCsv, "empty series id in header column " + std::to_string(c + 1));
    }
    if (!seen.insert(header[c]).second) {
      throw Error(ErrorCode::kMalformedCsv, "duplicate series id `" + std::string(header[c]) + "`");
    }
    ids.emplace_back(header[c]);
  }
  const std::size_t rows = lines.size() - 1;
  if (ids.empty() || rows == 0) {
    throw Error(ErrorCode::kEmptyDataset, "CSV has no series columns or no timestamp rows");
  }

  const std::size_t n_series = ids.size();
  std::vector<std::int64_t> timestamps(rows);
  std::vector<double> values(n_series * rows);
  std::vector<bool> missing(n_series * rows, false);
  std::optional<TimestampFormat> format;

  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = detail::split_fields(lines[r + 1]);
    const std::string where = "row " + std::to_string(r + 2);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedCsv, where + " has " + std::to_string(fields.size()) +
                                                " fields, header has " + std::to_string(header.size()));
    }
    std::int64_t ts = 0;
    TimestampFormat row_format;
    if (detail::parse_fixed_int(fields[0], ts)) {
      row_format = TimestampFormat::kEpochSeconds;
    } else if (auto iso = parse_iso8601(fields[0])) {
      ts = *iso;
      row_format = TimestampFormat::kIso8601;
    } else {
      throw Error(ErrorCode::kMalformedCsv, where + ": unparseable timestamp `" + std::string(fields[0]) + "`");
    }
    if (format && *format != row_format) {
      throw Error(ErrorCode::kMalformedCsv, where + ": mixed timestamp formats");
    }
    format = row_format;
    timestamps[r] = ts;

    for (std::size_t s = 0; s < n_series; ++s) {
      std::string_view cell = fields[s + 1];
      const std::size_t idx = s * rows + r;
      if (cell.empty()) {
        if (!options.fill_missing) {
          throw Error(ErrorCode::kMalformedCsv, where + ": missing value for series `" + ids[s] + "`");
        }
        missing[idx] = true;
        continue;
      }
      if (cell.front() == '+') cell.remove_prefix(1);
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedCsv,
                    where + ": non-numeric value `" + std::string(fields[s + 1]) + "`");
      }
      values[idx] = v;
    }
  }

  if (options.fill_missing) {
    for (std::size_t s = 0; s < n_series; ++s) {
      double sum = 0.0;
      std::size_t present = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!missing[s * rows + r]) {
          sum += values[s * rows + r];
          ++present;
        }
      }
      if (present == 0) {
        throw Error(ErrorCode::kMalformedCsv, "series `" + ids[s] + "` has no values to fill from");
      }
      const double mean = sum / static_cast<double>(present);
      for (std::size_t r = 0; r < rows; ++r) {
        if (missing[s * rows + r]) values[s * rows + r] = mean;
      }
    }
  }

  return TimeSeriesDataset(std::move(ids), std::move(timestamps), std::move(values),
                           options.unit_label, *format);
}

// Serializes in the same layout parse_csv reads. Timestamps keep the format
// the dataset was ingested with; values use the shortest round-trip form.
inline std::string write_csv(const TimeSeriesDataset& data) {
  std::string out = "timestamp";
  for (const auto& id : data.series_ids()) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (std::size_t t = 0; t < data.timestamp_count(); ++t) {
    const std::int64_t ts = data.timestamps()[t];
    out += data.timestamp_format() == TimestampFormat::kIso8601 ? format_iso8601(ts) : std::to_string(ts);
    for (std::size_t s = 0; s < data.series_count(); ++s) {
      out += ',';
      out += format_double(data.at(s, t));
    }
    out += '\n';
  }
  return out;
}

enum class Mechanism { kLaplace };

inline std::string_view mechanism_name(Mechanism) { return "laplace"; }

struct Provenance {
  double epsilon_used = 0.0;
  std::uint64_t seed = 0;
  Mechanism mechanism = Mechanism::kLaplace;
  // Sensitivity the noise was calibrated to; expected per-cell MAE is
  // delta_f / epsilon_used.
  double delta_f = 0.0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct DatasetVersion {
  VersionId version_id = 0;
  std::optional<VersionId> parent_id;
  std::shared_ptr<const TimeSeriesDataset> payload;
  std::optional<Provenance> provenance;

  bool is_root() const { return !provenance.has_value(); }
  const TimeSeriesDataset& data() const { return *payload; }
};

// Parses, clamps, and wraps an upload as version 0.
inline DatasetVersion ingest_csv(std::string_view bytes, const ClampBounds& bounds,
                                 const IngestOptions& options = {}) {
  bounds.validate();
  auto clamped = parse_csv(bytes, options).clamped(bounds);
  return DatasetVersion{0, std::nullopt, std::make_shared<const TimeSeriesDataset>(std::move(clamped)),
                        std::nullopt};
}

// Append-only store of versions for one uploaded dataset. Version 0 is the
// clamped upload; every later version is a fork with provenance. Payloads are
// shared immutable snapshots, so copying a store is cheap and never aliases
// mutable state.
class VersionStore {
 public:
  explicit VersionStore(DatasetVersion root) {
    if (root.version_id != 0 || root.parent_id || root.provenance || !root.payload) {
      throw Error(ErrorCode::kInvalidArgument, "version store root must be a provenance-free version 0");
    }
    versions_.push_back(std::move(root));
  }

  const DatasetVersion& root() const { return versions_.front(); }
  std::size_t size() const { return versions_.size(); }
  VersionId next_id() const { return versions_.back().version_id + 1; }
  const std::deque<DatasetVersion>& versions() const { return versions_; }

  bool contains(VersionId id) const { return id >= 0 && static_cast<std::size_t>(id) < versions_.size(); }

  const DatasetVersion& get(VersionId id) const {
    if (!contains(id)) {
      throw Error(ErrorCode::kUnknownVersion, "no dataset version " + std::to_string(id));
    }
    return versions_[static_cast<std::size_t>(id)];
  }

  // Creates a child of `parent` holding `payload`.
  const DatasetVersion& fork(VersionId parent, TimeSeriesDataset payload, const Provenance& provenance) {
    const DatasetVersion& p = get(parent);
    if (!p.data().same_shape(payload)) {
      throw Error(ErrorCode::kShapeMismatch, "forked payload shape differs from parent version " +
                                                 std::to_string(parent));
    }
    if (!(provenance.epsilon_used > 0.0) || !std::isfinite(provenance.epsilon_used)) {
      throw Error(ErrorCode::kInvalidArgument, "provenance epsilon must be positive");
    }
    versions_.push_back(DatasetVersion{next_id(), parent,
                                       std::make_shared<const TimeSeriesDataset>(std::move(payload)),
                                       provenance});
    return versions_.back();
  }

 private:
  std::deque<DatasetVersion> versions_;
};

}  // namespace partdp
