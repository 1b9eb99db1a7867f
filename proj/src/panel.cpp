// Copyright 2026 The concate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "concate/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "concate/errors.hpp"

namespace concate {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// RFC 4180 fields: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line,
                                        std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field", line_no);
  fields.push_back(trim(field));
  return fields;
}

bool is_missing(const std::string& s) {
  if (s.empty()) return true;
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "na" || lower == "nan" || lower == "null";
}

double parse_real(const std::string& s, const std::string& column,
                  std::size_t line_no) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("column '" + column + "': cannot parse '" + s + "' as a number",
                    line_no);
  }
  return value;
}

std::int64_t parse_integer(const std::string& s, const std::string& column,
                           std::size_t line_no) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("column '" + column + "': cannot parse '" + s + "' as an integer",
                    line_no);
  }
  return value;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw DataError("schema: required column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

void check_signal(double signal, std::size_t line_no) {
  if (!(signal >= 0.0 && signal <= 100.0)) {
    throw DataError("signal " + std::to_string(signal) + " outside [0, 100]", line_no);
  }
}

}  // namespace

PanelDataset::PanelDataset(std::vector<Observation> observations,
                           ColumnSchema schema, std::size_t dropped_rows)
    : observations_(std::move(observations)),
      schema_(std::move(schema)),
      dropped_rows_(dropped_rows) {
  std::set<std::pair<std::string, std::int64_t>> seen;
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const auto& obs = observations_[i];
    check_signal(obs.signal, i + 1);
    if (!std::isfinite(obs.outcome)) throw DataError("non-finite outcome", i + 1);
    if (!seen.emplace(obs.unit_id, obs.time).second) {
      throw DataError("duplicate (unit, time) pair (" + obs.unit_id + ", " +
                          std::to_string(obs.time) + ")",
                      i + 1);
    }
  }
}

std::vector<double> PanelDataset::outcomes() const {
  std::vector<double> out;
  out.reserve(observations_.size());
  for (const auto& obs : observations_) out.push_back(obs.outcome);
  return out;
}

std::vector<double> PanelDataset::signals() const {
  std::vector<double> out;
  out.reserve(observations_.size());
  for (const auto& obs : observations_) out.push_back(obs.signal);
  return out;
}

std::vector<std::int64_t> PanelDataset::distinct_times() const {
  std::vector<std::int64_t> times;
  times.reserve(observations_.size());
  for (const auto& obs : observations_) times.push_back(obs.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

PanelDataset PanelDataset::filter_group(const std::string& group) const {
  std::vector<Observation> kept;
  for (const auto& obs : observations_) {
    if (obs.group && *obs.group == group) kept.push_back(obs);
  }
  return PanelDataset(std::move(kept), schema_, 0);
}

PanelDataset read_csv(std::istream& in, const ColumnSchema& schema) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("empty input: header row required");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line, line_no);

  const std::size_t unit_idx = column_index(header, schema.unit_col);
  const std::size_t time_idx = column_index(header, schema.time_col);
  const std::size_t outcome_idx = column_index(header, schema.outcome_col);
  const std::size_t signal_idx = column_index(header, schema.signal_col);
  std::optional<std::size_t> group_idx;
  if (schema.group_col) group_idx = column_index(header, *schema.group_col);

  std::vector<Observation> rows;
  std::size_t dropped = 0;
  std::set<std::pair<std::string, std::int64_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no);
    }
    const auto& unit = fields[unit_idx];
    const auto& time = fields[time_idx];
    if (is_missing(unit) || is_missing(time)) {
      throw DataError("unit and time identifiers must be present", line_no);
    }
    Observation obs;
    obs.unit_id = unit;
    obs.time = parse_integer(time, schema.time_col, line_no);
    if (!seen.emplace(obs.unit_id, obs.time).second) {
      throw DataError("duplicate (unit, time) pair (" + unit + ", " + time + ")",
                      line_no);
    }
    if (group_idx && !is_missing(fields[*group_idx])) obs.group = fields[*group_idx];

    const auto& outcome = fields[outcome_idx];
    const auto& signal = fields[signal_idx];
    if (is_missing(outcome) || is_missing(signal)) {
      ++dropped;
      continue;
    }
    obs.outcome = parse_real(outcome, schema.outcome_col, line_no);
    obs.signal = parse_real(signal, schema.signal_col, line_no);
    check_signal(obs.signal, line_no);
    rows.push_back(std::move(obs));
  }
  return PanelDataset(std::move(rows), schema, dropped);
}

PanelDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, schema);
}

TreatmentAssignment assign_treatment(const PanelDataset& panel, double tau) {
  if (!(tau > 0.0 && tau < 100.0)) {
    throw ValidationError("threshold tau must lie in (0, 100), got " +
                          std::to_string(tau));
  }
  TreatmentAssignment out;
  out.tau = tau;
  out.indicators.reserve(panel.size());
  for (const auto& obs : panel.observations()) {
    const bool treated = obs.signal >= tau;
    out.indicators.push_back(treated ? 1 : 0);
    (treated ? out.n1 : out.n0) += 1;
  }
  return out;
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw DataError("summary statistics of an empty sequence");
  SummaryStats s;
  s.n = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2 == 1) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  if (s.n < 2) return s;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  s.sd = std::sqrt(m2 / (n - 1.0));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (s.n >= 3 && m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return s;
}

std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("correlation: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// Pairs tied within runs of equal values: sum of t(t-1)/2.
template <typename Eq>
std::uint64_t tied_pairs(std::size_t n, Eq&& equal) {
  std::uint64_t total = 0, run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

// Sorts `v` ascending and returns the number of strictly inverted pairs.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& scratch,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("correlation: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;

  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {x[i], y[i]};
  std::sort(pairs.begin(), pairs.end());

  const std::uint64_t ties_x =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return pairs[a].first == pairs[b].first; });
  const std::uint64_t ties_xy =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return pairs[a] == pairs[b]; });

  std::vector<double> ys(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pairs[i].second;
  const std::uint64_t swaps = merge_count(ys, scratch, 0, n);
  const std::uint64_t ties_y =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const double total = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = (total - static_cast<double>(ties_x)) *
                       (total - static_cast<double>(ties_y));
  if (denom <= 0.0) return std::nullopt;
  const double score = total - static_cast<double>(ties_x) - static_cast<double>(ties_y) +
                       static_cast<double>(ties_xy) - 2.0 * static_cast<double>(swaps);
  return std::clamp(score / std::sqrt(denom), -1.0, 1.0);
}

std::vector<RollingPoint> rolling_correlation(const PanelDataset& panel,
                                              std::size_t window,
                                              CorrelationKind kind) {
  if (window < 3) throw ValidationError("rolling window must be at least 3");
  const auto times = panel.distinct_times();
  if (times.size() < window) {
    throw ValidationError("rolling window " + std::to_string(window) +
                          " exceeds the " + std::to_string(times.size()) +
                          " distinct time indices");
  }
  std::map<std::int64_t, std::vector<std::size_t>> rows_at;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    rows_at[panel.observations()[i].time].push_back(i);
  }

  std::vector<RollingPoint> out;
  std::vector<double> xs, ys;
  for (std::size_t end = window - 1; end < times.size(); ++end) {
    xs.clear();
    ys.clear();
    for (std::size_t t = end + 1 - window; t <= end; ++t) {
      for (std::size_t row : rows_at[times[t]]) {
        xs.push_back(panel.observations()[row].signal);
        ys.push_back(panel.observations()[row].outcome);
      }
    }
    RollingPoint point;
    point.window_end = times[end];
    point.n = xs.size();
    point.value = kind == CorrelationKind::kPearson ? pearson_correlation(xs, ys)
                                                    : kendall_tau_b(xs, ys);
    out.push_back(point);
  }
  return out;
}

}  // namespace concate
