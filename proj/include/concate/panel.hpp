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

#ifndef CONCATE_PANEL_HPP_
#define CONCATE_PANEL_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace concate {

// One firm-quarter. `signal` is a percentage in [0, 100].
struct Observation {
  std::string unit_id;
  std::optional<std::string> group;
  std::int64_t time = 0;
  double outcome = 0.0;
  double signal = 0.0;
};

// Header names for the CSV columns. The group column is optional.
struct ColumnSchema {
  std::string unit_col = "unit_id";
  std::string time_col = "time";
  std::string outcome_col = "outcome";
  std::string signal_col = "signal";
  std::optional<std::string> group_col;
};

// Long-format panel after listwise deletion. Rows keep file order.
class PanelDataset {
 public:
  PanelDataset() = default;
  // Validates the row invariants (signal range, unique unit/time pairs).
  PanelDataset(std::vector<Observation> observations, ColumnSchema schema = {},
               std::size_t dropped_rows = 0);

  const std::vector<Observation>& observations() const { return observations_; }
  const ColumnSchema& schema() const { return schema_; }
  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  // Rows removed by listwise deletion during ingestion.
  std::size_t dropped_rows() const { return dropped_rows_; }

  std::vector<double> outcomes() const;
  std::vector<double> signals() const;
  // Sorted distinct time indices.
  std::vector<std::int64_t> distinct_times() const;
  // Restricts to rows whose group label equals `group`.
  PanelDataset filter_group(const std::string& group) const;

 private:
  std::vector<Observation> observations_;
  ColumnSchema schema_;
  std::size_t dropped_rows_ = 0;
};

// Reads a headered, comma-separated UTF-8 file. Rows with a missing outcome or
// signal (empty, NA, NaN) are dropped; everything else must parse.
PanelDataset load_csv(const std::filesystem::path& path,
                      const ColumnSchema& schema = {});
PanelDataset read_csv(std::istream& in, const ColumnSchema& schema = {});

// Z = 1{signal >= tau}.
struct TreatmentAssignment {
  double tau = 0.0;
  std::vector<std::uint8_t> indicators;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

TreatmentAssignment assign_treatment(const PanelDataset& panel, double tau);

struct SummaryStats {
  std::size_t n = 0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::optional<double> sd;        // n >= 2, (n-1) denominator
  std::optional<double> skewness;  // n >= 3 and sd > 0; m3 / m2^{3/2}
  std::optional<double> kurtosis;  // n >= 3 and sd > 0; excess, m4 / m2^2 - 3
};

SummaryStats summary_stats(std::span<const double> values);

enum class CorrelationKind { kPearson, kKendall };

// Returns nullopt when either margin has zero variance.
std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y);
// Kendall tau-b in O(n log n) (Knight's algorithm).
std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y);

struct RollingPoint {
  std::int64_t window_end = 0;
  std::size_t n = 0;
  std::optional<double> value;
};

// Right-aligned windows of `window` consecutive distinct time indices; each
// window pools every observation whose time falls inside it.
std::vector<RollingPoint> rolling_correlation(const PanelDataset& panel,
                                              std::size_t window,
                                              CorrelationKind kind);

}  // namespace concate

#endif  // CONCATE_PANEL_HPP_
