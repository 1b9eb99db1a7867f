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

#ifndef CONCATE_SEQUENTIAL_HPP_
#define CONCATE_SEQUENTIAL_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "concate/concentration.hpp"
#include "concate/errors.hpp"
#include "concate/estimators.hpp"
#include "concate/manski.hpp"
#include "concate/panel.hpp"

namespace concate {

// Strictly increasing thresholds inside (0, 100).
struct ThresholdGrid {
  std::vector<double> taus;

  // "start:stop:step", inclusive of stop when step divides the range, or a
  // comma-separated list.
  static ThresholdGrid parse(std::string_view spec);
  // 5, 10, ..., 95.
  static ThresholdGrid standard();

  std::size_t count() const { return taus.size(); }
  void validate() const;
};

// Pocock equal spending: alpha / M per look, the last look taking whatever
// rounding leaves so that the left-to-right sum equals alpha.
std::vector<double> spend_alpha(double alpha, std::size_t looks);
inline std::vector<double> spend_alpha(double alpha, const ThresholdGrid& grid) {
  return spend_alpha(alpha, grid.count());
}

// Checks a user-supplied schedule: one positive entry per look, sum <= alpha.
void validate_spending(std::span<const double> alpha_u, double alpha, std::size_t looks);

enum class BandMethod { kNaive, kManskiMax, kManskiQ05, kManskiQ10, kIid, kMixing, kHybrid };

std::string to_string(BandMethod method);
BandMethod parse_band_method(std::string_view text);
const std::vector<BandMethod>& all_band_methods();

struct BandOptions {
  // alpha_u is overwritten per look; the rest (C_alpha, Bernstein
  // constants, truncation) applies to the iid, mixing and hybrid methods.
  PaddingConfig padding;
  VarianceMode naive_variance = VarianceMode::kWelch;
};

struct BandResult {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  BandMethod method = BandMethod::kHybrid;
  double alpha_u = 0.0;
  IdentificationRegion region;  // point estimate for kNaive
  IdentificationRegion band;
  double se_lower = kNaN;
  double se_upper = kNaN;
  double multiplier = kNaN;
  std::optional<SupportBounds> support;
};

BandResult evaluate_band(const GroupStats& stats, BandMethod method, double alpha_u,
                         const BandOptions& options = {});

struct ThresholdRow {
  double tau = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double alpha_u = 0.0;
  bool skipped = false;
  std::string reason;
  std::optional<BandResult> result;

  bool excludes_zero() const { return result && result->band.excludes_zero(); }
};

enum class Direction { kNone, kPositive, kNegative };
std::string to_string(Direction d);

struct ScanResult {
  BandMethod method = BandMethod::kHybrid;
  double alpha = 0.0;
  std::size_t min_group = 10;
  std::vector<ThresholdRow> rows;
  std::optional<double> tipping_tau;
  Direction direction = Direction::kNone;

  std::size_t retained() const;
};

struct ScanOptions {
  std::size_t min_group = 10;
  unsigned threads = 1;
  BandOptions band;
  // Per-look sizes; Pocock equal spending when unset.
  std::optional<std::vector<double>> spending;
};

// Raised when every threshold is skipped.
class EmptyScanError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

// Evaluates every threshold, then reports the first retained one whose band
// excludes zero.
ScanResult scan(const PanelDataset& panel, const ThresholdGrid& grid, BandMethod method,
                double alpha, const ScanOptions& options = {});

}  // namespace concate

#endif  // CONCATE_SEQUENTIAL_HPP_
