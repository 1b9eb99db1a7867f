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

#ifndef CONCATE_ESTIMATORS_HPP_
#define CONCATE_ESTIMATORS_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "concate/panel.hpp"

namespace concate {

// (δ1, δ0, p1, p0): arm means followed by arm shares.
template <typename Scalar>
using Theta = Eigen::Matrix<Scalar, 4, 1>;
using Theta4d = Theta<double>;

struct ArmStats {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::size_t n = 0;
  double mean = kNaN;
  double variance = kNaN;  // (n-1) denominator, NaN below two observations
  double share = 0.0;
  double min = kNaN;
  double max = kNaN;
  std::vector<double> values;  // input order, used for serial statistics
  std::vector<double> sorted;  // order statistics

  bool empty() const { return n == 0; }
};

// Per-arm sufficient statistics. Index 0 is control, 1 is treated.
struct GroupStats {
  ArmStats control;
  ArmStats treated;
  std::size_t n = 0;
  double pooled_variance = ArmStats::kNaN;  // both arms together, (n-1)

  const ArmStats& arm(int k) const { return k == 1 ? treated : control; }
  // Either arm empty: the identification region is not estimable.
  bool no_overlap() const { return control.empty() || treated.empty(); }
  Theta4d theta() const;
};

GroupStats group_stats(std::span<const double> outcomes,
                       std::span<const std::uint8_t> indicators);
GroupStats group_stats(const PanelDataset& panel,
                       const TreatmentAssignment& assignment);

// Y_(ceil(p n)) from ascending order statistics; p in (0,1).
double empirical_quantile(std::span<const double> sorted, double p);

enum class VarianceMode {
  kSingleSum,  // (N-1)^{-1} Σ (Y w - δ̂)^2 with the single-sum weights
  kWelch,      // var_1/n_1 + var_0/n_0
};

struct NaiveEstimate {
  double delta_hat = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double alpha_u = 0.0;
  double multiplier = 0.0;
};

// Mean-comparison estimator with its two-sided Wald interval at level alpha_u.
NaiveEstimate naive_estimate(const GroupStats& stats, double alpha_u,
                             VarianceMode mode = VarianceMode::kWelch);

// Weight of one observation in the single-sum form of δ̂.
inline double single_sum_weight(bool treated, std::size_t n1, std::size_t n0) {
  return treated ? 1.0 / static_cast<double>(n1) : -1.0 / static_cast<double>(n0);
}

void check_alpha(double alpha, const char* name);

}  // namespace concate

#endif  // CONCATE_ESTIMATORS_HPP_
