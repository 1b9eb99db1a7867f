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

#include "concate/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "concate/errors.hpp"
#include "concate/normal.hpp"

namespace concate {

namespace {

void finalize_arm(ArmStats& arm, std::size_t total) {
  arm.n = arm.values.size();
  arm.share = total == 0 ? 0.0 : static_cast<double>(arm.n) / static_cast<double>(total);
  arm.sorted = arm.values;
  std::sort(arm.sorted.begin(), arm.sorted.end());
  if (arm.n == 0) return;
  arm.min = arm.sorted.front();
  arm.max = arm.sorted.back();
  const double n = static_cast<double>(arm.n);
  arm.mean = std::accumulate(arm.values.begin(), arm.values.end(), 0.0) / n;
  // Rounding can push the mean a hair outside [min, max] for constant arms.
  arm.mean = std::clamp(arm.mean, arm.min, arm.max);
  if (arm.n >= 2) {
    double ss = 0.0;
    for (double v : arm.values) ss += (v - arm.mean) * (v - arm.mean);
    arm.variance = ss / (n - 1.0);
  }
}

}  // namespace

void check_alpha(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError(std::string(name) + " must lie in (0,1), got " +
                          std::to_string(alpha));
  }
}

Theta4d GroupStats::theta() const {
  return Theta4d(treated.mean, control.mean, treated.share, control.share);
}

GroupStats group_stats(std::span<const double> outcomes,
                       std::span<const std::uint8_t> indicators) {
  if (outcomes.size() != indicators.size()) {
    throw ValidationError("group_stats: outcome and indicator lengths differ");
  }
  if (outcomes.empty()) throw DegenerateError("group_stats: no observations");
  GroupStats stats;
  stats.n = outcomes.size();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    (indicators[i] ? stats.treated : stats.control).values.push_back(outcomes[i]);
  }
  finalize_arm(stats.treated, stats.n);
  finalize_arm(stats.control, stats.n);
  if (stats.n >= 2) {
    const double n = static_cast<double>(stats.n);
    const double mean = std::accumulate(outcomes.begin(), outcomes.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : outcomes) ss += (v - mean) * (v - mean);
    stats.pooled_variance = ss / (n - 1.0);
  }
  return stats;
}

GroupStats group_stats(const PanelDataset& panel,
                       const TreatmentAssignment& assignment) {
  const auto outcomes = panel.outcomes();
  return group_stats(outcomes, assignment.indicators);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("quantile level must lie in (0,1), got " + std::to_string(p));
  }
  if (sorted.empty()) throw DegenerateError("quantile of an empty arm");
  const double n = static_cast<double>(sorted.size());
  // Tolerance keeps exact products such as 0.7 * 10 from rounding up a rank.
  const double scaled = p * n;
  auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

NaiveEstimate naive_estimate(const GroupStats& stats, double alpha_u, VarianceMode mode) {
  check_alpha(alpha_u, "alpha_u");
  if (stats.no_overlap()) {
    throw DegenerateError("naive estimate: one treatment arm is empty (no overlap)");
  }
  NaiveEstimate est;
  est.alpha_u = alpha_u;
  est.delta_hat = stats.treated.mean - stats.control.mean;

  if (mode == VarianceMode::kWelch) {
    if (stats.treated.n < 2 || stats.control.n < 2) {
      throw DegenerateError("naive estimate: Welch variance needs two observations per arm");
    }
    est.se = std::sqrt(stats.treated.variance / static_cast<double>(stats.treated.n) +
                       stats.control.variance / static_cast<double>(stats.control.n));
  } else {
    if (stats.n < 2) throw DegenerateError("naive estimate: needs N >= 2");
    double ss = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto& arm = stats.arm(k);
      const double w = single_sum_weight(k == 1, stats.treated.n, stats.control.n);
      for (double y : arm.values) ss += (y * w - est.delta_hat) * (y * w - est.delta_hat);
    }
    est.se = std::sqrt(ss / static_cast<double>(stats.n - 1));
  }
  est.multiplier = two_sided_critical(alpha_u);
  est.ci_lower = est.delta_hat - est.multiplier * est.se;
  est.ci_upper = est.delta_hat + est.multiplier * est.se;
  return est;
}

}  // namespace concate
