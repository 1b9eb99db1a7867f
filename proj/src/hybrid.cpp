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

#include "concate/hybrid.hpp"

#include <cmath>
#include <vector>

#include "concate/errors.hpp"
#include "concate/normal.hpp"

namespace concate {

double hybrid_multiplier(double alpha_u) {
  check_alpha(alpha_u, "alpha_u");
  return normal_quantile(1.0 - alpha_u / 4.0);
}

HybridBand hybrid_band(const GroupStats& stats, double alpha_u, double c_alpha,
                       const Truncation& truncation) {
  check_alpha(alpha_u, "alpha_u");
  if (!(c_alpha >= 0.0) || !std::isfinite(c_alpha)) {
    throw ValidationError("C_alpha must be finite and non-negative");
  }
  truncation.validate();
  if (stats.no_overlap()) {
    throw DegenerateError("hybrid band: one treatment arm is empty, the region is not estimable");
  }
  check_truncation(stats, truncation);

  HybridBand out;
  out.alpha_u = alpha_u;
  out.form = HybridForm::kPerArm;

  if (truncation.kind == TruncationKind::kBothKnown) {
    const auto support = known_support(truncation.lower, truncation.upper);
    const auto prop = bonferroni_band(stats, support, alpha_u);
    out.padded_support = support;
    out.region = prop.region;
    out.se_lower = prop.se_lower;
    out.se_upper = prop.se_upper;
    out.band = prop.band;
    out.multiplier = prop.multiplier;
    return out;
  }

  const bool lower_known = truncation.kind == TruncationKind::kLowerKnown;
  SupportBounds padded;
  padded.source = SupportSource::kPadded;
  for (int k = 0; k < 2; ++k) {
    const auto& arm = stats.arm(k);
    out.epsilon[k] = dkw_epsilon(alpha_u, arm.n, Sampling::kMixing,
                                 lower_known ? Sides::kOne : Sides::kTwo, 8.0, c_alpha);
    padded.lower[k] = lower_known ? truncation.lower : arm.min - out.epsilon[k];
    padded.upper[k] = arm.max + out.epsilon[k];
  }
  out.multiplier = hybrid_multiplier(alpha_u);
  const auto dm = delta_method_band(stats, padded, out.multiplier);
  out.padded_support = padded;
  out.region = dm.region;
  out.se_lower = dm.se_lower;
  out.se_upper = dm.se_upper;
  out.band = dm.band;
  return out;
}

std::array<double, 2> simulation_support(const Eigen::Ref<const Eigen::MatrixXd>& baseline,
                                         Design design) {
  if (design == Design::kG) return {-5.0, 5.0};
  if (baseline.size() == 0) throw DegenerateError("simulation bands: empty baseline panel");
  if (design == Design::kF) return {0.0, baseline.maxCoeff()};
  return {baseline.minCoeff(), baseline.maxCoeff()};
}

double simulation_epsilon(std::size_t n_total, double alpha, Design design) {
  check_alpha(alpha, "alpha");
  if (design == Design::kG) return 0.0;
  if (n_total == 0) throw DegenerateError("simulation bands: empty panel");
  const double c = design == Design::kF ? 1.0 / alpha : 2.0 / alpha;
  return std::sqrt(std::log(c) / (2.0 * static_cast<double>(n_total)));
}

SimulationBands simulation_bands(const Eigen::Ref<const Eigen::MatrixXd>& baseline,
                                 const Eigen::Ref<const Eigen::MatrixXd>& observed,
                                 const Eigen::Ref<const Eigen::MatrixXd>& treatment,
                                 Design design, const SimulationBandOptions& options) {
  check_alpha(options.alpha, "alpha");
  if (observed.rows() != treatment.rows() || observed.cols() != treatment.cols() ||
      baseline.rows() != observed.rows() || baseline.cols() != observed.cols()) {
    throw ValidationError("simulation bands: panel matrices differ in shape");
  }
  const auto n_total = static_cast<std::size_t>(observed.size());
  std::vector<double> y(n_total);
  std::vector<std::uint8_t> d(n_total);
  std::size_t i = 0;
  for (Eigen::Index c = 0; c < observed.cols(); ++c) {
    for (Eigen::Index r = 0; r < observed.rows(); ++r, ++i) {
      y[i] = observed(r, c);
      d[i] = treatment(r, c) != 0.0 ? 1 : 0;
    }
  }
  const GroupStats stats = group_stats(y, d);
  if (stats.treated.n < 2 || stats.control.n < 2) {
    throw DegenerateError("simulation bands: each arm needs at least two observations");
  }

  SimulationBands out;
  const auto ab = simulation_support(baseline, design);
  out.support_lower = ab[0];
  out.support_upper = ab[1];
  const SupportBounds support = known_support(ab[0], ab[1]);

  out.manski = options.manski == ManskiVariant::kBonferroni
                   ? bonferroni_band(stats, support, options.alpha).band
                   : manski_region(stats, support);
  if (design == Design::kG) {
    out.hybrid = out.manski;
    return out;
  }

  out.epsilon = simulation_epsilon(n_total, options.alpha, design);
  const double z = hybrid_multiplier(options.alpha);
  const auto dm = delta_method_band(stats, support, z, options.mean_variance);
  out.se_lower = dm.se_lower;
  out.se_upper = dm.se_upper;
  out.hybrid = widen(dm.region, out.epsilon + z * dm.se_lower, out.epsilon + z * dm.se_upper);
  return out;
}

}  // namespace concate
