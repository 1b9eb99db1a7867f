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

#include "concate/manski.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "concate/errors.hpp"
#include "concate/normal.hpp"

namespace concate {

void SupportBounds::validate() const {
  for (int k = 0; k < 2; ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k])) {
      throw ValidationError("support bounds must be finite");
    }
    if (lower[k] > upper[k]) {
      throw ValidationError("support bounds: L^(" + std::to_string(k) + ") = " +
                            std::to_string(lower[k]) + " exceeds U^(" +
                            std::to_string(k) + ") = " + std::to_string(upper[k]));
    }
  }
}

Eigen::Matrix4d theta_covariance(const GroupStats& stats, MeanVariance mean_variance) {
  const double n = static_cast<double>(stats.n);
  const double p1 = stats.treated.share;
  const double p0 = stats.control.share;
  const double var1 = mean_variance == MeanVariance::kPooled ? stats.pooled_variance
                                                             : stats.treated.variance;
  const double var0 = mean_variance == MeanVariance::kPooled ? stats.pooled_variance
                                                             : stats.control.variance;
  const double share_var = p1 * p0 / n;

  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 0) = var1 / static_cast<double>(stats.treated.n);
  omega(1, 1) = var0 / static_cast<double>(stats.control.n);
  omega(2, 2) = share_var;
  omega(3, 3) = share_var;
  omega(2, 3) = -share_var;
  omega(3, 2) = -share_var;
  return omega;
}

SupportBounds extrema_support(const GroupStats& stats) {
  if (stats.no_overlap()) throw DegenerateError("extrema support: an arm is empty");
  SupportBounds s;
  s.lower = {stats.control.min, stats.treated.min};
  s.upper = {stats.control.max, stats.treated.max};
  s.source = SupportSource::kEmpiricalExtrema;
  return s;
}

SupportBounds trimmed_support(const GroupStats& stats, double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw ValidationError("trimming level must lie in (0, 0.5), got " + std::to_string(p));
  }
  if (stats.no_overlap()) throw DegenerateError("trimmed support: an arm is empty");
  SupportBounds s;
  for (int k = 0; k < 2; ++k) {
    s.lower[k] = empirical_quantile(stats.arm(k).sorted, p);
    s.upper[k] = empirical_quantile(stats.arm(k).sorted, 1.0 - p);
  }
  s.source = SupportSource::kQuantile;
  return s;
}

SupportBounds known_support(double lower, double upper) {
  SupportBounds s;
  s.lower = {lower, lower};
  s.upper = {upper, upper};
  s.source = SupportSource::kKnown;
  s.validate();
  return s;
}

IdentificationRegion manski_region(const GroupStats& stats, const SupportBounds& support) {
  if (stats.no_overlap()) {
    throw DegenerateError(
        "identification region: one treatment arm is empty, the region is not estimable");
  }
  support.validate();
  const Theta4d theta = stats.theta();
  return {manski_lower(theta, support), manski_upper(theta, support)};
}

DeltaMethodBand delta_method_band(const GroupStats& stats, const SupportBounds& support,
                                  double multiplier, MeanVariance mean_variance) {
  if (stats.n == 0) throw DegenerateError("delta-method band: N = 0");
  if (stats.treated.n < 2 || stats.control.n < 2) {
    throw DegenerateError("delta-method band: each arm needs at least two observations");
  }
  DeltaMethodBand out;
  out.region = manski_region(stats, support);
  out.multiplier = multiplier;

  const Theta4d theta = stats.theta();
  const Eigen::Matrix4d omega = theta_covariance(stats, mean_variance);
  const Theta4d grad_lower = manski_lower_gradient(theta, support);
  const Theta4d grad_upper = manski_upper_gradient(theta, support);
  out.se_lower = std::sqrt(std::max(0.0, grad_lower.dot(omega * grad_lower)));
  out.se_upper = std::sqrt(std::max(0.0, grad_upper.dot(omega * grad_upper)));
  out.band = {out.region.lower - multiplier * out.se_lower,
              out.region.upper + multiplier * out.se_upper};
  return out;
}

DeltaMethodBand bonferroni_band(const GroupStats& stats, const SupportBounds& support,
                           double alpha_u) {
  check_alpha(alpha_u, "alpha_u");
  auto band = delta_method_band(stats, support, two_sided_critical(alpha_u));
  band.alpha_u = alpha_u;
  return band;
}

}  // namespace concate
