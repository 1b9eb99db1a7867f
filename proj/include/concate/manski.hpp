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

#ifndef CONCATE_MANSKI_HPP_
#define CONCATE_MANSKI_HPP_

#include <array>

#include <Eigen/Core>

#include "concate/estimators.hpp"

namespace concate {

enum class SupportSource { kEmpiricalExtrema, kQuantile, kKnown, kPadded };

// Bounding constants [L^(k), U^(k)] for the latent counterfactual means,
// indexed by arm (0 control, 1 treated).
struct SupportBounds {
  std::array<double, 2> lower{};
  std::array<double, 2> upper{};
  SupportSource source = SupportSource::kKnown;

  // Throws ValidationError unless lower[k] <= upper[k] and all are finite.
  void validate() const;
};

struct IdentificationRegion {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double x) const { return lower <= x && x <= upper; }
  bool contains(const IdentificationRegion& other) const {
    return lower <= other.lower && other.upper <= upper;
  }
  bool excludes_zero() const { return lower > 0.0 || upper < 0.0; }
};

// Lower bound functional δ1 p1 + L1 p0 - U0 p1 - δ0 p0, generic in the scalar
// so that it can be evaluated in extended precision or differentiated.
template <typename Derived>
typename Derived::Scalar manski_lower(const Eigen::MatrixBase<Derived>& theta,
                                      const SupportBounds& s) {
  using Scalar = typename Derived::Scalar;
  return theta(0) * theta(2) + Scalar(s.lower[1]) * theta(3) -
         Scalar(s.upper[0]) * theta(2) - theta(1) * theta(3);
}

// Upper bound functional δ1 p1 + U1 p0 - L0 p1 - δ0 p0.
template <typename Derived>
typename Derived::Scalar manski_upper(const Eigen::MatrixBase<Derived>& theta,
                                      const SupportBounds& s) {
  using Scalar = typename Derived::Scalar;
  return theta(0) * theta(2) + Scalar(s.upper[1]) * theta(3) -
         Scalar(s.lower[0]) * theta(2) - theta(1) * theta(3);
}

// Analytic gradients with the support constants held fixed.
template <typename Derived>
Theta<typename Derived::Scalar> manski_lower_gradient(
    const Eigen::MatrixBase<Derived>& theta, const SupportBounds& s) {
  using Scalar = typename Derived::Scalar;
  return Theta<Scalar>(theta(2), -theta(3), theta(0) - Scalar(s.upper[0]),
                       Scalar(s.lower[1]) - theta(1));
}

template <typename Derived>
Theta<typename Derived::Scalar> manski_upper_gradient(
    const Eigen::MatrixBase<Derived>& theta, const SupportBounds& s) {
  using Scalar = typename Derived::Scalar;
  return Theta<Scalar>(theta(2), -theta(3), theta(0) - Scalar(s.lower[0]),
                       Scalar(s.upper[1]) - theta(1));
}

// Plug-in for Var(δ̂_k): each arm's own sample variance, or the variance of
// all observed outcomes pooled across arms.
enum class MeanVariance { kPerArm, kPooled };

// Ω/N for θ̂ = (δ̂1, δ̂0, p̂1, p̂0): Var(δ̂_k) = var_k / N_k on the diagonal,
// Var(p̂1) = Var(p̂0) = p̂1 p̂0 / N, and -p̂1 p̂0 / N coupling the shares.
Eigen::Matrix4d theta_covariance(const GroupStats& stats,
                                 MeanVariance mean_variance = MeanVariance::kPerArm);

struct DeltaMethodBand {
  IdentificationRegion region;
  double se_lower = 0.0;
  double se_upper = 0.0;
  IdentificationRegion band;
  double alpha_u = 0.0;
  double multiplier = 0.0;
};

SupportBounds extrema_support(const GroupStats& stats);
// L_k = Q̂_k(p), U_k = Q̂_k(1-p) for p in (0, 0.5).
SupportBounds trimmed_support(const GroupStats& stats, double p);
SupportBounds known_support(double lower, double upper);

// Plug-in region; throws DegenerateError when an arm is empty.
IdentificationRegion manski_region(const GroupStats& stats, const SupportBounds& support);

// Region widened by multiplier * SE on each side, SE from the delta method.
DeltaMethodBand delta_method_band(const GroupStats& stats, const SupportBounds& support,
                                  double multiplier,
                                  MeanVariance mean_variance = MeanVariance::kPerArm);

// Bonferroni delta-method band at size alpha_u: multiplier Φ^{-1}(1 - alpha_u/2).
DeltaMethodBand bonferroni_band(const GroupStats& stats, const SupportBounds& support,
                           double alpha_u);

}  // namespace concate

#endif  // CONCATE_MANSKI_HPP_
