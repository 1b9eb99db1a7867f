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

#ifndef CONCATE_CONCENTRATION_HPP_
#define CONCATE_CONCENTRATION_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "concate/estimators.hpp"
#include "concate/manski.hpp"

namespace concate {

enum class Sampling { kIid, kMixing };
enum class Sides { kOne, kTwo };

enum class TruncationKind { kNone, kLowerKnown, kBothKnown };

// Known outcome limits. Under kLowerKnown only `lower` is used.
struct Truncation {
  TruncationKind kind = TruncationKind::kNone;
  double lower = 0.0;
  double upper = 0.0;

  static Truncation none() { return {}; }
  static Truncation lower_known(double lambda) {
    return {TruncationKind::kLowerKnown, lambda, 0.0};
  }
  static Truncation both_known(double lambda, double big_lambda) {
    return {TruncationKind::kBothKnown, lambda, big_lambda};
  }
  void validate() const;
};

// The two Bernstein terms of the i.i.d. mean padding are a quadratic regime
// M sqrt(log(12/a)/(cN)) and a linear regime M log(12/a)/(cN). kMinimum
// takes their minimum; kRegimeConsistent takes the maximum, which is the
// threshold that actually drives the sub-exponential tail below a/6.
enum class BernsteinSelection { kRegimeConsistent, kMinimum };

struct BernsteinWeakConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double gamma = 0.5;
  // Long-run variance per arm; estimated from the arm when unset.
  std::optional<double> long_run_variance;

  void validate() const;
};

struct PaddingConfig {
  double alpha_u = 0.05;
  double c_alpha = 0.0;
  // Sub-exponential norm bound per arm (0 control, 1 treated). Defaults to
  // max |Y - mean| within the arm.
  std::optional<std::array<double, 2>> sub_exponential_norm;
  double c_abs = 1.0;
  BernsteinSelection bernstein_selection = BernsteinSelection::kRegimeConsistent;
  BernsteinWeakConstants bernstein_weak;
  Truncation truncation;

  void validate() const;
};

struct Paddings {
  std::array<double, 2> eps{};
  std::array<double, 2> t_p{};
  std::array<double, 2> t_mu{};
};

// DKW envelope half-width. Sides::kOne halves the budget constant.
//   iid:    sqrt(log(budget/a) / (2 n))
//   mixing: (1 + 4 C) sqrt(2 log(budget/a) / n)
double dkw_epsilon(double alpha_u, std::size_t n_k, Sampling sampling, Sides sides,
                   double budget, double c_alpha = 0.0);

// Share padding with the fixed budget 12.
double hoeffding_tp(double alpha_u, std::size_t n, Sampling sampling, double c_alpha = 0.0);

double bernstein_tmu_iid(double alpha_u, std::size_t n_k, double m_k, double c_abs,
                         BernsteinSelection selection = BernsteinSelection::kRegimeConsistent);

struct BernsteinThresholds {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double value() const;
};

// Each threshold drives one term of the weakly dependent Bernstein bound to
// alpha_u/18. `v` is the long-run variance.
BernsteinThresholds bernstein_tmu_mixing(double alpha_u, std::size_t n_k,
                                         const BernsteinWeakConstants& constants, double v);

// Tail bounds evaluated at a deviation t, for inverting the paddings.
double dkw_tail(double t, std::size_t n, Sampling sampling, Sides sides, double c_alpha = 0.0);
double bernstein_iid_tail(double t, std::size_t n, double m, double c_abs);

struct BernsteinWeakTerms {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};
BernsteinWeakTerms bernstein_weak_terms(double t, std::size_t n,
                                        const BernsteinWeakConstants& constants, double v);

// Bartlett-weighted autocovariance sum, lag ceil(n^{1/3}) by default.
double long_run_variance(std::span<const double> values, std::optional<std::size_t> lag = {});

struct FiniteSampleBand {
  IdentificationRegion region;  // plug-in region with empirical extrema
  IdentificationRegion band;
  SupportBounds padded_support;
  Paddings paddings;
  double alpha_u = 0.0;
};

// Interval-arithmetic assembly of the padded bounds: each product of a padded
// mean or share with a padded support endpoint is replaced by its extreme
// over the padding box. Reduces to manski_region when all paddings are zero.
IdentificationRegion padded_region(const GroupStats& stats, const SupportBounds& padded_support,
                                   const Paddings& paddings);

FiniteSampleBand iid_band(const GroupStats& stats, const PaddingConfig& config);
FiniteSampleBand mixing_band(const GroupStats& stats, const PaddingConfig& config);

// Throws DataError when the sample falls outside the declared limits.
void check_truncation(const GroupStats& stats, const Truncation& truncation);

}  // namespace concate

#endif  // CONCATE_CONCENTRATION_HPP_
