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

#ifndef CONCATE_HYBRID_HPP_
#define CONCATE_HYBRID_HPP_

#include <array>

#include <Eigen/Core>

#include "concate/concentration.hpp"
#include "concate/design.hpp"
#include "concate/estimators.hpp"
#include "concate/manski.hpp"

namespace concate {

// Per-arm padded supports, or one pooled-sample envelope on a shared support.
enum class HybridForm { kPerArm, kPooled };

struct HybridBand {
  SupportBounds padded_support;
  IdentificationRegion region;  // Manski region at the padded supports
  double se_lower = 0.0;
  double se_upper = 0.0;
  IdentificationRegion band;
  double alpha_u = 0.0;
  double multiplier = 0.0;
  std::array<double, 2> epsilon{};
  HybridForm form = HybridForm::kPerArm;
};

// Extrema padded by the mixing DKW envelope (budget 8, or 4 one-sided under
// a known lower limit), then a delta-method band with multiplier
// Φ^{-1}(1 - alpha_u/4) around the padded region. With both limits known
// there is nothing to pad and the result is the Bonferroni delta-method band
// at the known support.
HybridBand hybrid_band(const GroupStats& stats, double alpha_u, double c_alpha = 0.0,
                       const Truncation& truncation = {});

// Normal multiplier of the hybrid band.
double hybrid_multiplier(double alpha_u);

// [lower - lower_pad, upper + upper_pad].
inline IdentificationRegion widen(const IdentificationRegion& r, double lower_pad,
                                  double upper_pad) {
  return {r.lower - lower_pad, r.upper + upper_pad};
}

enum class ManskiVariant {
  kPlugin,  // raw plug-in interval
  kBonferroni,   // plug-in widened by the Bonferroni delta-method band
};

struct SimulationBandOptions {
  double alpha = 0.05;
  // Plug-in for Var(δ̂_k) inside the hybrid's delta-method SEs.
  MeanVariance mean_variance = MeanVariance::kPooled;
  ManskiVariant manski = ManskiVariant::kPlugin;
};

struct SimulationBands {
  IdentificationRegion manski;
  IdentificationRegion hybrid;
  double support_lower = 0.0;
  double support_upper = 0.0;
  double epsilon = 0.0;
  double se_lower = 0.0;
  double se_upper = 0.0;
};

// Support (a, b) shared by both arms, from the design rule: G known (-5, 5),
// F (0, max Y0), otherwise the extrema of the baseline outcomes Y0.
std::array<double, 2> simulation_support(const Eigen::Ref<const Eigen::MatrixXd>& baseline,
                                         Design design);

// Pooled envelope sqrt(log C / (2 n T)), C = 2/alpha two-sided and 1/alpha
// for the one-sided design F. Zero for design G.
double simulation_epsilon(std::size_t n_total, double alpha, Design design);

// Single-threshold Manski and hybrid intervals from an n x T panel. The
// treatment matrix holds 0/1 entries. Throws DegenerateError when an arm has
// fewer than two observations.
SimulationBands simulation_bands(const Eigen::Ref<const Eigen::MatrixXd>& baseline,
                                 const Eigen::Ref<const Eigen::MatrixXd>& observed,
                                 const Eigen::Ref<const Eigen::MatrixXd>& treatment,
                                 Design design, const SimulationBandOptions& options = {});

}  // namespace concate

#endif  // CONCATE_HYBRID_HPP_
