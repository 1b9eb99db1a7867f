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

#ifndef CONCATE_MONTECARLO_HPP_
#define CONCATE_MONTECARLO_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "concate/design.hpp"
#include "concate/hybrid.hpp"
#include "concate/panel.hpp"

namespace concate {

using Rng = std::mt19937_64;

inline constexpr const char* kRngIdentity =
    "std::mt19937_64, per-replication seed splitmix64(base_seed, design, T, replication)";

// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);
// Order-sensitive combination of two words through splitmix64.
std::uint64_t stable_hash(std::uint64_t a, std::uint64_t b);

enum class ArInit {
  kZero,        // Y0_{i,0} = 0, so Y0_{i,1} is a single innovation
  kStationary,  // Y0_{i,1} ~ N(0, 1 / (1 - rho^2))
};

struct DgpSpec {
  Design design = Design::kA;
  std::size_t n = 50;
  std::size_t periods = 1;
  double delta = 4.0;
  double treat_prob = 0.3;
  double ar_coefficient = 0.4;
  ArInit ar_init = ArInit::kZero;
  double selection_slope = 0.5;     // magnitude; C uses -slope, D uses +slope
  double selection_noise_sd = 0.5;
  double outlier_prob = 0.002;      // each of +-outlier_value
  double outlier_value = 10.0;
  double chi2_df = 3.0;
  double uniform_half_width = 5.0;

  std::size_t total() const { return n * periods; }
  void validate() const;
};

// n x T matrices; treatment holds 0/1.
struct SimulatedPanel {
  Eigen::MatrixXd baseline;
  Eigen::MatrixXd treatment;
  Eigen::MatrixXd observed;
};

// One draw of the baseline outcome for the i.i.d. designs A, B, E, F, G.
double draw_baseline(const DgpSpec& spec, Rng& rng);

SimulatedPanel generate(const DgpSpec& spec, Rng& rng);
SimulatedPanel generate(const DgpSpec& spec, std::uint64_t seed);

// Latent support (a*, b*) from a large oracle sample: (min Y0, max Y0 + delta),
// F pinned at a* = 0, G the published (-5, 5). Reported only; the replication
// loop uses per-sample extrema.
struct OracleSupport {
  double lower = 0.0;
  double upper = 0.0;
};
OracleSupport oracle_support(const DgpSpec& spec, std::uint64_t seed,
                             std::size_t draws = 1'000'000);

struct CoverageCell {
  Design design = Design::kA;
  std::size_t n_total = 0;
  std::string method;  // "hybrid" or "manski"
  std::size_t hits = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;

  double coverage() const {
    return replications == 0 ? 0.0
                             : static_cast<double>(hits) / static_cast<double>(replications);
  }
};

struct CellOptions {
  std::size_t replications = 2000;
  std::uint64_t base_seed = 2024;
  SimulationBandOptions bands;
  unsigned threads = 1;
  bool compute_oracle = false;
  std::size_t oracle_draws = 1'000'000;
};

struct Replication {
  bool hit_hybrid = false;
  bool hit_manski = false;
  std::size_t redraws = 0;
  SimulationBands bands;
};

struct CellResult {
  CoverageCell hybrid;
  CoverageCell manski;
  std::vector<Replication> replications;
  std::optional<OracleSupport> oracle;
};

// Seed of replication r in a cell.
std::uint64_t replication_seed(std::uint64_t base_seed, Design design, std::size_t periods,
                               std::size_t r);

// Draws a panel for replication r, redrawing with perturbed sub-seeds while
// either arm has fewer than two observations.
SimulatedPanel draw_replication(const DgpSpec& spec, std::uint64_t seed,
                                std::size_t* redraws = nullptr);

CellResult run_cell(const DgpSpec& spec, const CellOptions& options = {});

// Designs x periods, both methods per cell, in design-major order.
std::vector<CoverageCell> coverage_table(const std::vector<Design>& designs,
                                         const std::vector<std::size_t>& periods,
                                         const DgpSpec& base, const CellOptions& options);

void write_coverage_csv(std::ostream& out, const std::vector<CoverageCell>& cells);

// Panels for exercising threshold scans. Units carry one signal per period.
struct ScanPanelSpec {
  std::size_t units = 200;
  std::size_t periods = 20;
  // Outcome ~ U[0, 10] below the cut and U[jump_low, jump_high] from it on.
  double cut = 55.0;
  double jump_low = 11.0;
  double jump_high = 12.0;
  double signal_max = 93.0;  // signals ~ U[0, signal_max]
};

// Outcomes shift upward once the signal reaches `cut`.
PanelDataset make_tipping_panel(const ScanPanelSpec& spec, std::uint64_t seed);
// Signals ~ U[0, 100], outcomes ~ N(0, 1) independent of the signal.
PanelDataset make_null_panel(std::size_t units, std::size_t periods, std::uint64_t seed);

}  // namespace concate

#endif  // CONCATE_MONTECARLO_HPP_
