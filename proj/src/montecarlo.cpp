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

#include "concate/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "concate/errors.hpp"
#include "concate/format.hpp"
#include "concate/parallel.hpp"

namespace concate {

namespace {

bool selection_design(Design d) { return d == Design::kC || d == Design::kD; }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool arms_usable(const SimulatedPanel& p) {
  const double treated = p.treatment.sum();
  const double control = static_cast<double>(p.treatment.size()) - treated;
  return treated >= 2.0 && control >= 2.0;
}

std::string unit_label(std::size_t i) {
  std::ostringstream s;
  s << 'u' << i + 1;
  return s.str();
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632BE59BD9B4E019ull));
}

void DgpSpec::validate() const {
  if (n < 2) throw ValidationError("simulation needs at least two firms");
  if (periods < 1) throw ValidationError("simulation needs at least one period");
  if (!std::isfinite(delta)) throw ValidationError("treatment effect must be finite");
  if (!(treat_prob > 0.0 && treat_prob < 1.0)) {
    throw ValidationError("treatment probability must lie in (0,1)");
  }
  if (!(std::abs(ar_coefficient) < 1.0)) {
    throw ValidationError("AR coefficient must lie in (-1, 1)");
  }
  if (!(selection_noise_sd >= 0.0)) throw ValidationError("selection noise sd must be >= 0");
  if (!(outlier_prob >= 0.0 && outlier_prob <= 0.5)) {
    throw ValidationError("outlier probability must lie in [0, 0.5]");
  }
  if (!(chi2_df > 0.0)) throw ValidationError("chi-square degrees of freedom must be positive");
  if (!(uniform_half_width > 0.0)) throw ValidationError("uniform half width must be positive");
}

double draw_baseline(const DgpSpec& spec, Rng& rng) {
  switch (spec.design) {
    case Design::kB:
      return std::student_t_distribution<double>(3.0)(rng) / std::sqrt(3.0);
    case Design::kE: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u < spec.outlier_prob) return -spec.outlier_value;
      if (u < 2.0 * spec.outlier_prob) return spec.outlier_value;
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    case Design::kF:
      return std::chi_squared_distribution<double>(spec.chi2_df)(rng);
    case Design::kG:
      return std::uniform_real_distribution<double>(-spec.uniform_half_width,
                                                    spec.uniform_half_width)(rng);
    default:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
  }
}

SimulatedPanel generate(const DgpSpec& spec, Rng& rng) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto t_max = static_cast<Eigen::Index>(spec.periods);
  SimulatedPanel p;
  p.baseline.resize(n, t_max);
  p.treatment.resize(n, t_max);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double rho = spec.ar_coefficient;
  const double tilt = spec.design == Design::kC ? -spec.selection_slope : spec.selection_slope;

  for (Eigen::Index i = 0; i < n; ++i) {
    double prev = 0.0;
    for (Eigen::Index t = 0; t < t_max; ++t) {
      double y;
      double prob = spec.treat_prob;
      if (selection_design(spec.design)) {
        if (t == 0 && spec.ar_init == ArInit::kStationary) {
          y = normal(rng) / std::sqrt(1.0 - rho * rho);
        } else {
          y = rho * prev + normal(rng);
        }
        prev = y;
        prob = logistic(tilt * y + spec.selection_noise_sd * normal(rng));
      } else {
        y = draw_baseline(spec, rng);
      }
      p.baseline(i, t) = y;
      p.treatment(i, t) = unif(rng) < prob ? 1.0 : 0.0;
    }
  }
  p.observed = p.baseline + spec.delta * p.treatment;
  return p;
}

SimulatedPanel generate(const DgpSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return generate(spec, rng);
}

OracleSupport oracle_support(const DgpSpec& spec, std::uint64_t seed, std::size_t draws) {
  spec.validate();
  if (spec.design == Design::kG) return {-spec.uniform_half_width, spec.uniform_half_width};
  if (draws == 0) throw ValidationError("oracle sample size must be positive");
  DgpSpec big = spec;
  big.n = std::max<std::size_t>(2, draws / spec.periods);
  const auto p = generate(big, seed);
  const double lo = spec.design == Design::kF ? 0.0 : p.baseline.minCoeff();
  return {lo, p.baseline.maxCoeff() + spec.delta};
}

std::uint64_t replication_seed(std::uint64_t base_seed, Design design, std::size_t periods,
                               std::size_t r) {
  const std::uint64_t cell =
      stable_hash(stable_hash(base_seed, static_cast<std::uint64_t>(design)), periods);
  return stable_hash(cell, r);
}

SimulatedPanel draw_replication(const DgpSpec& spec, std::uint64_t seed,
                                std::size_t* redraws) {
  std::size_t attempts = 0;
  for (;;) {
    const std::uint64_t s = attempts == 0 ? seed : stable_hash(seed, attempts);
    auto p = generate(spec, s);
    if (arms_usable(p)) {
      if (redraws) *redraws = attempts;
      return p;
    }
    if (++attempts > 10000) {
      throw DegenerateError("simulation: could not draw two observations in each arm");
    }
  }
}

CellResult run_cell(const DgpSpec& spec, const CellOptions& options) {
  spec.validate();
  if (options.replications < 1) throw ValidationError("replications must be at least 1");
  check_alpha(options.bands.alpha, "alpha");

  CellResult out;
  out.replications.resize(options.replications);
  parallel_for(options.replications, options.threads, [&](std::size_t r) {
    Replication& rep = out.replications[r];
    const auto seed = replication_seed(options.base_seed, spec.design, spec.periods, r);
    const auto panel = draw_replication(spec, seed, &rep.redraws);
    rep.bands = simulation_bands(panel.baseline, panel.observed, panel.treatment, spec.design,
                                 options.bands);
    rep.hit_hybrid = rep.bands.hybrid.contains(spec.delta);
    rep.hit_manski = rep.bands.manski.contains(spec.delta);
  });

  for (auto* cell : {&out.hybrid, &out.manski}) {
    cell->design = spec.design;
    cell->n_total = spec.total();
    cell->replications = options.replications;
    cell->seed = options.base_seed;
  }
  out.hybrid.method = "hybrid";
  out.manski.method = "manski";
  for (const auto& rep : out.replications) {
    out.hybrid.hits += rep.hit_hybrid ? 1 : 0;
    out.manski.hits += rep.hit_manski ? 1 : 0;
    out.hybrid.redraws += rep.redraws;
  }
  out.manski.redraws = out.hybrid.redraws;
  if (options.compute_oracle) {
    out.oracle = oracle_support(spec, stable_hash(options.base_seed, 0xB16ull),
                                options.oracle_draws);
  }
  return out;
}

std::vector<CoverageCell> coverage_table(const std::vector<Design>& designs,
                                         const std::vector<std::size_t>& periods,
                                         const DgpSpec& base, const CellOptions& options) {
  std::vector<CoverageCell> cells;
  for (Design d : designs) {
    for (std::size_t t : periods) {
      DgpSpec spec = base;
      spec.design = d;
      spec.periods = t;
      auto res = run_cell(spec, options);
      cells.push_back(res.hybrid);
      cells.push_back(res.manski);
    }
  }
  return cells;
}

void write_coverage_csv(std::ostream& out, const std::vector<CoverageCell>& cells) {
  out << "dgp,N,method,coverage_pct,B,seed,redraws\n";
  for (const auto& c : cells) {
    out << design_letter(c.design) << ',' << c.n_total << ',' << c.method << ','
        << format_number(100.0 * c.coverage(), 10) << ',' << c.replications << ',' << c.seed
        << ',' << c.redraws << '\n';
  }
}

PanelDataset make_tipping_panel(const ScanPanelSpec& spec, std::uint64_t seed) {
  if (spec.units < 1 || spec.periods < 1) throw ValidationError("panel needs units and periods");
  if (!(spec.signal_max > 0.0 && spec.signal_max <= 100.0)) {
    throw ValidationError("signal_max must lie in (0, 100]");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> signal(0.0, spec.signal_max);
  std::uniform_real_distribution<double> low(0.0, 10.0);
  std::uniform_real_distribution<double> high(spec.jump_low, spec.jump_high);
  std::vector<Observation> rows;
  rows.reserve(spec.units * spec.periods);
  for (std::size_t i = 0; i < spec.units; ++i) {
    for (std::size_t t = 0; t < spec.periods; ++t) {
      Observation o;
      o.unit_id = unit_label(i);
      o.time = static_cast<std::int64_t>(t + 1);
      o.signal = signal(rng);
      o.outcome = o.signal >= spec.cut ? high(rng) : low(rng);
      rows.push_back(std::move(o));
    }
  }
  return PanelDataset(std::move(rows));
}

PanelDataset make_null_panel(std::size_t units, std::size_t periods, std::uint64_t seed) {
  if (units < 1 || periods < 1) throw ValidationError("panel needs units and periods");
  Rng rng(seed);
  std::uniform_real_distribution<double> signal(0.0, 100.0);
  std::normal_distribution<double> outcome(0.0, 1.0);
  std::vector<Observation> rows;
  rows.reserve(units * periods);
  for (std::size_t i = 0; i < units; ++i) {
    for (std::size_t t = 0; t < periods; ++t) {
      Observation o;
      o.unit_id = unit_label(i);
      o.time = static_cast<std::int64_t>(t + 1);
      o.signal = signal(rng);
      o.outcome = outcome(rng);
      rows.push_back(std::move(o));
    }
  }
  return PanelDataset(std::move(rows));
}

}  // namespace concate
