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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "concate/errors.hpp"
#include "concate/montecarlo.hpp"

using namespace concate;

namespace {

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(const Eigen::MatrixXd& m) {
  Moments out;
  out.mean = m.mean();
  out.var = (m.array() - out.mean).square().sum() / static_cast<double>(m.size() - 1);
  return out;
}

DgpSpec spec_for(Design d, std::size_t n, std::size_t t = 1) {
  DgpSpec s;
  s.design = d;
  s.n = n;
  s.periods = t;
  return s;
}

// Closed-form hit indicators for one replication panel.
std::pair<bool, bool> oracle_hits(const SimulatedPanel& p, Design d, double delta) {
  const double n = static_cast<double>(p.observed.size());
  const double n1 = p.treatment.sum(), n0 = n - n1;
  const double m1 = (p.observed.array() * p.treatment.array()).sum() / n1;
  const double m0 = (p.observed.array() * (1.0 - p.treatment.array())).sum() / n0;
  const double p1 = n1 / n, p0 = n0 / n;
  double a = p.baseline.minCoeff(), b = p.baseline.maxCoeff();
  if (d == Design::kF) a = 0.0;
  if (d == Design::kG) a = -5.0, b = 5.0;
  const double lo = m1 * p1 + a * p0 - b * p1 - m0 * p0;
  const double hi = m1 * p1 + b * p0 - a * p1 - m0 * p0;
  const bool manski = lo <= delta && delta <= hi;
  if (d == Design::kG) return {manski, manski};
  const double mean = p.observed.mean();
  const double pooled = (p.observed.array() - mean).square().sum() / (n - 1);
  const double mv = pooled * (p1 * p1 / n1 + p0 * p0 / n0);
  const double sl = std::sqrt(mv + p1 * p0 / n * std::pow((m1 - b) - (a - m0), 2));
  const double su = std::sqrt(mv + p1 * p0 / n * std::pow((m1 - a) - (b - m0), 2));
  const double eps = std::sqrt(std::log((d == Design::kF ? 1.0 : 2.0) / 0.05) / (2 * n));
  const double z = 2.2414027276049453751;
  const bool hybrid = lo - eps - z * sl <= delta && delta <= hi + eps + z * su;
  return {hybrid, manski};
}

}  // namespace

TEST_CASE("seed derivation") {
  // First output of the reference splitmix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(stable_hash(1, 2) != stable_hash(2, 1));
  CHECK(replication_seed(2024, Design::kA, 1, 0) != replication_seed(2024, Design::kB, 1, 0));
  CHECK(replication_seed(2024, Design::kA, 1, 0) != replication_seed(2024, Design::kA, 5, 0));
  CHECK(replication_seed(2024, Design::kA, 1, 0) != replication_seed(2024, Design::kA, 1, 1));
  CHECK(replication_seed(2024, Design::kA, 1, 0) != replication_seed(2025, Design::kA, 1, 0));
  CHECK(replication_seed(7, Design::kC, 10, 3) == replication_seed(7, Design::kC, 10, 3));
}

TEST_CASE("panel shape and observation rule") {
  for (Design d : kAllDesigns) {
    const auto p = generate(spec_for(d, 30, 4), 99);
    CHECK(p.baseline.rows() == 30);
    CHECK(p.baseline.cols() == 4);
    CHECK((p.treatment.array() * (1.0 - p.treatment.array())).abs().maxCoeff() == 0.0);
    CHECK(p.observed == Eigen::MatrixXd(p.baseline + 4.0 * p.treatment));
    const auto q = generate(spec_for(d, 30, 4), 99);
    CHECK(q.observed == p.observed);
  }
}

TEST_CASE("baseline laws") {
  const auto a = moments(generate(spec_for(Design::kA, 200000), 1).baseline);
  CHECK(std::fabs(a.mean) < 0.01);
  CHECK(a.var == doctest::Approx(1.0).epsilon(0.02));
  const auto b = moments(generate(spec_for(Design::kB, 200000), 2).baseline);
  CHECK(std::fabs(b.mean) < 0.02);
  CHECK(b.var == doctest::Approx(1.0).epsilon(0.1));
  const auto fp = generate(spec_for(Design::kF, 200000), 3);
  const auto f = moments(fp.baseline);
  CHECK(fp.baseline.minCoeff() >= 0.0);
  CHECK(f.mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(f.var == doctest::Approx(6.0).epsilon(0.03));
  const auto gp = generate(spec_for(Design::kG, 200000), 4);
  CHECK(gp.baseline.minCoeff() >= -5.0);
  CHECK(gp.baseline.maxCoeff() <= 5.0);
  CHECK(moments(gp.baseline).var == doctest::Approx(100.0 / 12.0).epsilon(0.02));

  // Each outlier value occurs with probability 0.002: about 2000 in 1e6 draws.
  const auto e = generate(spec_for(Design::kE, 1000000), 5).baseline;
  const auto hi = (e.array() == 10.0).count();
  const auto lo = (e.array() == -10.0).count();
  CHECK(std::fabs(static_cast<double>(hi) - 2000.0) < 4 * std::sqrt(2000.0));
  CHECK(std::fabs(static_cast<double>(lo) - 2000.0) < 4 * std::sqrt(2000.0));
}

TEST_CASE("selection designs tilt the treated baseline") {
  for (Design d : {Design::kC, Design::kD}) {
    const auto p = generate(spec_for(d, 20000, 5), 6);
    const double n1 = p.treatment.sum();
    const double m1 = (p.baseline.array() * p.treatment.array()).sum() / n1;
    const double m0 = (p.baseline.array() * (1 - p.treatment.array())).sum() /
                      (static_cast<double>(p.treatment.size()) - n1);
    if (d == Design::kC) {
      CHECK(m1 < -0.05);
      CHECK(m1 < m0);
    } else {
      CHECK(m1 > 0.05);
      CHECK(m1 > m0);
    }
  }
}

TEST_CASE("AR(1) baseline dynamics") {
  auto s = spec_for(Design::kC, 4000, 30);
  s.ar_init = ArInit::kStationary;
  const auto p = generate(s, 8).baseline;
  const Eigen::MatrixXd x = p.leftCols(29), y = p.rightCols(29);
  const double mx = x.mean(), my = y.mean();
  const double cov = ((x.array() - mx) * (y.array() - my)).sum();
  const double r = cov / std::sqrt((x.array() - mx).square().sum() * (y.array() - my).square().sum());
  CHECK(r == doctest::Approx(0.4).epsilon(0.05));
  CHECK(moments(p.col(0)).var == doctest::Approx(1.0 / 0.84).epsilon(0.06));

  s.ar_init = ArInit::kZero;
  const auto z = generate(s, 9).baseline;
  CHECK(moments(z.col(0)).var == doctest::Approx(1.0).epsilon(0.06));
  CHECK(moments(z.col(29)).var == doctest::Approx(1.0 / 0.84).epsilon(0.06));
}

TEST_CASE("cells are deterministic across thread counts") {
  for (Design d : {Design::kA, Design::kD, Design::kG}) {
    CellOptions one;
    one.replications = 300;
    CellOptions many = one;
    many.threads = 8;
    const auto a = run_cell(spec_for(d, 50, 5), one);
    const auto b = run_cell(spec_for(d, 50, 5), many);
    CHECK(a.hybrid.hits == b.hybrid.hits);
    CHECK(a.manski.hits == b.manski.hits);
    for (std::size_t r = 0; r < a.replications.size(); ++r) {
      CHECK(a.replications[r].bands.hybrid.lower == b.replications[r].bands.hybrid.lower);
      CHECK(a.replications[r].bands.manski.upper == b.replications[r].bands.manski.upper);
    }
  }
}

TEST_CASE("replication hits match a closed-form oracle") {
  for (Design d : kAllDesigns) {
    for (std::size_t t : {1u, 5u}) {
      const auto spec = spec_for(d, 50, t);
      CellOptions opt;
      opt.replications = 100;
      opt.base_seed = 31;
      const auto cell = run_cell(spec, opt);
      std::size_t hh = 0, mh = 0;
      for (std::size_t r = 0; r < 100; ++r) {
        const auto panel = draw_replication(spec, replication_seed(31, d, t, r));
        const auto [h, m] = oracle_hits(panel, d, 4.0);
        CHECK(cell.replications[r].hit_hybrid == h);
        CHECK(cell.replications[r].hit_manski == m);
        hh += h;
        mh += m;
        CHECK(cell.replications[r].bands.hybrid.contains(cell.replications[r].bands.manski));
        if (d == Design::kG) {
          CHECK(cell.replications[r].bands.hybrid.lower == cell.replications[r].bands.manski.lower);
          CHECK(cell.replications[r].bands.hybrid.upper == cell.replications[r].bands.manski.upper);
        }
      }
      CHECK(cell.hybrid.hits == hh);
      CHECK(cell.manski.hits == mh);
      CHECK(cell.hybrid.hits >= cell.manski.hits);
    }
  }
}

TEST_CASE("single replication coverage is 0 or 1") {
  CellOptions opt;
  opt.replications = 1;
  for (Design d : kAllDesigns) {
    const auto c = run_cell(spec_for(d, 50), opt);
    CHECK((c.hybrid.coverage() == 0.0 || c.hybrid.coverage() == 1.0));
    CHECK((c.manski.coverage() == 0.0 || c.manski.coverage() == 1.0));
  }
  opt.replications = 0;
  CHECK_THROWS_AS(run_cell(spec_for(Design::kA, 50), opt), ValidationError);
}

TEST_CASE("redraws when an arm is too small") {
  const auto spec = spec_for(Design::kA, 4);
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t k = 0;
    const auto p = draw_replication(spec, seed, &k);
    CHECK(p.treatment.sum() == 2.0);
    const auto direct = generate(spec, k == 0 ? seed : stable_hash(seed, k));
    CHECK(direct.observed == p.observed);
    total += k;
  }
  CHECK(total > 0);
  CHECK_THROWS_AS(draw_replication(spec_for(Design::kA, 2), 1), DegenerateError);
}

TEST_CASE("oracle support is reported, not used") {
  CHECK(oracle_support(spec_for(Design::kG, 50), 1).lower == -5.0);
  const auto f = oracle_support(spec_for(Design::kF, 50), 1, 10000);
  CHECK(f.lower == 0.0);
  const auto a = oracle_support(spec_for(Design::kA, 50), 1, 100000);
  CHECK(a.lower < -3.0);
  CHECK(a.upper > 7.0);
  CellOptions opt;
  opt.replications = 20;
  const auto plain = run_cell(spec_for(Design::kA, 50), opt);
  opt.compute_oracle = true;
  opt.oracle_draws = 1000;
  const auto with = run_cell(spec_for(Design::kA, 50), opt);
  CHECK(with.oracle.has_value());
  CHECK(with.hybrid.hits == plain.hybrid.hits);
}

TEST_CASE("coverage table layout and CSV") {
  CellOptions opt;
  opt.replications = 10;
  const auto cells = coverage_table({Design::kB, Design::kF}, {1, 2}, {}, opt);
  REQUIRE(cells.size() == 8);
  CHECK(cells[0].design == Design::kB);
  CHECK(cells[0].method == "hybrid");
  CHECK(cells[1].method == "manski");
  CHECK(cells[2].n_total == 100);
  CHECK(cells[4].design == Design::kF);
  std::ostringstream out;
  write_coverage_csv(out, cells);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "dgp,N,method,coverage_pct,B,seed,redraws");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows == 8);
}

TEST_CASE("specification validation") {
  auto s = spec_for(Design::kA, 1);
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = spec_for(Design::kA, 10);
  s.treat_prob = 1.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = spec_for(Design::kC, 10);
  s.ar_coefficient = 1.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}
