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

#include <numeric>
#include <random>

#include "concate/hybrid.hpp"
#include "concate/montecarlo.hpp"
#include "concate/normal.hpp"
#include "concate/sequential.hpp"
#include "test_util.hpp"

using namespace concate;

namespace {

void check_tipping_invariants(const ScanResult& r) {
  bool seen = false;
  for (const auto& row : r.rows) {
    if (row.skipped) {
      CHECK_FALSE(row.result.has_value());
      CHECK(row.reason.rfind("N/A", 0) == 0);
      continue;
    }
    REQUIRE(row.result.has_value());
    if (!seen && row.excludes_zero()) {
      seen = true;
      REQUIRE(r.tipping_tau.has_value());
      CHECK(*r.tipping_tau == row.tau);
      CHECK(r.direction == (row.result->band.lower > 0 ? Direction::kPositive
                                                       : Direction::kNegative));
    }
  }
  if (!seen) {
    CHECK_FALSE(r.tipping_tau.has_value());
    CHECK(r.direction == Direction::kNone);
  }
}

void check_same(const ScanResult& a, const ScanResult& b) {
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.tipping_tau == b.tipping_tau);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].skipped == b.rows[i].skipped);
    CHECK(a.rows[i].reason == b.rows[i].reason);
    if (a.rows[i].result) {
      CHECK(a.rows[i].result->band.lower == b.rows[i].result->band.lower);
      CHECK(a.rows[i].result->band.upper == b.rows[i].result->band.upper);
    }
  }
}

}  // namespace

TEST_CASE("threshold grid parsing") {
  const auto g = ThresholdGrid::standard();
  REQUIRE(g.count() == 19);
  for (std::size_t i = 0; i < 19; ++i) CHECK(g.taus[i] == 5.0 * (i + 1));
  CHECK(ThresholdGrid::parse("10,20,35.5").taus == std::vector<double>{10, 20, 35.5});
  CHECK(ThresholdGrid::parse("5:20:4").taus == std::vector<double>{5, 9, 13, 17});
  CHECK(ThresholdGrid::parse("50").count() == 1);
  for (const char* bad : {"0:50:5", "5:95:0", "50,40", "a:b:c", "5:100:5", "", "5:95", "10,,20",
                          "95:5:5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(ThresholdGrid::parse(bad), ValidationError);
  }
}

TEST_CASE("equal alpha spending") {
  const auto a = spend_alpha(0.05, 19);
  REQUIRE(a.size() == 19);
  double total = 0.0;
  for (double x : a) {
    CHECK(x == doctest::Approx(0.05 / 19).epsilon(1e-12));
    total += x;
  }
  CHECK(total == 0.05);
  CHECK(spend_alpha(0.1, 1) == std::vector<double>{0.1});
  CHECK(two_sided_critical(a[0]) == doctest::Approx(3.0077865564732520632).epsilon(1e-12));
  CHECK_THROWS_AS(spend_alpha(0.05, 0), ValidationError);

  validate_spending(a, 0.05, 19);
  const std::vector<double> over(19, 0.01);
  CHECK_THROWS_AS(validate_spending(over, 0.05, 19), ValidationError);
  CHECK_THROWS_AS(validate_spending(a, 0.05, 18), ValidationError);
  std::vector<double> neg = a;
  neg[3] = -0.001;
  CHECK_THROWS_AS(validate_spending(neg, 0.05, 19), ValidationError);
}

TEST_CASE("band method names") {
  for (auto m : all_band_methods()) CHECK(parse_band_method(to_string(m)) == m);
  CHECK(all_band_methods().size() == 7);
  CHECK_THROWS_AS(parse_band_method("bootstrap"), ValidationError);
}

TEST_CASE("evaluate_band dispatches to the underlying constructions") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = testing::random_stats(rng, 40, 300);
    const double a = 0.01;
    const auto naive = evaluate_band(s, BandMethod::kNaive, a);
    const auto est = naive_estimate(s, a);
    CHECK(naive.region.lower == naive.region.upper);
    CHECK(naive.band.lower == est.ci_lower);
    CHECK(naive.band.upper == est.ci_upper);

    const auto mx = evaluate_band(s, BandMethod::kManskiMax, a);
    const auto p1 = bonferroni_band(s, extrema_support(s), a);
    CHECK(mx.band.lower == p1.band.lower);
    CHECK(mx.band.upper == p1.band.upper);
    const auto q05 = evaluate_band(s, BandMethod::kManskiQ05, a);
    const auto q10 = evaluate_band(s, BandMethod::kManskiQ10, a);
    CHECK(mx.region.contains(q05.region));
    CHECK(q05.region.contains(q10.region));

    PaddingConfig cfg;
    cfg.alpha_u = a;
    CHECK(evaluate_band(s, BandMethod::kIid, a).band.lower == iid_band(s, cfg).band.lower);
    CHECK(evaluate_band(s, BandMethod::kMixing, a).band.upper == mixing_band(s, cfg).band.upper);
    const auto hy = evaluate_band(s, BandMethod::kHybrid, a);
    CHECK(hy.band.lower == hybrid_band(s, a).band.lower);
    CHECK(hy.multiplier == hybrid_multiplier(a));
  }
}

TEST_CASE("scan finds the planted tipping point") {
  const auto panel = make_tipping_panel({}, 2024);
  for (auto method : {BandMethod::kHybrid, BandMethod::kMixing, BandMethod::kIid}) {
    CAPTURE(to_string(method));
    const auto r = scan(panel, ThresholdGrid::standard(), method, 0.05);
    REQUIRE(r.tipping_tau.has_value());
    CHECK(*r.tipping_tau == 55.0);
    CHECK(r.direction == Direction::kPositive);
    CHECK(r.rows.back().tau == 95.0);
    CHECK(r.rows.back().skipped);
    CHECK(r.rows.back().n1 == 0);
    CHECK(r.retained() == 18);
    check_tipping_invariants(r);
  }
}

TEST_CASE("scan row accounting") {
  const auto panel = make_tipping_panel({}, 7);
  const auto r = scan(panel, ThresholdGrid::standard(), BandMethod::kNaive, 0.05);
  std::size_t prev_n1 = panel.size() + 1;
  for (const auto& row : r.rows) {
    CHECK(row.n0 + row.n1 == panel.size());
    CHECK(row.n1 <= prev_n1);
    prev_n1 = row.n1;
    CHECK(row.skipped == (std::min(row.n0, row.n1) < 10));
  }
  // A stricter group floor only adds skipped rows.
  std::vector<bool> prev(r.rows.size(), false);
  for (std::size_t floor : {1u, 10u, 200u, 600u, 1000u}) {
    ScanOptions opt;
    opt.min_group = floor;
    const auto s = scan(panel, ThresholdGrid::standard(), BandMethod::kNaive, 0.05, opt);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      if (prev[i]) CHECK(s.rows[i].skipped);
      prev[i] = s.rows[i].skipped;
    }
  }
}

TEST_CASE("scan uses a supplied spending schedule") {
  const auto panel = make_tipping_panel({}, 3);
  const auto grid = ThresholdGrid::parse("20,40,60");
  ScanOptions opt;
  opt.spending = std::vector<double>{0.01, 0.015, 0.025};
  const auto r = scan(panel, grid, BandMethod::kHybrid, 0.05, opt);
  CHECK(r.rows[0].alpha_u == 0.01);
  CHECK(r.rows[2].result->alpha_u == 0.025);
  opt.spending = std::vector<double>{0.03, 0.03, 0.03};
  CHECK_THROWS_AS(scan(panel, grid, BandMethod::kHybrid, 0.05, opt), ValidationError);
}

TEST_CASE("empty scans raise") {
  const auto panel = make_tipping_panel({}, 3);
  ScanOptions opt;
  opt.min_group = panel.size();
  CHECK_THROWS_AS(scan(panel, ThresholdGrid::standard(), BandMethod::kHybrid, 0.05, opt),
                  EmptyScanError);
  try {
    scan(panel, ThresholdGrid::standard(), BandMethod::kHybrid, 0.05, opt);
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).rfind("N/A", 0) == 0);
  }
  CHECK_THROWS_AS(scan(PanelDataset{}, ThresholdGrid::standard(), BandMethod::kHybrid, 0.05),
                  DataError);
}

TEST_CASE("scan is independent of the thread count") {
  const auto panel = make_tipping_panel({}, 11);
  for (auto method : all_band_methods()) {
    CAPTURE(to_string(method));
    ScanOptions one, many;
    many.threads = 8;
    check_same(scan(panel, ThresholdGrid::standard(), method, 0.05, one),
               scan(panel, ThresholdGrid::standard(), method, 0.05, many));
  }
}

TEST_CASE("tipping invariants on null panels") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto panel = make_null_panel(60, 5, seed);
    for (auto method : all_band_methods()) {
      CAPTURE(seed);
      CAPTURE(to_string(method));
      check_tipping_invariants(scan(panel, ThresholdGrid::standard(), method, 0.05));
    }
  }
}
