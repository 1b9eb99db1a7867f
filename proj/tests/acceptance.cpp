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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "concate/concentration.hpp"
#include "concate/format.hpp"
#include "concate/hybrid.hpp"
#include "concate/montecarlo.hpp"
#include "concate/parallel.hpp"
#include "concate/sequential.hpp"
#include "test_util.hpp"

using namespace concate;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Reference coverage (percent), hybrid then Manski, for N = 50, 100, 250.
const std::map<char, std::array<std::array<double, 2>, 3>> kReference = {
    {'A', {{{85.95, 9.25}, {89.75, 21.40}, {96.05, 49.50}}}},
    {'B', {{{83.05, 36.70}, {93.40, 66.65}, {99.65, 94.90}}}},
    {'C', {{{99.40, 51.10}, {100.0, 84.05}, {100.0, 99.70}}}},
    {'D', {{{100.0, 84.00}, {100.0, 98.35}, {100.0, 100.0}}}},
    {'E', {{{89.10, 27.30}, {93.65, 46.45}, {98.80, 81.80}}}},
    {'F', {{{100.0, 99.85}, {100.0, 100.0}, {100.0, 100.0}}}},
    {'G', {{{100.0, 100.0}, {100.0, 100.0}, {100.0, 100.0}}}},
};

Verdict coverage_table_check() {
  CellOptions opt;
  opt.replications = 2000;
  opt.base_seed = 2024;
  opt.threads = 0;
  const std::vector<std::size_t> periods = {1, 2, 5};
  const auto cells = coverage_table(
      std::vector<Design>(kAllDesigns.begin(), kAllDesigns.end()), periods, {}, opt);
  int ok = 0, total = 0;
  std::ostringstream misses;
  for (const auto& c : cells) {
    const std::size_t col = c.n_total == 50 ? 0 : c.n_total == 100 ? 1 : 2;
    const double ref = kReference.at(design_letter(c.design))[col][c.method == "hybrid" ? 0 : 1];
    const double got = 100.0 * c.coverage();
    const bool hit = ref == 100.0 ? got >= 99.0 : std::fabs(got - ref) <= 3.0;
    std::printf("  %c N=%-3zu %-6s %7.2f  reference %6.2f  %s\n", design_letter(c.design),
                c.n_total, c.method.c_str(), got, ref, hit ? "ok" : "off");
    ++total;
    if (hit) {
      ++ok;
    } else {
      misses << ' ' << design_letter(c.design) << c.n_total << '/' << c.method;
    }
  }
  Verdict v;
  v.pass = ok == total && total == 42;
  v.detail = std::to_string(ok) + "/" + std::to_string(total) +
             " cells within 3pp (>= 99 where the reference is 100)" + misses.str();
  return v;
}

Verdict containment_check() {
  std::mt19937_64 rng(20260101);
  PaddingConfig cfg;
  std::size_t bad = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const auto s = testing::random_stats(rng, 4, 400);
    const auto plug = manski_region(s, extrema_support(s));
    if (!hybrid_band(s, 0.05).band.contains(plug)) ++bad;
    if (!iid_band(s, cfg).band.contains(plug)) ++bad;
    if (!mixing_band(s, cfg).band.contains(plug)) ++bad;
  }
  DgpSpec g;
  g.design = Design::kG;
  std::size_t g_bad = 0;
  for (std::size_t t : {1u, 2u, 5u}) {
    g.periods = t;
    CellOptions opt;
    opt.replications = 500;
    for (const auto& r : run_cell(g, opt).replications) {
      if (r.bands.hybrid.lower != r.bands.manski.lower ||
          r.bands.hybrid.upper != r.bands.manski.upper) {
        ++g_bad;
      }
    }
  }
  Verdict v;
  v.pass = bad == 0 && g_bad == 0;
  v.detail = std::to_string(bad) + " of 30000 bands miss the plug-in region, " +
             std::to_string(g_bad) + " of 1500 design-G hybrid bands differ from Manski";
  return v;
}

Verdict inversion_check() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t checks = 0;
  auto track = [&](double got, double want) {
    worst = std::max(worst, std::fabs(got - want) / want);
    ++checks;
  };
  for (int rep = 0; rep < 1000; ++rep) {
    const double a = std::exp(std::log(1e-4) + u(rng) * std::log(0.5 / 1e-4));
    const auto n = static_cast<std::size_t>(std::exp(std::log(50.0) + u(rng) * std::log(2e4)));
    const double c = 2.0 * u(rng);
    const double m = 0.1 + 20.0 * u(rng);
    const double cabs = 0.2 + 3.0 * u(rng);
    BernsteinWeakConstants k;
    k.c1 = 0.5 + 1.5 * u(rng);
    k.c2 = 0.5 + 1.5 * u(rng);
    k.c3 = 0.5 + 1.5 * u(rng);
    k.c4 = 0.5 + 1.5 * u(rng);
    k.gamma = 0.4 + 0.2 * u(rng);
    const double var = 3.0 * u(rng);

    for (auto sides : {Sides::kTwo, Sides::kOne}) {
      track(dkw_tail(dkw_epsilon(a, n, Sampling::kIid, sides, 12), n, Sampling::kIid, sides),
            a / 6);
      track(dkw_tail(dkw_epsilon(a, n, Sampling::kMixing, sides, 8, c), n, Sampling::kMixing,
                     sides, c),
            a / 4);
    }
    track(dkw_tail(hoeffding_tp(a, n, Sampling::kIid), n, Sampling::kIid, Sides::kTwo), a / 6);
    track(dkw_tail(hoeffding_tp(a, n, Sampling::kMixing, c), n, Sampling::kMixing, Sides::kTwo,
                   c),
          a / 6);
    track(bernstein_iid_tail(bernstein_tmu_iid(a, n, m, cabs), n, m, cabs), a / 6);
    const auto t = bernstein_tmu_mixing(a, n, k, var);
    track(bernstein_weak_terms(t.t1, n, k, var).t1, a / 18);
    track(bernstein_weak_terms(t.t2, n, k, var).t2, a / 18);
    track(bernstein_weak_terms(t.t3, n, k, var).t3, a / 18);
  }
  Verdict v;
  v.pass = worst <= 1e-10;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu inversions over 1000 random tuples, worst relative error %.3g", checks,
                worst);
  v.detail = buf;
  return v;
}

long double fd_se(const GroupStats& s, const SupportBounds& sup, bool upper) {
  using LTheta = Theta<long double>;
  const LTheta theta = s.theta().cast<long double>();
  const auto f = [&](const LTheta& t) {
    return upper ? manski_upper(t, sup) : manski_lower(t, sup);
  };
  LTheta g;
  for (int j = 0; j < 4; ++j) {
    const long double h = 1e-6L * std::max(1.0L, std::fabs(theta(j)));
    LTheta a = theta, b = theta;
    a(j) += h;
    b(j) -= h;
    g(j) = (f(a) - f(b)) / (2 * h);
  }
  const long double n = s.n, p1 = s.treated.share, p0 = s.control.share;
  return std::sqrt(g(0) * g(0) * s.treated.variance / s.treated.n +
                   g(1) * g(1) * s.control.variance / s.control.n +
                   (g(2) - g(3)) * (g(2) - g(3)) * p1 * p0 / n);
}

Verdict gradient_check() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = testing::random_stats(rng, 8, 400);
    const auto sup = extrema_support(s);
    const auto p = bonferroni_band(s, sup, 0.05);
    const auto h = hybrid_band(s, 0.05);
    const double errs[4] = {
        std::fabs(p.se_lower - static_cast<double>(fd_se(s, sup, false))),
        std::fabs(p.se_upper - static_cast<double>(fd_se(s, sup, true))),
        std::fabs(h.se_lower - static_cast<double>(fd_se(s, h.padded_support, false))),
        std::fabs(h.se_upper - static_cast<double>(fd_se(s, h.padded_support, true))),
    };
    const double scale[4] = {p.se_lower, p.se_upper, h.se_lower, h.se_upper};
    for (int j = 0; j < 4; ++j) worst = std::max(worst, errs[j] / std::max(1.0, scale[j]));
  }
  Verdict v;
  v.pass = worst <= 1e-6;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "analytic vs finite-difference SEs on 100 samples, worst error %.3g", worst);
  v.detail = buf;
  return v;
}

Verdict fwer_check() {
  constexpr std::size_t kPanels = 2000;
  const auto grid = ThresholdGrid::standard();
  std::vector<std::uint8_t> rejected(kPanels, 0);
  parallel_for(kPanels, 0, [&](std::size_t i) {
    const auto panel = make_null_panel(100, 10, stable_hash(0x5EED, i));
    const auto r = scan(panel, grid, BandMethod::kHybrid, 0.05);
    rejected[i] = r.tipping_tau.has_value();
  });
  std::size_t hits = 0;
  for (auto x : rejected) hits += x;
  const double rate = static_cast<double>(hits) / kPanels;
  const double limit = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / kPanels);
  Verdict v;
  v.pass = rate <= limit;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "family-wise false detections %zu/%zu = %.4f (limit %.4f), hybrid, 19 looks",
                hits, kPanels, rate, limit);
  v.detail = buf;
  return v;
}

Verdict tipping_check() {
  const auto panel = load_csv(CONCATE_SYNTHETIC_PANEL);
  const auto r = scan(panel, ThresholdGrid::standard(), BandMethod::kHybrid, 0.05);
  bool skips_ok = true;
  std::size_t skipped = 0;
  for (const auto& row : r.rows) {
    const bool small = std::min(row.n0, row.n1) < 10;
    if (small != row.skipped) skips_ok = false;
    if (row.skipped && row.reason.rfind("N/A", 0) != 0) skips_ok = false;
    skipped += row.skipped;
  }
  Verdict v;
  v.pass = skips_ok && r.tipping_tau && *r.tipping_tau == 55.0 &&
           r.direction == Direction::kPositive && skipped > 0;
  v.detail = "tipping point " + (r.tipping_tau ? format_number(*r.tipping_tau) : std::string("none")) +
             ", " + std::to_string(skipped) + " small-group thresholds marked N/A";
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "concate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return concate::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism_check() {
  const auto dir = fs::temp_directory_path() / "concate_acceptance";
  fs::create_directories(dir);
  int failures = 0;
  std::size_t compared = 0;
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  for (const char* threads : {"1", "8"}) {
    const std::string t = threads;
    failures += cli({"simulate", "--dgp", "all", "--T", "1,2,5", "--reps", "200", "--threads", t,
                     "--out", p("sim" + t + ".csv"), "--json", p("sim" + t + ".json")}) != 0;
    failures += cli({"scan", "--data", CONCATE_SYNTHETIC_PANEL, "--method", "mixing",
                     "--threads", t, "--out", p("scan" + t + ".csv"), "--json",
                     p("scan" + t + ".json"), "--svg", p("scan" + t + ".svg")}) != 0;
  }
  for (const char* stem : {"sim", "scan"}) {
    for (const char* ext : {".csv", ".json", ".svg"}) {
      const std::string a = p(std::string(stem) + "1" + ext);
      const std::string b = p(std::string(stem) + "8" + ext);
      if (!fs::exists(a) && !fs::exists(b)) continue;
      ++compared;
      const auto x = slurp(a), y = slurp(b);
      if (x.empty() || x != y) ++failures;
    }
  }
  Verdict v;
  v.pass = failures == 0 && compared == 5;
  v.detail = std::to_string(compared) + " artifacts compared between 1 and 8 threads, " +
             std::to_string(failures) + " mismatches or errors";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"coverage table", coverage_table_check},
      {"band containment", containment_check},
      {"padding inversion", inversion_check},
      {"delta-method gradients", gradient_check},
      {"sequential family-wise error", fwer_check},
      {"synthetic tipping point", tipping_check},
      {"thread-count determinism", determinism_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %zu %s: %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
