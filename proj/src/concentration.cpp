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

#include "concate/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "concate/errors.hpp"

namespace concate {

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval around(double centre, double pad) { return {centre - pad, centre + pad}; }

Interval scale(double a, Interval x) {
  return {std::min(a * x.lo, a * x.hi), std::max(a * x.lo, a * x.hi)};
}

Interval product(Interval x, Interval y) {
  const double c[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

void check_count(std::size_t n, const char* what) {
  if (n == 0) throw DegenerateError(std::string(what) + ": sample size must be positive");
}

double mixing_factor(double c_alpha) { return 1.0 + 4.0 * c_alpha; }

// log h(u) for the third weak-dependence Bernstein term, exp(-h(u)) with
// u = N t > 1.
double log_h3(double u, double n, const BernsteinWeakConstants& k) {
  const double lu = std::log(u);
  const double a = k.gamma * (1.0 - k.gamma);
  const double e = std::pow(u, a) / (k.c4 * std::pow(lu, k.gamma));
  return 2.0 * lu - std::log(k.c3 * n) + e;
}

// Minimiser of h on (1, inf). In s = log u the derivative of log h has the
// sign of 2 + E(s) (a - gamma/s), which is increasing on (0, 1/(1-gamma)].
double h3_argmin(const BernsteinWeakConstants& k) {
  const double a = k.gamma * (1.0 - k.gamma);
  auto f = [&](double s) {
    const double e = std::exp(a * s) / (k.c4 * std::pow(s, k.gamma));
    return 2.0 + e * (a - k.gamma / s);
  };
  double lo = 0.0;
  double hi = 1.0 / (1.0 - k.gamma);
  for (int i = 0; i < 400 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

double arm_spread(const ArmStats& arm) {
  if (arm.empty()) return 0.0;
  return std::max(std::abs(arm.max - arm.mean), std::abs(arm.mean - arm.min));
}

FiniteSampleBand both_known_band(const GroupStats& stats, const PaddingConfig& config) {
  const auto& tr = config.truncation;
  const auto prop = bonferroni_band(stats, known_support(tr.lower, tr.upper), config.alpha_u);
  FiniteSampleBand out;
  out.region = manski_region(stats, extrema_support(stats));
  out.band = prop.band;
  out.padded_support = known_support(tr.lower, tr.upper);
  out.alpha_u = config.alpha_u;
  return out;
}

FiniteSampleBand assemble(const GroupStats& stats, const PaddingConfig& config,
                          const Paddings& pads) {
  FiniteSampleBand out;
  out.region = manski_region(stats, extrema_support(stats));
  out.paddings = pads;
  out.alpha_u = config.alpha_u;
  SupportBounds s;
  s.source = SupportSource::kPadded;
  for (int k = 0; k < 2; ++k) {
    const auto& arm = stats.arm(k);
    s.lower[k] = config.truncation.kind == TruncationKind::kLowerKnown
                     ? config.truncation.lower
                     : arm.min - pads.eps[k];
    s.upper[k] = arm.max + pads.eps[k];
  }
  out.padded_support = s;
  out.band = padded_region(stats, s, pads);
  return out;
}

}  // namespace

void Truncation::validate() const {
  if (kind == TruncationKind::kNone) return;
  if (!std::isfinite(lower)) throw ValidationError("truncation: lower limit must be finite");
  if (kind == TruncationKind::kBothKnown && !(std::isfinite(upper) && upper > lower)) {
    throw ValidationError("truncation: upper limit must be finite and exceed the lower");
  }
}

void BernsteinWeakConstants::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0)) {
    throw ValidationError("Bernstein constants C1..C4 must be positive");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("Bernstein gamma must lie in (0,1), got " + std::to_string(gamma));
  }
  if (long_run_variance && !(*long_run_variance >= 0.0)) {
    throw ValidationError("long-run variance must be non-negative");
  }
}

void PaddingConfig::validate() const {
  check_alpha(alpha_u, "alpha_u");
  if (!(c_alpha >= 0.0) || !std::isfinite(c_alpha)) {
    throw ValidationError("C_alpha must be finite and non-negative");
  }
  if (!(c_abs > 0.0)) throw ValidationError("Bernstein constant c must be positive");
  if (sub_exponential_norm) {
    for (double m : *sub_exponential_norm) {
      if (!(m >= 0.0) || !std::isfinite(m)) {
        throw ValidationError("sub-exponential norm bound must be finite and non-negative");
      }
    }
  }
  bernstein_weak.validate();
  truncation.validate();
}

double dkw_epsilon(double alpha_u, std::size_t n_k, Sampling sampling, Sides sides,
                   double budget, double c_alpha) {
  check_alpha(alpha_u, "alpha_u");
  check_count(n_k, "dkw_epsilon");
  if (!(budget > 1.0)) throw ValidationError("DKW budget constant must exceed 1");
  const double b = sides == Sides::kOne ? budget / 2.0 : budget;
  const double log_term = std::log(b / alpha_u);
  const double n = static_cast<double>(n_k);
  if (sampling == Sampling::kIid) return std::sqrt(log_term / (2.0 * n));
  return mixing_factor(c_alpha) * std::sqrt(2.0 * log_term / n);
}

double hoeffding_tp(double alpha_u, std::size_t n, Sampling sampling, double c_alpha) {
  return dkw_epsilon(alpha_u, n, sampling, Sides::kTwo, 12.0, c_alpha);
}

double bernstein_tmu_iid(double alpha_u, std::size_t n_k, double m_k, double c_abs,
                         BernsteinSelection selection) {
  check_alpha(alpha_u, "alpha_u");
  check_count(n_k, "bernstein_tmu_iid");
  if (!(m_k >= 0.0)) throw ValidationError("sub-exponential norm bound must be non-negative");
  if (!(c_abs > 0.0)) throw ValidationError("Bernstein constant c must be positive");
  const double x = std::log(12.0 / alpha_u) / (c_abs * static_cast<double>(n_k));
  const double quadratic = m_k * std::sqrt(x);
  const double linear = m_k * x;
  return selection == BernsteinSelection::kMinimum ? std::min(quadratic, linear)
                                                     : std::max(quadratic, linear);
}

double BernsteinThresholds::value() const { return std::max({t1, t2, t3}); }

BernsteinThresholds bernstein_tmu_mixing(double alpha_u, std::size_t n_k,
                                         const BernsteinWeakConstants& k, double v) {
  check_alpha(alpha_u, "alpha_u");
  check_count(n_k, "bernstein_tmu_mixing");
  k.validate();
  if (!(v >= 0.0)) throw ValidationError("long-run variance must be non-negative");
  const double n = static_cast<double>(n_k);
  const double log_target = std::log(std::log(18.0 / alpha_u));

  BernsteinThresholds t;
  t.t1 = std::pow(k.c1 * std::log(18.0 * n / alpha_u), 1.0 / k.gamma) / n;
  t.t2 = std::sqrt(k.c2 * (1.0 + n * v) * std::log(18.0 / alpha_u)) / n;

  const double u_min = h3_argmin(k);
  if (log_h3(u_min, n, k) >= log_target) {
    t.t3 = u_min / n;
    return t;
  }
  double lo = u_min;
  double hi = std::max(2.0 * u_min, u_min + 1.0);
  int expansions = 0;
  while (log_h3(hi, n, k) < log_target) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 2000 || !std::isfinite(hi)) {
      throw ConfigurationError("Bernstein threshold t3: root not bracketed");
    }
  }
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_h3(mid, n, k) < log_target ? lo : hi) = mid;
  }
  t.t3 = hi / n;
  return t;
}

double dkw_tail(double t, std::size_t n, Sampling sampling, Sides sides, double c_alpha) {
  const double nn = static_cast<double>(n);
  const double mult = sides == Sides::kOne ? 1.0 : 2.0;
  if (sampling == Sampling::kIid) return mult * std::exp(-2.0 * nn * t * t);
  const double f = mixing_factor(c_alpha);
  return mult * std::exp(-nn * t * t / (2.0 * f * f));
}

double bernstein_iid_tail(double t, std::size_t n, double m, double c_abs) {
  const double r = t / m;
  return 2.0 * std::exp(-c_abs * static_cast<double>(n) * std::min(r * r, r));
}

BernsteinWeakTerms bernstein_weak_terms(double t, std::size_t n,
                                        const BernsteinWeakConstants& k, double v) {
  const double nn = static_cast<double>(n);
  const double u = nn * t;
  BernsteinWeakTerms out;
  out.t1 = nn * std::exp(-std::pow(u, k.gamma) / k.c1);
  out.t2 = std::exp(-u * u / (k.c2 * (1.0 + nn * v)));
  out.t3 = u > 1.0 ? std::exp(-std::exp(log_h3(u, nn, k))) : 1.0;
  return out;
}

double long_run_variance(std::span<const double> values, std::optional<std::size_t> lag) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / nn;
  auto autocov = [&](std::size_t h) {
    double s = 0.0;
    for (std::size_t i = 0; i + h < n; ++i) s += (values[i] - mean) * (values[i + h] - mean);
    return s / nn;
  };
  std::size_t l = lag ? *lag : static_cast<std::size_t>(std::ceil(std::cbrt(nn)));
  l = std::min(l, n - 1);
  double lrv = autocov(0);
  for (std::size_t h = 1; h <= l; ++h) {
    const double w = 1.0 - static_cast<double>(h) / static_cast<double>(l + 1);
    lrv += 2.0 * w * autocov(h);
  }
  return std::max(lrv, 0.0);
}

IdentificationRegion padded_region(const GroupStats& stats, const SupportBounds& s,
                                   const Paddings& pads) {
  if (stats.no_overlap()) {
    throw DegenerateError("padded region: one treatment arm is empty, the region is not estimable");
  }
  s.validate();
  const Interval mu1 = around(stats.treated.mean, pads.t_mu[1]);
  const Interval mu0 = around(stats.control.mean, pads.t_mu[0]);
  const Interval p1 = around(stats.treated.share, pads.t_p[1]);
  const Interval p0 = around(stats.control.share, pads.t_p[0]);

  const Interval a = product(mu1, p1);
  const Interval d = product(mu0, p0);
  const double lower = a.lo + scale(s.lower[1], p0).lo - scale(s.upper[0], p1).hi - d.hi;
  const double upper = a.hi + scale(s.upper[1], p0).hi - scale(s.lower[0], p1).lo - d.lo;
  return {lower, upper};
}

void check_truncation(const GroupStats& stats, const Truncation& tr) {
  if (tr.kind == TruncationKind::kNone) return;
  for (int k = 0; k < 2; ++k) {
    const auto& arm = stats.arm(k);
    if (arm.empty()) continue;
    if (arm.min < tr.lower) {
      throw DataError("declared lower limit " + std::to_string(tr.lower) +
                      " exceeds the observed outcome " + std::to_string(arm.min));
    }
    if (tr.kind == TruncationKind::kBothKnown && arm.max > tr.upper) {
      throw DataError("declared upper limit " + std::to_string(tr.upper) +
                      " is below the observed outcome " + std::to_string(arm.max));
    }
  }
}

FiniteSampleBand iid_band(const GroupStats& stats, const PaddingConfig& config) {
  config.validate();
  if (stats.no_overlap()) {
    throw DegenerateError("i.i.d. band: one treatment arm is empty, the region is not estimable");
  }
  check_truncation(stats, config.truncation);
  if (config.truncation.kind == TruncationKind::kBothKnown) return both_known_band(stats, config);

  const bool lower_known = config.truncation.kind == TruncationKind::kLowerKnown;
  Paddings pads;
  const double tp = hoeffding_tp(config.alpha_u, stats.n, Sampling::kIid);
  for (int k = 0; k < 2; ++k) {
    const auto& arm = stats.arm(k);
    pads.eps[k] = dkw_epsilon(config.alpha_u, arm.n, Sampling::kIid,
                              lower_known ? Sides::kOne : Sides::kTwo, 12.0);
    pads.t_p[k] = tp;
    const double m = config.sub_exponential_norm ? (*config.sub_exponential_norm)[k]
                                                 : arm_spread(arm);
    pads.t_mu[k] = bernstein_tmu_iid(config.alpha_u, arm.n, m, config.c_abs,
                                     config.bernstein_selection);
  }
  return assemble(stats, config, pads);
}

FiniteSampleBand mixing_band(const GroupStats& stats, const PaddingConfig& config) {
  config.validate();
  if (stats.no_overlap()) {
    throw DegenerateError("mixing band: one treatment arm is empty, the region is not estimable");
  }
  check_truncation(stats, config.truncation);
  if (config.truncation.kind == TruncationKind::kBothKnown) return both_known_band(stats, config);

  const bool lower_known = config.truncation.kind == TruncationKind::kLowerKnown;
  Paddings pads;
  for (int k = 0; k < 2; ++k) {
    const auto& arm = stats.arm(k);
    pads.t_p[k] = hoeffding_tp(config.alpha_u, arm.n, Sampling::kMixing, config.c_alpha);
    pads.eps[k] = lower_known ? dkw_epsilon(config.alpha_u, arm.n, Sampling::kMixing,
                                            Sides::kOne, 12.0, config.c_alpha)
                              : pads.t_p[k];
    const double v = config.bernstein_weak.long_run_variance
                         ? *config.bernstein_weak.long_run_variance
                         : long_run_variance(arm.values);
    pads.t_mu[k] =
        bernstein_tmu_mixing(config.alpha_u, arm.n, config.bernstein_weak, v).value();
  }
  return assemble(stats, config, pads);
}

}  // namespace concate
