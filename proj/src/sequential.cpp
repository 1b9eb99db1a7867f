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

#include "concate/sequential.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "concate/hybrid.hpp"
#include "concate/parallel.hpp"

namespace concate {

namespace {

double parse_double(std::string_view text, std::string_view spec) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ValidationError("grid '" + std::string(spec) + "': cannot parse '" + s + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

BandResult from_delta(BandMethod method, double alpha_u, const DeltaMethodBand& dm,
                      const SupportBounds& support) {
  BandResult r;
  r.method = method;
  r.alpha_u = alpha_u;
  r.region = dm.region;
  r.band = dm.band;
  r.se_lower = dm.se_lower;
  r.se_upper = dm.se_upper;
  r.multiplier = dm.multiplier;
  r.support = support;
  return r;
}

}  // namespace

ThresholdGrid ThresholdGrid::parse(std::string_view spec) {
  ThresholdGrid grid;
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) {
      throw ValidationError("grid '" + std::string(spec) + "': expected start:stop:step");
    }
    const double start = parse_double(parts[0], spec);
    const double stop = parse_double(parts[1], spec);
    const double step = parse_double(parts[2], spec);
    if (!(step > 0.0)) throw ValidationError("grid step must be positive");
    if (stop < start) throw ValidationError("grid stop lies below start");
    const double span = (stop - start) / step;
    const auto whole = static_cast<std::size_t>(std::floor(span + 1e-9));
    for (std::size_t i = 0; i <= whole; ++i) {
      grid.taus.push_back(start + static_cast<double>(i) * step);
    }
  } else {
    for (auto part : split(spec, ',')) grid.taus.push_back(parse_double(part, spec));
  }
  grid.validate();
  return grid;
}

ThresholdGrid ThresholdGrid::standard() { return parse("5:95:5"); }

void ThresholdGrid::validate() const {
  if (taus.empty()) throw ValidationError("threshold grid is empty");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0 && taus[i] < 100.0)) {
      throw ValidationError("threshold " + std::to_string(taus[i]) +
                            " outside the open interval (0, 100)");
    }
    if (i > 0 && !(taus[i] > taus[i - 1])) {
      throw ValidationError("threshold grid must be strictly increasing");
    }
  }
}

std::vector<double> spend_alpha(double alpha, std::size_t looks) {
  check_alpha(alpha, "alpha");
  if (looks == 0) throw ValidationError("alpha spending needs at least one look");
  std::vector<double> out(looks, alpha / static_cast<double>(looks));
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < looks; ++i) used += out[i];
  out.back() = alpha - used;
  return out;
}

void validate_spending(std::span<const double> alpha_u, double alpha, std::size_t looks) {
  check_alpha(alpha, "alpha");
  if (alpha_u.size() != looks) {
    throw ValidationError("spending schedule has " + std::to_string(alpha_u.size()) +
                          " entries for " + std::to_string(looks) + " looks");
  }
  double total = 0.0;
  for (double a : alpha_u) {
    check_alpha(a, "per-look alpha");
    total += a;
  }
  if (total > alpha * (1.0 + 1e-12)) {
    throw ValidationError("spending schedule sums to " + std::to_string(total) +
                          ", above alpha = " + std::to_string(alpha));
  }
}

std::string to_string(BandMethod method) {
  switch (method) {
    case BandMethod::kNaive: return "naive";
    case BandMethod::kManskiMax: return "manski-max";
    case BandMethod::kManskiQ05: return "manski-q05";
    case BandMethod::kManskiQ10: return "manski-q10";
    case BandMethod::kIid: return "iid";
    case BandMethod::kMixing: return "mixing";
    case BandMethod::kHybrid: return "hybrid";
  }
  return "unknown";
}

const std::vector<BandMethod>& all_band_methods() {
  static const std::vector<BandMethod> methods = {
      BandMethod::kNaive, BandMethod::kManskiMax, BandMethod::kManskiQ05,
      BandMethod::kManskiQ10, BandMethod::kIid, BandMethod::kMixing, BandMethod::kHybrid};
  return methods;
}

BandMethod parse_band_method(std::string_view text) {
  for (auto m : all_band_methods()) {
    if (to_string(m) == text) return m;
  }
  throw ValidationError("unknown method '" + std::string(text) +
                        "', expected naive, manski-max, manski-q05, manski-q10, iid, "
                        "mixing or hybrid");
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kPositive: return "positive";
    case Direction::kNegative: return "negative";
    case Direction::kNone: return "none";
  }
  return "none";
}

BandResult evaluate_band(const GroupStats& stats, BandMethod method, double alpha_u,
                         const BandOptions& options) {
  check_alpha(alpha_u, "alpha_u");
  switch (method) {
    case BandMethod::kNaive: {
      const auto est = naive_estimate(stats, alpha_u, options.naive_variance);
      BandResult r;
      r.method = method;
      r.alpha_u = alpha_u;
      r.region = {est.delta_hat, est.delta_hat};
      r.band = {est.ci_lower, est.ci_upper};
      r.se_lower = r.se_upper = est.se;
      r.multiplier = est.multiplier;
      return r;
    }
    case BandMethod::kManskiMax: {
      const auto s = extrema_support(stats);
      return from_delta(method, alpha_u, bonferroni_band(stats, s, alpha_u), s);
    }
    case BandMethod::kManskiQ05:
    case BandMethod::kManskiQ10: {
      const auto s = trimmed_support(stats, method == BandMethod::kManskiQ05 ? 0.05 : 0.10);
      return from_delta(method, alpha_u, bonferroni_band(stats, s, alpha_u), s);
    }
    case BandMethod::kIid:
    case BandMethod::kMixing: {
      PaddingConfig cfg = options.padding;
      cfg.alpha_u = alpha_u;
      const auto fb = method == BandMethod::kIid ? iid_band(stats, cfg) : mixing_band(stats, cfg);
      BandResult r;
      r.method = method;
      r.alpha_u = alpha_u;
      r.region = fb.region;
      r.band = fb.band;
      r.support = fb.padded_support;
      return r;
    }
    case BandMethod::kHybrid: {
      const auto hb = hybrid_band(stats, alpha_u, options.padding.c_alpha,
                                  options.padding.truncation);
      BandResult r;
      r.method = method;
      r.alpha_u = alpha_u;
      r.region = hb.region;
      r.band = hb.band;
      r.se_lower = hb.se_lower;
      r.se_upper = hb.se_upper;
      r.multiplier = hb.multiplier;
      r.support = hb.padded_support;
      return r;
    }
  }
  throw ValidationError("unknown band method");
}

std::size_t ScanResult::retained() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.skipped ? 0 : 1;
  return n;
}

ScanResult scan(const PanelDataset& panel, const ThresholdGrid& grid, BandMethod method,
                double alpha, const ScanOptions& options) {
  grid.validate();
  check_alpha(alpha, "alpha");
  if (options.min_group < 1) throw ValidationError("min_group must be at least 1");
  if (panel.empty()) throw DataError("scan: the panel has no observations");

  std::vector<double> alpha_u;
  if (options.spending) {
    validate_spending(*options.spending, alpha, grid.count());
    alpha_u = *options.spending;
  } else {
    alpha_u = spend_alpha(alpha, grid);
  }

  const auto outcomes = panel.outcomes();
  ScanResult result;
  result.method = method;
  result.alpha = alpha;
  result.min_group = options.min_group;
  result.rows.resize(grid.count());

  parallel_for(grid.count(), options.threads, [&](std::size_t i) {
    ThresholdRow& row = result.rows[i];
    row.tau = grid.taus[i];
    row.alpha_u = alpha_u[i];
    const auto assignment = assign_treatment(panel, row.tau);
    row.n0 = assignment.n0;
    row.n1 = assignment.n1;
    if (std::min(row.n0, row.n1) < options.min_group) {
      row.skipped = true;
      std::ostringstream msg;
      msg << "N/A: min(N0, N1) = " << std::min(row.n0, row.n1) << " below " << options.min_group;
      row.reason = msg.str();
      return;
    }
    try {
      const auto stats = group_stats(outcomes, assignment.indicators);
      row.result = evaluate_band(stats, method, row.alpha_u, options.band);
    } catch (const DegenerateError& e) {
      row.skipped = true;
      row.reason = std::string("N/A: ") + e.what();
    }
  });

  if (result.retained() == 0) {
    throw EmptyScanError("N/A: no threshold leaves both groups with at least " +
                         std::to_string(options.min_group) + " observations");
  }
  for (const auto& row : result.rows) {
    if (row.skipped || !row.excludes_zero()) continue;
    result.tipping_tau = row.tau;
    result.direction = row.result->band.lower > 0.0 ? Direction::kPositive : Direction::kNegative;
    break;
  }
  return result;
}

}  // namespace concate
