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

#include "concate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "concate/format.hpp"

#ifndef CONCATE_VERSION
#define CONCATE_VERSION "0.0.0"
#endif

namespace concate {

namespace {

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& x) {
  return x ? number_or_null(*x) : nlohmann::json(nullptr);
}

std::string opt_csv(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

const char* version() { return CONCATE_VERSION; }

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json metadata_json(std::optional<std::uint64_t> seed, const std::string& hash) {
  nlohmann::json m;
  m["version"] = version();
  m["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  m["config_hash"] = hash;
  m["rng"] = kRngIdentity;
  return m;
}

nlohmann::json band_json(const BandResult& b) {
  nlohmann::json j;
  j["method"] = to_string(b.method);
  j["alpha_u"] = b.alpha_u;
  j["region"] = {number_or_null(b.region.lower), number_or_null(b.region.upper)};
  j["band"] = {number_or_null(b.band.lower), number_or_null(b.band.upper)};
  j["se_lower"] = number_or_null(b.se_lower);
  j["se_upper"] = number_or_null(b.se_upper);
  j["multiplier"] = number_or_null(b.multiplier);
  j["excludes_zero"] = b.band.excludes_zero();
  if (b.support) {
    j["support"] = {{"control", {b.support->lower[0], b.support->upper[0]}},
                    {"treated", {b.support->lower[1], b.support->upper[1]}}};
  }
  return j;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "tau,N0,N1,lower,upper,band_lower,band_upper,excludes_zero,skipped\n";
  for (const auto& row : scan.rows) {
    out << format_number(row.tau) << ',' << row.n0 << ',' << row.n1 << ',';
    if (row.result) {
      const auto& r = *row.result;
      out << format_number(r.region.lower) << ',' << format_number(r.region.upper) << ','
          << format_number(r.band.lower) << ',' << format_number(r.band.upper) << ','
          << (row.excludes_zero() ? "true" : "false");
    } else {
      out << "NA,NA,NA,NA,NA";
    }
    out << ',' << (row.skipped ? "true" : "false") << '\n';
  }
}

nlohmann::json scan_json(const ScanResult& scan) {
  nlohmann::json j;
  j["method"] = to_string(scan.method);
  j["alpha"] = scan.alpha;
  j["min_group"] = scan.min_group;
  j["looks"] = scan.rows.size();
  j["retained"] = scan.retained();
  j["tipping_tau"] = optional_json(scan.tipping_tau);
  j["direction"] = to_string(scan.direction);
  auto rows = nlohmann::json::array();
  for (const auto& row : scan.rows) {
    nlohmann::json r;
    r["tau"] = row.tau;
    r["N0"] = row.n0;
    r["N1"] = row.n1;
    r["alpha_u"] = row.alpha_u;
    r["skipped"] = row.skipped;
    if (row.skipped) r["reason"] = row.reason;
    if (row.result) r["result"] = band_json(*row.result);
    rows.push_back(std::move(r));
  }
  j["thresholds"] = std::move(rows);
  return j;
}

nlohmann::json coverage_json(const std::vector<CoverageCell>& cells) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cells) {
    arr.push_back({{"dgp", std::string(1, design_letter(c.design))},
                   {"N", c.n_total},
                   {"method", c.method},
                   {"coverage_pct", 100.0 * c.coverage()},
                   {"hits", c.hits},
                   {"B", c.replications},
                   {"seed", c.seed},
                   {"redraws", c.redraws}});
  }
  return arr;
}

std::string band_chart_svg(const ScanResult& scan, const SvgOptions& opt) {
  const double left = 60.0;
  const double right = 20.0;
  const double top = opt.title.empty() ? 20.0 : 40.0;
  const double bottom = 45.0;
  const double plot_w = opt.width - left - right;
  const double plot_h = opt.height - top - bottom;

  double y_lo = 0.0;
  double y_hi = 0.0;
  double x_lo = scan.rows.empty() ? 0.0 : scan.rows.front().tau;
  double x_hi = scan.rows.empty() ? 100.0 : scan.rows.back().tau;
  for (const auto& row : scan.rows) {
    if (!row.result) continue;
    y_lo = std::min(y_lo, row.result->band.lower);
    y_hi = std::max(y_hi, row.result->band.upper);
  }
  if (y_hi - y_lo <= 0.0) y_hi = y_lo + 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;

  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width
    << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height
    << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s << "<text x=\"" << coord(opt.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << svg_escape(opt.title) << "</text>\n";
  }

  // Axes and ticks.
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\""
    << coord(left + plot_w) << "\" y2=\"" << coord(top + plot_h) << "\"/>\n";
  s << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
    << "\" y2=\"" << coord(top + plot_h) << "\"/>\n";
  s << "</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& row : scan.rows) {
    s << "<text x=\"" << coord(sx(row.tau)) << "\" y=\"" << coord(top + plot_h + 14)
      << "\" text-anchor=\"middle\">" << format_number(row.tau, 4) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_lo + (y_hi - y_lo) * k / 4.0;
    s << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(sy(y) + 3)
      << "\" text-anchor=\"end\">" << format_number(y, 3) << "</text>\n";
  }
  s << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(opt.height - 8.0)
    << "\" text-anchor=\"middle\">threshold (%)</text>\n";
  s << "</g>\n";

  if (y_lo < 0.0 && y_hi > 0.0) {
    s << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(sy(0.0)) << "\" x2=\""
      << coord(left + plot_w) << "\" y2=\"" << coord(sy(0.0))
      << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
  }

  // One envelope polygon and midpoint polyline per run of retained rows.
  std::vector<std::vector<const ThresholdRow*>> runs;
  std::vector<const ThresholdRow*> current;
  for (const auto& row : scan.rows) {
    if (row.result) {
      current.push_back(&row);
    } else if (!current.empty()) {
      runs.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) runs.push_back(current);

  for (const auto& run : runs) {
    s << "<polygon class=\"envelope\" fill=\"steelblue\" fill-opacity=\"0.25\" "
      << "stroke=\"steelblue\" points=\"";
    for (const auto* r : run) {
      s << coord(sx(r->tau)) << ',' << coord(sy(r->result->band.upper)) << ' ';
    }
    for (auto it = run.rbegin(); it != run.rend(); ++it) {
      s << coord(sx((*it)->tau)) << ',' << coord(sy((*it)->result->band.lower)) << ' ';
    }
    s << "\"/>\n";
    s << "<polyline class=\"midpoint\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" "
      << "points=\"";
    for (const auto* r : run) {
      s << coord(sx(r->tau)) << ',' << coord(sy(r->result->region.midpoint())) << ' ';
    }
    s << "\"/>\n";
  }

  if (scan.tipping_tau) {
    const double x = sx(*scan.tipping_tau);
    s << "<line class=\"tipping\" x1=\"" << coord(x) << "\" y1=\"" << coord(top) << "\" x2=\""
      << coord(x) << "\" y2=\"" << coord(top + plot_h)
      << "\" stroke=\"firebrick\" stroke-dasharray=\"2,2\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_summary_csv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<SummaryStats>& stats) {
  out << "variable,N,min,mean,median,max,sd,skewness,kurtosis\n";
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    out << csv_field(names[i]) << ',' << s.n << ',' << format_number(s.min) << ','
        << format_number(s.mean) << ',' << format_number(s.median) << ','
        << format_number(s.max) << ',' << opt_csv(s.sd) << ',' << opt_csv(s.skewness) << ','
        << opt_csv(s.kurtosis) << '\n';
  }
}

nlohmann::json summary_json(const std::vector<std::string>& names,
                            const std::vector<SummaryStats>& stats) {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    arr.push_back({{"variable", names[i]},
                   {"N", s.n},
                   {"min", number_or_null(s.min)},
                   {"mean", number_or_null(s.mean)},
                   {"median", number_or_null(s.median)},
                   {"max", number_or_null(s.max)},
                   {"sd", optional_json(s.sd)},
                   {"skewness", optional_json(s.skewness)},
                   {"kurtosis", optional_json(s.kurtosis)}});
  }
  return arr;
}

void write_rolling_csv(std::ostream& out, const std::vector<RollingPoint>& points) {
  out << "window_end,n,correlation\n";
  for (const auto& p : points) {
    out << p.window_end << ',' << p.n << ',' << opt_csv(p.value) << '\n';
  }
}

}  // namespace concate
