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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "concate/concentration.hpp"
#include "concate/errors.hpp"
#include "concate/estimators.hpp"
#include "concate/format.hpp"
#include "concate/montecarlo.hpp"
#include "concate/panel.hpp"
#include "concate/report.hpp"
#include "concate/sequential.hpp"

namespace concate::cli {

namespace {

using nlohmann::json;

struct DataFlags {
  std::string path;
  std::string unit_col = "unit_id";
  std::string time_col = "time";
  std::string outcome_col = "outcome";
  std::string signal_col = "signal";
  std::string group_col;
  std::string group;
};

struct PaddingFlags {
  double c_alpha = 0.0;
  std::optional<double> truncation_lower;
  std::optional<double> truncation_upper;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double gamma = 0.5;
  std::optional<double> long_run_variance;
  std::string bernstein_selection = "regime";
  std::vector<double> sub_exponential_norm;
  double c_abs = 1.0;
  std::string naive_variance = "welch";
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.path, "Panel CSV (unit, time, outcome, signal columns)")
      ->required();
  cmd->add_option("--unit-col", f.unit_col, "Unit identifier column")->capture_default_str();
  cmd->add_option("--time-col", f.time_col, "Integer time column")->capture_default_str();
  cmd->add_option("--outcome-col", f.outcome_col, "Outcome column")->capture_default_str();
  cmd->add_option("--signal-col", f.signal_col, "Signal column, percent in [0,100]")
      ->capture_default_str();
  cmd->add_option("--group-col", f.group_col, "Optional grouping column");
  cmd->add_option("--group", f.group, "Keep only rows of this group (needs --group-col)");
}

void add_padding_flags(CLI::App* cmd, PaddingFlags& f) {
  cmd->add_option("--c-alpha", f.c_alpha, "Mixing constant, sum of alpha(k)^(1/2)")
      ->capture_default_str();
  cmd->add_option("--truncation-lower", f.truncation_lower, "Known lower outcome limit");
  cmd->add_option("--truncation-upper", f.truncation_upper,
                  "Known upper outcome limit (needs --truncation-lower)");
  cmd->add_option("--bernstein-c1", f.c1)->capture_default_str();
  cmd->add_option("--bernstein-c2", f.c2)->capture_default_str();
  cmd->add_option("--bernstein-c3", f.c3)->capture_default_str();
  cmd->add_option("--bernstein-c4", f.c4)->capture_default_str();
  cmd->add_option("--bernstein-gamma", f.gamma)->capture_default_str();
  cmd->add_option("--bernstein-v", f.long_run_variance,
                  "Long-run variance; estimated per arm when omitted");
  cmd->add_option("--bernstein-selection", f.bernstein_selection,
                  "i.i.d. mean padding: regime (max of the two terms) or min")
      ->check(CLI::IsMember({"regime", "min"}))
      ->capture_default_str();
  cmd->add_option("--sub-exp-norm", f.sub_exponential_norm,
                  "Sub-exponential norm bounds M for control and treated")
      ->expected(2)
      ->delimiter(',');
  cmd->add_option("--c-abs", f.c_abs, "Bernstein absolute constant")->capture_default_str();
  cmd->add_option("--naive-variance", f.naive_variance, "welch or single-sum")
      ->check(CLI::IsMember({"welch", "single-sum"}))
      ->capture_default_str();
}

json padding_config_json(const PaddingFlags& f) {
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"c_alpha", f.c_alpha},
          {"truncation_lower", opt(f.truncation_lower)},
          {"truncation_upper", opt(f.truncation_upper)},
          {"bernstein", {{"c1", f.c1}, {"c2", f.c2}, {"c3", f.c3}, {"c4", f.c4},
                         {"gamma", f.gamma}, {"v", opt(f.long_run_variance)},
                         {"selection", f.bernstein_selection}}},
          {"sub_exp_norm", f.sub_exponential_norm},
          {"c_abs", f.c_abs},
          {"naive_variance", f.naive_variance}};
}

json data_config_json(const DataFlags& f) {
  return {{"data", f.path},       {"unit_col", f.unit_col},
          {"time_col", f.time_col}, {"outcome_col", f.outcome_col},
          {"signal_col", f.signal_col}, {"group_col", f.group_col},
          {"group", f.group}};
}

BandOptions band_options(const PaddingFlags& f) {
  BandOptions o;
  o.padding.c_alpha = f.c_alpha;
  o.padding.c_abs = f.c_abs;
  o.padding.bernstein_weak.c1 = f.c1;
  o.padding.bernstein_weak.c2 = f.c2;
  o.padding.bernstein_weak.c3 = f.c3;
  o.padding.bernstein_weak.c4 = f.c4;
  o.padding.bernstein_weak.gamma = f.gamma;
  o.padding.bernstein_weak.long_run_variance = f.long_run_variance;
  o.padding.bernstein_selection = f.bernstein_selection == "min"
                                      ? BernsteinSelection::kMinimum
                                      : BernsteinSelection::kRegimeConsistent;
  if (!f.sub_exponential_norm.empty()) {
    o.padding.sub_exponential_norm =
        std::array<double, 2>{f.sub_exponential_norm[0], f.sub_exponential_norm[1]};
  }
  if (f.truncation_upper && !f.truncation_lower) {
    throw ValidationError("--truncation-upper requires --truncation-lower");
  }
  if (f.truncation_lower) {
    o.padding.truncation = f.truncation_upper
                               ? Truncation::both_known(*f.truncation_lower, *f.truncation_upper)
                               : Truncation::lower_known(*f.truncation_lower);
  }
  o.naive_variance = f.naive_variance == "single-sum" ? VarianceMode::kSingleSum : VarianceMode::kWelch;
  // alpha_u is replaced per look; validate everything else now.
  PaddingConfig probe = o.padding;
  probe.alpha_u = 0.5;
  probe.validate();
  return o;
}

PanelDataset load_panel(const DataFlags& f) {
  ColumnSchema schema;
  schema.unit_col = f.unit_col;
  schema.time_col = f.time_col;
  schema.outcome_col = f.outcome_col;
  schema.signal_col = f.signal_col;
  if (!f.group_col.empty()) schema.group_col = f.group_col;
  if (!f.group.empty() && f.group_col.empty()) {
    throw ValidationError("--group requires --group-col");
  }
  PanelDataset panel = load_csv(f.path, schema);
  if (!f.group.empty()) panel = panel.filter_group(f.group);
  if (panel.empty()) throw DataError("the panel has no usable observations");
  return panel;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw DataError("failed writing '" + path + "'");
}

json with_metadata(json body, const json& config, std::optional<std::uint64_t> seed) {
  json doc;
  doc["metadata"] = metadata_json(seed, config_hash(config.dump()));
  doc["config"] = config;
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

std::vector<Design> parse_designs(const std::string& spec) {
  if (spec == "all" || spec == "ALL") {
    return std::vector<Design>(kAllDesigns.begin(), kAllDesigns.end());
  }
  std::vector<Design> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_design(item));
  if (out.empty()) throw ValidationError("--dgp: no design given");
  return out;
}

// ---- simulate -------------------------------------------------------------

struct SimulateFlags {
  std::string dgp = "all";
  std::size_t n = 50;
  std::vector<std::size_t> periods{1, 2, 5};
  std::size_t reps = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 2024;
  double delta = 4.0;
  std::string manski_variant = "plugin";
  std::string variance = "pooled";
  std::string ar_init = "zero";
  unsigned threads = 0;
  std::string out;
  std::string json_out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const auto designs = parse_designs(f.dgp);
  if (f.periods.empty()) throw ValidationError("--T: at least one panel length is required");
  DgpSpec base;
  base.n = f.n;
  base.delta = f.delta;
  base.ar_init = f.ar_init == "stationary" ? ArInit::kStationary : ArInit::kZero;
  CellOptions opt;
  opt.replications = f.reps;
  opt.base_seed = f.seed;
  opt.threads = f.threads;
  opt.bands.alpha = f.alpha;
  opt.bands.manski = f.manski_variant == "bonferroni" ? ManskiVariant::kBonferroni
                                                     : ManskiVariant::kPlugin;
  opt.bands.mean_variance =
      f.variance == "per-arm" ? MeanVariance::kPerArm : MeanVariance::kPooled;
  check_alpha(f.alpha, "--alpha");
  base.validate();
  if (f.reps < 1) throw ValidationError("--reps must be at least 1");

  const auto cells = coverage_table(designs, f.periods, base, opt);
  std::ostringstream csv;
  write_coverage_csv(csv, cells);
  if (f.out.empty()) {
    out << csv.str();
  } else {
    write_text(f.out, csv.str());
    out << "wrote " << cells.size() << " coverage cells to " << f.out << '\n';
  }
  if (!f.json_out.empty()) {
    json config = {{"command", "simulate"}, {"dgp", f.dgp}, {"n", f.n}, {"T", f.periods},
                   {"reps", f.reps}, {"alpha", f.alpha}, {"delta", f.delta},
                   {"manski_variant", f.manski_variant}, {"variance", f.variance},
                   {"ar_init", f.ar_init}};
    write_text(f.json_out, with_metadata({{"cells", coverage_json(cells)}}, config, f.seed)
                               .dump(2) + "\n");
  }
  return 0;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsFlags {
  DataFlags data;
  PaddingFlags padding;
  double tau = 50.0;
  std::string method = "hybrid";
  double alpha = 0.05;
  std::string out;
};

int cmd_bounds(const BoundsFlags& f, std::ostream& out) {
  const auto method = parse_band_method(f.method);
  check_alpha(f.alpha, "--alpha");
  const auto options = band_options(f.padding);
  const auto panel = load_panel(f.data);
  const auto assignment = assign_treatment(panel, f.tau);
  const auto stats = group_stats(panel.outcomes(), assignment.indicators);
  const auto result = evaluate_band(stats, method, f.alpha, options);

  out << "threshold   " << format_number(f.tau) << "\n"
      << "N0, N1      " << assignment.n0 << ", " << assignment.n1 << "\n"
      << "method      " << to_string(method) << "\n"
      << "alpha_u     " << format_number(f.alpha) << "\n"
      << "multiplier  " << format_number(result.multiplier, 6) << "\n"
      << "region      [" << format_number(result.region.lower, 6) << ", "
      << format_number(result.region.upper, 6) << "]\n"
      << "band        [" << format_number(result.band.lower, 6) << ", "
      << format_number(result.band.upper, 6) << "]\n"
      << "se          " << format_number(result.se_lower, 6) << " (lower), "
      << format_number(result.se_upper, 6) << " (upper)\n"
      << "excludes 0  " << (result.band.excludes_zero() ? "yes" : "no") << "\n";

  if (!f.out.empty()) {
    json config = {{"command", "bounds"}, {"tau", f.tau}, {"method", f.method},
                   {"alpha", f.alpha}, {"input", data_config_json(f.data)},
                   {"padding", padding_config_json(f.padding)}};
    json body = {{"tau", f.tau}, {"N0", assignment.n0}, {"N1", assignment.n1},
                 {"N", stats.n}, {"result", band_json(result)}};
    write_text(f.out, with_metadata(body, config, std::nullopt).dump(2) + "\n");
  }
  return 0;
}

// ---- scan -----------------------------------------------------------------

struct ScanFlags {
  DataFlags data;
  PaddingFlags padding;
  std::string grid = "5:95:5";
  std::string method = "hybrid";
  double alpha = 0.05;
  std::size_t min_group = 10;
  std::vector<double> spending;
  unsigned threads = 0;
  std::string out;
  std::string json_out;
  std::string svg_out;
};

int cmd_scan(const ScanFlags& f, std::ostream& out) {
  const auto method = parse_band_method(f.method);
  const auto grid = ThresholdGrid::parse(f.grid);
  check_alpha(f.alpha, "--alpha");
  ScanOptions options;
  options.min_group = f.min_group;
  options.threads = f.threads;
  options.band = band_options(f.padding);
  if (!f.spending.empty()) {
    validate_spending(f.spending, f.alpha, grid.count());
    options.spending = f.spending;
  }
  const auto panel = load_panel(f.data);
  const auto result = scan(panel, grid, method, f.alpha, options);

  std::ostringstream csv;
  write_scan_csv(csv, result);
  if (f.out.empty()) {
    out << csv.str();
  } else {
    write_text(f.out, csv.str());
  }
  if (!f.json_out.empty()) {
    json config = {{"command", "scan"}, {"grid", f.grid}, {"method", f.method},
                   {"alpha", f.alpha}, {"min_group", f.min_group}, {"spending", f.spending},
                   {"input", data_config_json(f.data)},
                   {"padding", padding_config_json(f.padding)}};
    write_text(f.json_out, with_metadata(scan_json(result), config, std::nullopt).dump(2) + "\n");
  }
  if (!f.svg_out.empty()) {
    SvgOptions svg;
    svg.title = to_string(method) + " band by threshold";
    write_text(f.svg_out, band_chart_svg(result, svg));
  }
  if (!f.out.empty()) {
    out << "method " << to_string(method) << ", " << result.retained() << " of "
        << result.rows.size() << " thresholds retained, tipping point ";
    if (result.tipping_tau) {
      out << format_number(*result.tipping_tau) << " (" << to_string(result.direction) << ")\n";
    } else {
      out << "none\n";
    }
  }
  return 0;
}

// ---- describe -------------------------------------------------------------

struct DescribeFlags {
  DataFlags data;
  std::string out;
  std::string json_out;
  std::string rolling_out;
  std::size_t window = 0;
  std::string correlation = "pearson";
};

int cmd_describe(const DescribeFlags& f, std::ostream& out) {
  const auto panel = load_panel(f.data);
  const auto outcomes = panel.outcomes();
  const auto signals = panel.signals();
  const std::vector<std::string> names = {f.data.outcome_col, f.data.signal_col};
  const std::vector<SummaryStats> stats = {summary_stats(outcomes), summary_stats(signals)};

  std::ostringstream csv;
  write_summary_csv(csv, names, stats);
  if (f.out.empty()) {
    out << csv.str();
  } else {
    write_text(f.out, csv.str());
  }

  std::size_t window = f.window;
  std::vector<RollingPoint> rolling;
  if (!f.rolling_out.empty()) {
    if (window == 0) window = panel.distinct_times().size() / 2;
    const auto kind =
        f.correlation == "kendall" ? CorrelationKind::kKendall : CorrelationKind::kPearson;
    rolling = rolling_correlation(panel, window, kind);
    std::ostringstream r;
    write_rolling_csv(r, rolling);
    write_text(f.rolling_out, r.str());
  }
  if (!f.json_out.empty()) {
    json config = {{"command", "describe"}, {"input", data_config_json(f.data)},
                   {"window", window}, {"correlation", f.correlation}};
    json body = {{"observations", panel.size()},
                 {"dropped_rows", panel.dropped_rows()},
                 {"summary", summary_json(names, stats)}};
    write_text(f.json_out, with_metadata(body, config, std::nullopt).dump(2) + "\n");
  }
  return 0;
}

// TOML keys may use underscores where the flags use dashes (min_group for
// --min-group).
class SnakeCaseToml : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    for (auto& item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partially identified treatment effects at signal thresholds"};
  app.set_version_flag("--version", version());
  app.set_config("--config", "", "TOML configuration file; explicit flags take precedence");
  app.config_formatter(std::make_shared<SnakeCaseToml>());
  // Inherited by the subcommands: a misspelt key is an error, not a no-op.
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage of the Manski and hybrid bands");
  simulate->add_option("--dgp", sim.dgp, "Design A..G, a comma list, or all")->capture_default_str();
  simulate->add_option("--n", sim.n, "Firms per panel")->capture_default_str();
  simulate->add_option("--T", sim.periods, "Panel lengths")->delimiter(',')->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications per cell")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Overall size")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  simulate->add_option("--delta", sim.delta, "Treatment effect")->capture_default_str();
  simulate->add_option("--manski-variant", sim.manski_variant, "plugin or bonferroni")
      ->check(CLI::IsMember({"plugin", "bonferroni"}))
      ->capture_default_str();
  simulate->add_option("--variance", sim.variance, "Mean variance plug-in: pooled or per-arm")
      ->check(CLI::IsMember({"pooled", "per-arm"}))
      ->capture_default_str();
  simulate->add_option("--ar-init", sim.ar_init, "AR(1) start: zero or stationary")
      ->check(CLI::IsMember({"zero", "stationary"}))
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads, 0 for all cores")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Coverage CSV path (stdout when omitted)");
  simulate->add_option("--json", sim.json_out, "Coverage JSON path");

  BoundsFlags bnd;
  auto* bounds = app.add_subcommand("bounds", "Region and band at one threshold");
  add_data_flags(bounds, bnd.data);
  add_padding_flags(bounds, bnd.padding);
  bounds->add_option("--tau", bnd.tau, "Threshold in (0,100)")->capture_default_str();
  bounds->add_option("--method", bnd.method,
                     "naive, manski-max, manski-q05, manski-q10, iid, mixing, hybrid")
      ->capture_default_str();
  bounds->add_option("--alpha", bnd.alpha, "Size of the single look")->capture_default_str();
  bounds->add_option("--out", bnd.out, "JSON report path");

  ScanFlags scn;
  auto* scan_cmd = app.add_subcommand("scan", "Bands over a threshold grid and the tipping point");
  add_data_flags(scan_cmd, scn.data);
  add_padding_flags(scan_cmd, scn.padding);
  scan_cmd->add_option("--grid", scn.grid, "start:stop:step or a comma list")->capture_default_str();
  scan_cmd->add_option("--method", scn.method, "Band method")->capture_default_str();
  scan_cmd->add_option("--alpha", scn.alpha, "Family-wise size")->capture_default_str();
  scan_cmd->add_option("--min-group", scn.min_group, "Smallest admissible arm")->capture_default_str();
  scan_cmd->add_option("--spending", scn.spending, "Per-look sizes instead of equal spending")
      ->delimiter(',');
  scan_cmd->add_option("--threads", scn.threads, "Worker threads, 0 for all cores")
      ->capture_default_str();
  scan_cmd->add_option("--out", scn.out, "Per-threshold CSV path (stdout when omitted)");
  scan_cmd->add_option("--json", scn.json_out, "Scan summary JSON path");
  scan_cmd->add_option("--svg", scn.svg_out, "Band chart SVG path");

  DescribeFlags dsc;
  auto* describe = app.add_subcommand("describe", "Descriptive statistics and rolling correlation");
  add_data_flags(describe, dsc.data);
  describe->add_option("--out", dsc.out, "Summary CSV path (stdout when omitted)");
  describe->add_option("--json", dsc.json_out, "Summary JSON path");
  describe->add_option("--rolling-out", dsc.rolling_out, "Rolling correlation CSV path");
  describe->add_option("--window", dsc.window, "Rolling window in periods, default half of T");
  describe->add_option("--correlation", dsc.correlation, "pearson or kendall")
      ->check(CLI::IsMember({"pearson", "kendall"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*bounds) return cmd_bounds(bnd, out);
    if (*scan_cmd) return cmd_scan(scn, out);
    if (*describe) return cmd_describe(dsc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return static_cast<int>(ExitCode::kValidation);
}

}  // namespace concate::cli
