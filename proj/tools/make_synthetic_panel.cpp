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

// Writes a synthetic firm-quarter panel in the CSV layout read by `concate`.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "concate/errors.hpp"
#include "concate/format.hpp"
#include "concate/montecarlo.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic panel generator"};
  std::string kind = "tipping";
  concate::ScanPanelSpec spec;
  std::uint64_t seed = 2024;
  std::string out;
  app.add_option("--kind", kind, "tipping or null")
      ->check(CLI::IsMember({"tipping", "null"}))
      ->capture_default_str();
  app.add_option("--units", spec.units)->capture_default_str();
  app.add_option("--periods", spec.periods)->capture_default_str();
  app.add_option("--cut", spec.cut, "Signal level where outcomes jump")->capture_default_str();
  app.add_option("--signal-max", spec.signal_max)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--out", out, "Output CSV")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto panel = kind == "null" ? concate::make_null_panel(spec.units, spec.periods, seed)
                                      : concate::make_tipping_panel(spec, seed);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw concate::DataError("cannot open '" + out + "' for writing");
    f << "unit_id,time,outcome,signal\n";
    for (const auto& o : panel.observations()) {
      f << o.unit_id << ',' << o.time << ',' << concate::format_number(o.outcome, 10) << ','
        << concate::format_number(o.signal, 10) << '\n';
    }
  } catch (const concate::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  }
  return 0;
}
