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

#ifndef CONCATE_REPORT_HPP_
#define CONCATE_REPORT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "concate/montecarlo.hpp"
#include "concate/panel.hpp"
#include "concate/sequential.hpp"

namespace concate {

const char* version();

// FNV-1a 64, as 16 hex digits.
std::string config_hash(const std::string& canonical);

// {version, seed, config_hash, rng}.
nlohmann::json metadata_json(std::optional<std::uint64_t> seed, const std::string& hash);

nlohmann::json band_json(const BandResult& band);

// tau,N0,N1,lower,upper,band_lower,band_upper,excludes_zero,skipped
void write_scan_csv(std::ostream& out, const ScanResult& scan);
nlohmann::json scan_json(const ScanResult& scan);

nlohmann::json coverage_json(const std::vector<CoverageCell>& cells);

struct SvgOptions {
  int width = 720;
  int height = 420;
  std::string title;
};

// Band envelope against tau with the region midpoints as a polyline, a
// dashed zero line and a marker at the tipping threshold.
std::string band_chart_svg(const ScanResult& scan, const SvgOptions& options = {});

// variable,N,min,mean,median,max,sd,skewness,kurtosis
void write_summary_csv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<SummaryStats>& stats);
nlohmann::json summary_json(const std::vector<std::string>& names,
                            const std::vector<SummaryStats>& stats);

// window_end,n,correlation
void write_rolling_csv(std::ostream& out, const std::vector<RollingPoint>& points);

}  // namespace concate

#endif  // CONCATE_REPORT_HPP_
