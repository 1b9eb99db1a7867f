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

#ifndef CONCATE_DESIGN_HPP_
#define CONCATE_DESIGN_HPP_

#include <array>
#include <string>
#include <string_view>

namespace concate {

// Simulation designs:
//   A  i.i.d. N(0,1) baseline
//   B  standardized Student t(3)
//   C  AR(1) with selection on the baseline, positive tilt
//   D  AR(1) with selection on the baseline, negative tilt
//   E  N(0,1) contaminated by rare +-10 outliers
//   F  chi-square(3), support bounded below by 0
//   G  U[-5, 5], support known
enum class Design { kA, kB, kC, kD, kE, kF, kG };

inline constexpr std::array<Design, 7> kAllDesigns = {Design::kA, Design::kB, Design::kC,
                                                      Design::kD, Design::kE, Design::kF,
                                                      Design::kG};

char design_letter(Design d);
// Accepts "A".."G" in either case; throws ValidationError otherwise.
Design parse_design(std::string_view text);
inline std::string to_string(Design d) { return std::string(1, design_letter(d)); }

}  // namespace concate

#endif  // CONCATE_DESIGN_HPP_
