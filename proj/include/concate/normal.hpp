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

#ifndef CONCATE_NORMAL_HPP_
#define CONCATE_NORMAL_HPP_

namespace concate {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (Wichura's AS 241, PPND16). Absolute error is
// below 1e-15 on (1e-300, 1 - 1e-16). Throws ValidationError outside (0,1).
double normal_quantile(double p);

// Two-sided critical value Φ^{-1}(1 - alpha/2).
inline double two_sided_critical(double alpha) {
  return normal_quantile(1.0 - alpha / 2.0);
}

}  // namespace concate

#endif  // CONCATE_NORMAL_HPP_
