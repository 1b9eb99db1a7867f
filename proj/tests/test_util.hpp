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

#ifndef CONCATE_TESTS_TEST_UTIL_HPP_
#define CONCATE_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "concate/estimators.hpp"

namespace concate::testing {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Sample {
  std::vector<double> y;
  std::vector<std::uint8_t> z;
};

// Random two-arm sample with at least `min_arm` observations per arm. The
// outcome law is drawn from a small family (normal, shifted exponential,
// uniform, heavy tail) so signs and skews vary.
inline Sample random_sample(std::mt19937_64& rng, std::size_t n_min = 8,
                            std::size_t n_max = 400, std::size_t min_arm = 2) {
  std::uniform_int_distribution<std::size_t> size(n_min, n_max);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> family(0, 3);
  const std::size_t n = std::max(size(rng), 2 * min_arm);
  const double p = 0.1 + 0.8 * u(rng);
  const double shift = -5.0 + 10.0 * u(rng);
  const double effect = -3.0 + 6.0 * u(rng);
  const int fam = family(rng);
  Sample s;
  for (;;) {
    s.y.assign(n, 0.0);
    s.z.assign(n, 0);
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s.z[i] = u(rng) < p ? 1 : 0;
      n1 += s.z[i];
      double e;
      switch (fam) {
        case 0: e = std::normal_distribution<double>(0.0, 1.0)(rng); break;
        case 1: e = std::exponential_distribution<double>(1.0)(rng); break;
        case 2: e = -2.0 + 4.0 * u(rng); break;
        default: e = std::student_t_distribution<double>(3.0)(rng); break;
      }
      s.y[i] = shift + e + (s.z[i] ? effect : 0.0);
    }
    if (n1 >= min_arm && n - n1 >= min_arm) return s;
  }
}

inline GroupStats random_stats(std::mt19937_64& rng, std::size_t n_min = 8,
                               std::size_t n_max = 400) {
  const auto s = random_sample(rng, n_min, n_max);
  return group_stats(s.y, s.z);
}

}  // namespace concate::testing

#endif  // CONCATE_TESTS_TEST_UTIL_HPP_
