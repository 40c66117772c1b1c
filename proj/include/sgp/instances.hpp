// Copyright 2026 The sgp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGP_INSTANCES_HPP_
#define SGP_INSTANCES_HPP_

#include <algorithm>
#include <random>
#include <vector>

#include "sgp/distribution.hpp"

namespace sgp {

// A random regular law drawn from one of the four families.
inline Distribution random_regular_law(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: {
      const double a = 2.0 * u(rng);
      return Distribution::uniform(a, a + 0.1 + 2.0 * u(rng));
    }
    case 1:
      return Distribution::shifted_power(1.0 + 4.0 * u(rng), 0.5 * u(rng));
    case 2:
      return Distribution::complement_power(0.5 + 3.5 * u(rng));
    default: {
      // Convex knots keep the law regular.
      const double s0 = 0.2 + u(rng), s1 = s0 + u(rng), s2 = s1 + u(rng);
      const double v1 = 0.3, v2 = 0.6;
      const double f1 = s0 * v1, f2 = f1 + s1 * (v2 - v1);
      const double scale = 1.0 / (f2 + s2 * 0.4);
      return Distribution::piecewise({{0.0, 0.0}, {v1, f1 * scale}, {v2, f2 * scale}, {1.0, 1.0}});
    }
  }
}

inline ProductDistribution random_regular_laws(std::mt19937_64& rng, std::size_t n) {
  ProductDistribution d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(random_regular_law(rng));
  return d;
}

// Nondecreasing availability weights with w[0] = 0.
inline std::vector<double> random_availability_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) w[k] = std::min(1.0, w[k - 1] + u(rng) * (1.0 - w[k - 1]));
  return w;
}

}  // namespace sgp

#endif  // SGP_INSTANCES_HPP_
