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

#ifndef SGP_NUMERIC_HPP_
#define SGP_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "sgp/errors.hpp"

namespace sgp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Interval tolerance and iteration cap shared by every bisection.
inline constexpr double kBisectTol = 1e-12;
inline constexpr int kBisectMaxIter = 200;

namespace num {

// Finds x in [lo, hi] with g(x) = 0 for a nondecreasing g with
// g(lo) <= 0 <= g(hi). Endpoints are returned directly when the sign
// condition already holds there.
template <class G>
double bisect_increasing(G&& g, double lo, double hi, double tol = kBisectTol,
                         int max_iter = kBisectMaxIter) {
  if (g(lo) >= 0.0) return lo;
  if (g(hi) <= 0.0) return hi;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Root of an arbitrary continuous g with a sign change on [lo, hi].
template <class G>
double bisect_sign_change(G&& g, double lo, double hi, double tol = kBisectTol,
                          int max_iter = kBisectMaxIter) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for a maximum of a unimodal f on [lo, hi].
// Returns the argmax; the caller re-evaluates f when it needs the value.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-12,
                  int max_iter = 300) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 < f2 ? x2 : x1;
}

// Pairwise summation; error grows as O(log n) rather than O(n).
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Counter-based seed derivation (splitmix64 finalizer over seed and index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Maps a 64-bit word to a double in the open interval (0, 1).
inline double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Worker cap from SGP_THREADS, defaulting to the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("SGP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, count) on up to `workers` threads. Each index
// is independent, so results depend only on body, not on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(
      std::max<std::size_t>(1, std::min<std::size_t>(workers, count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// x / y with the convention that a zero denominator yields infinity.
inline double safe_ratio(double x, double y) {
  if (y <= 0.0) return kInf;
  return x / y;
}

// p * (1 - F) with 0 * inf treated as zero (an agent who never buys).
inline double pay(double price, double buy_prob) {
  if (buy_prob <= 0.0) return 0.0;
  return price * buy_prob;
}

}  // namespace num
}  // namespace sgp

#endif  // SGP_NUMERIC_HPP_
