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

#ifndef SGP_REPRO_HPP_
#define SGP_REPRO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sgp/equilibrium.hpp"
#include "sgp/oracle.hpp"
#include "sgp/pricing.hpp"
#include "sgp/revenue.hpp"

namespace sgp::repro {

// Published optimum of the three-agent adaptive availability instance, with
// and without the tie between the two single-buyer histories.
inline constexpr double kAdaptiveFree = 0.4622033133;
inline constexpr double kAdaptiveTied = 0.4621905314;

struct AdaptiveGap {
  AdaptiveOptimum free, tied;
  bool pass = false;
};

inline AdaptiveGap adaptive_gap(int starts = 64) {
  const ProductDistribution d(3, Distribution::uniform(0.0, 1.0));
  const std::vector<double> w{0.0, 0.5, 0.8};
  AdaptiveGap g{optimal_adaptive_availability(d, w, false, starts), optimal_adaptive_availability(d, w, true, starts),
                false};
  g.pass = std::abs(g.free.benchmark.value - kAdaptiveFree) <= 1e-4 &&
           std::abs(g.tied.benchmark.value - kAdaptiveTied) <= 1e-4 && g.free.benchmark.value > g.tied.benchmark.value;
  return g;
}

// The adversarial profile for uniform [0,1] agents under full externalities:
// the cheapest agent prices at face value, everyone else never buys.
inline std::vector<double> cheapest_only_profile(const std::vector<double>& p) {
  const auto lo = static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
  std::vector<double> t(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) t[i] = p[lo] > 1.0 || i == lo ? p[i] : p[i] / p[lo];
  return t;
}

struct WorstBestGap {
  std::size_t n = 0;
  double anonymous_price = 0.0;
  double best_revenue = 0.0;    // best scanned equilibrium at the anonymous price
  double closed_form = 0.0;     // (n/(n+1))^(n+1)
  double worst_bound = 0.0;     // max over searched prices of an equilibrium revenue
  double max_residual = 0.0;    // of the adversarial profiles
  double scanned_worst = 0.0;   // max over anonymous prices of the scanned worst revenue
  std::size_t vectors = 0;
  bool pass = false;
};

// i.i.d. uniform agents under full externalities: the anonymous price
// (n/(n+1))^n has an equilibrium near 1/e, while every price vector admits an
// equilibrium earning at most 1/4.
inline WorstBestGap worst_best_gap(std::size_t n = 10, std::size_t random_vectors = 2000, std::uint64_t seed = 7,
                                   int grid = 2000) {
  WorstBestGap g;
  g.n = n;
  const Scenario s{ProductDistribution(n, Distribution::uniform(0.0, 1.0)), Full{}, Simultaneous{}};
  const double nn = static_cast<double>(n);
  g.anonymous_price = std::pow(nn / (nn + 1.0), nn);
  g.closed_form = std::pow(nn / (nn + 1.0), nn + 1.0);
  g.best_revenue = pessimistic_and_optimistic_revenue(s, Anonymous{g.anonymous_price}, grid).second;
  auto check = [&](const std::vector<double>& p) {
    const auto t = cheapest_only_profile(p);
    g.max_residual = std::max(g.max_residual, sim_residual(s, p, t));
    g.worst_bound = std::max(g.worst_bound, sim_revenue(s.dists, p, t));
    ++g.vectors;
  };
  for (int k = 1; k <= 150; ++k) {
    const double p = 0.01 * k;
    check(std::vector<double>(n, p));
    if (k % 10 == 0)
      g.scanned_worst = std::max(g.scanned_worst, pessimistic_and_optimistic_revenue(s, Anonymous{p}, grid).first);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  for (std::size_t r = 0; r < random_vectors; ++r) {
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    check(p);
  }
  g.pass = g.best_revenue >= g.closed_form - 1e-9 && g.worst_bound <= 0.25 + 1e-6 && g.max_residual <= 1e-9 &&
           g.scanned_worst <= 0.25 + 1e-6 && g.best_revenue / 0.25 >= 1.40;
  return g;
}

struct LogGap {
  std::size_t n = 0;
  double discriminatory = 0.0;
  double harmonic = 0.0;
  double log_n = 0.0;
  double best_anonymous = 0.0;
  double best_anonymous_price = 0.0;
  bool pass = false;
};

inline ProductDistribution log_gap_laws(std::size_t n) {
  ProductDistribution d;
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i);
    d.push_back(Distribution::uniform(1.0 / x, 1.0 / (x - 0.5)));
  }
  return d;
}

// Private sale (no externality) where agent i values the good on
// [1/i, 1/(i - 1/2)]: prices 1/i earn the harmonic number, while a single
// price earns at most 2.
inline LogGap log_gap(std::size_t n = 100, int grid = 10000) {
  LogGap g;
  g.n = n;
  const auto d = log_gap_laws(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = d[i].lo();
  g.discriminatory = pricing::posted_revenue(d, p);
  for (std::size_t i = 1; i <= n; ++i) g.harmonic += 1.0 / static_cast<double>(i);
  g.log_n = std::log(static_cast<double>(n));
  const double lo = 1.0 / static_cast<double>(n), hi = 2.0;
  for (int k = 0; k <= grid; ++k) {
    const double x = lo + (hi - lo) * k / grid;
    const double r = pricing::posted_revenue(d, std::vector<double>(n, x));
    if (r > g.best_anonymous) {
      g.best_anonymous = r;
      g.best_anonymous_price = x;
    }
  }
  g.pass = std::abs(g.discriminatory - g.harmonic) <= 1e-9 && g.discriminatory >= g.log_n &&
           g.best_anonymous <= 2.0 + 1e-6;
  return g;
}

struct HardnessDemo {
  std::size_t graphs = 0;
  std::size_t sequential_checked = 0;
  std::size_t independent = 0;
  std::size_t within_mis = 0;
  std::size_t sequential_agree = 0;
  double max_residual = 0.0;
  bool pass = false;
};

inline NetworkBased random_network(std::mt19937_64& rng, int n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng)) e.emplace_back(a, b);
  return NetworkBased::from_edges(n, e);
}

inline bool is_independent(const NetworkBased& g, const std::vector<int>& s) {
  for (int a : s)
    for (int b : g.adj[static_cast<std::size_t>(a)])
      if (std::find(s.begin(), s.end(), b) != s.end()) return false;
  return true;
}

// Random graphs with uniform [0,1] values: the greedy simultaneous
// equilibrium is an independent buyer support earning at most the maximum
// independent set size, and the sequential reverse greedy matches backward
// induction.
inline HardnessDemo hardness_demo(std::size_t graphs = 200, int max_n = 15, int max_seq_n = 10,
                                  std::uint64_t seed = 11) {
  HardnessDemo h;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t t = 0; t < graphs; ++t) {
    const int n = 1 + static_cast<int>(t % static_cast<std::size_t>(max_n));
    const auto g = random_network(rng, n, 0.1 + 0.6 * u(rng));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = u(rng);
    const ProductDistribution d(static_cast<std::size_t>(n), Distribution::uniform(0.0, 1.0));
    const auto rep = solve_network_sim_greedy(g, Simple{p}, d);
    const Scenario s{d, g, Simultaneous{}};
    h.max_residual = std::max(h.max_residual, sim_residual(s, p, std::get<Simple>(rep.thresholds).v));
    h.independent += is_independent(g, rep.buyer_support);
    h.within_mis += rep.revenue <= static_cast<double>(max_independent_set(g).size) + 1e-12;
    ++h.graphs;
    if (n <= max_seq_n) {
      std::vector<int> order(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<double> q(static_cast<std::size_t>(n));
      for (auto& x : q) x = 1.4 * u(rng);
      ++h.sequential_checked;
      h.sequential_agree += subgame_perfect_network(g, q, std::vector<double>(q.size(), 1.0), order) ==
                            solve_network_seq_fixed_values(g, q, order);
    }
  }
  h.pass = h.independent == h.graphs && h.within_mis == h.graphs && h.max_residual <= 1e-9 &&
           h.sequential_agree == h.sequential_checked;
  return h;
}

}  // namespace sgp::repro

#endif  // SGP_REPRO_HPP_
