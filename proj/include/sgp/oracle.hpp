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

#ifndef SGP_ORACLE_HPP_
#define SGP_ORACLE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sgp/distribution.hpp"
#include "sgp/equilibrium.hpp"
#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"
#include "sgp/scenario.hpp"

namespace sgp {

enum class BenchmarkKind { Myer, MyerK, OptSeq, OptSimBest, OptAdaptiveAvailability, MaxIS };

inline const char* benchmark_name(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::Myer: return "Myer";
    case BenchmarkKind::MyerK: return "MyerK";
    case BenchmarkKind::OptSeq: return "OptSeq";
    case BenchmarkKind::OptSimBest: return "OptSimBest";
    case BenchmarkKind::OptAdaptiveAvailability: return "OptAdaptiveAvailability";
    default: return "MaxIS";
  }
}

// An oracle value with the method that produced it and an explicit bound on
// its numerical error.
struct Benchmark {
  BenchmarkKind kind = BenchmarkKind::Myer;
  std::size_t k = 1;
  double value = 0.0;
  std::string method;
  double error_bound = 0.0;
};

namespace oracle_detail {

// P[at least m of the events happen] for m = 0..n, independent events.
inline std::vector<double> at_least(const std::vector<double>& prob) {
  std::vector<double> exact{1.0};
  for (double x : prob) {
    std::vector<double> next(exact.size() + 1, 0.0);
    for (std::size_t c = 0; c < exact.size(); ++c) {
      next[c] += exact[c] * (1.0 - x);
      next[c + 1] += exact[c] * x;
    }
    exact = std::move(next);
  }
  std::vector<double> tail(exact.size() + 1, 0.0);
  for (std::size_t m = exact.size(); m > 0; --m) tail[m - 1] = tail[m] + exact[m - 1];
  tail.pop_back();
  return tail;
}

}  // namespace oracle_detail

// Virtual values where some agent's inverse virtual value kinks: support
// tops, and both one-sided values at each interior knot of a piecewise law.
inline std::vector<double> virtual_value_breaks(const ProductDistribution& d) {
  std::vector<double> cuts{0.0};
  for (const auto& x : d) {
    cuts.push_back(x.hi());
    if (const auto* pw = std::get_if<PiecewiseLinear>(&x.family())) {
      const auto& pts = pw->points;
      for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
        const double tail = 1.0 - pts[k].second;
        const double left = (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
        const double right = (pts[k + 1].second - pts[k].second) / (pts[k + 1].first - pts[k].first);
        if (left > 0.0) cuts.push_back(pts[k].first - tail / left);
        if (right > 0.0) cuts.push_back(pts[k].first - tail / right);
      }
    }
  }
  const double top = *std::max_element(cuts.begin(), cuts.end());
  std::erase_if(cuts, [&](double c) { return !(c >= 0.0 && c <= top); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// E[sum of the k largest positive virtual values], written as
// sum_{m<=k} of the integral over t > 0 of P[m-th largest virtual value > t].
// Tanh-sinh on each smooth piece absorbs the power-law endpoint behaviour.
inline Benchmark myerson_k_uniform(const ProductDistribution& d, std::size_t k) {
  if (d.empty()) throw DomainError("at least one agent is required");
  if (!all_regular(d)) throw UnsupportedError("the Myerson oracle needs regular distributions");
  if (k < 1 || k > d.size()) throw DomainError("k must lie in [1, n]");
  auto integrand = [&](double t) {
    std::vector<double> above(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) above[i] = 1.0 - d[i].cdf(d[i].inverse_virtual_value(t));
    const auto tail = oracle_detail::at_least(above);
    double s = 0.0;
    for (std::size_t m = 1; m <= k; ++m) s += tail[m];
    return s;
  };
  const auto cuts = virtual_value_breaks(d);
  boost::math::quadrature::tanh_sinh<double> quad(10);
  double value = 0.0, err = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double e = 0.0;
    value += quad.integrate(integrand, cuts[c], cuts[c + 1], 1e-11, &e);
    err += e * static_cast<double>(k) * (cuts[c + 1] - cuts[c]);
  }
  return {k == 1 ? BenchmarkKind::Myer : BenchmarkKind::MyerK, k, value, "tanh-sinh tail integral",
          std::max(err, 1e-12)};
}

inline Benchmark myerson_revenue(const ProductDistribution& d) { return myerson_k_uniform(d, 1); }

// Monte Carlo estimate of the same expectation; error bound is one standard
// error. Deterministic in (seed, samples) for any worker count.
inline Benchmark myerson_k_uniform_mc(const ProductDistribution& d, std::size_t k, std::uint64_t samples,
                                      std::uint64_t seed, unsigned workers = num::thread_count()) {
  if (!all_regular(d)) throw UnsupportedError("the Myerson oracle needs regular distributions");
  if (k < 1 || k > d.size()) throw DomainError("k must lie in [1, n]");
  if (samples < 2) throw DomainError("at least two samples are required");
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> sums(static_cast<std::size_t>(blocks)), sqs(static_cast<std::size_t>(blocks));
  num::parallel_for(static_cast<std::size_t>(blocks), workers, [&](std::size_t b) {
    std::mt19937_64 rng(num::mix_seed(seed, b));
    const std::uint64_t first = b * kBlock, last = std::min(samples, first + kBlock);
    std::vector<double> xs, x2;
    std::vector<double> phi(d.size());
    for (std::uint64_t s = first; s < last; ++s) {
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = d[i].quantile(num::to_unit(rng()));
        phi[i] = std::max(0.0, d[i].virtual_value(std::clamp(v, d[i].lo(), d[i].hi())));
      }
      std::partial_sort(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k), phi.end(), std::greater<>());
      double r = 0.0;
      for (std::size_t m = 0; m < k; ++m) r += phi[m];
      xs.push_back(r);
      x2.push_back(r * r);
    }
    sums[b] = num::pairwise_sum(xs);
    sqs[b] = num::pairwise_sum(x2);
  });
  const double m = static_cast<double>(samples);
  const double mean = num::pairwise_sum(sums) / m;
  const double var = std::max(0.0, (num::pairwise_sum(sqs) - m * mean * mean) / (m - 1.0));
  return {k == 1 ? BenchmarkKind::Myer : BenchmarkKind::MyerK, k, mean, "monte carlo", std::sqrt(var / m)};
}

struct GridOptimum {
  std::vector<double> thresholds;
  PriceSchedule prices;
  Benchmark benchmark;
};

// Revenue of per-agent thresholds under full externalities. The same
// expression gives the sequential revenue for every order and the
// simultaneous revenue at the equilibrium with those thresholds.
inline double full_threshold_revenue(const std::vector<double>& f, const std::vector<double>& t) {
  double rev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double others = 1.0;
    for (std::size_t j = 0; j < t.size(); ++j)
      if (j != i) others *= f[j];
    rev += t[i] * (1.0 - f[i]) * others;
  }
  return rev;
}

// Best full-externality revenue over thresholds: exhaustive grid, then
// coordinate golden-section polish. The error bound is the largest revenue
// change between neighbouring grid points, which covers the distance from
// any grid cell to its optimum.
inline GridOptimum grid_optimal_thresholds(const Scenario& s, int resolution = 200) {
  s.validate();
  const std::size_t n = s.n();
  if (n > 3) throw UnsupportedError("the grid oracle is limited to n <= 3; use myerson_revenue as an upper bound");
  if (resolution < 10) throw DomainError("resolution must be at least 10");
  if (!std::holds_alternative<Full>(s.externality))
    throw UnsupportedError("the grid oracle covers full externalities only");
  const auto r = static_cast<std::size_t>(resolution);
  std::vector<std::vector<double>> tg(n, std::vector<double>(r + 1)), fg(n, std::vector<double>(r + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g <= r; ++g) {
      const double lo = s.dists[i].lo(), hi = s.dists[i].hi();
      tg[i][g] = std::min(hi, lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(r));
      fg[i][g] = s.dists[i].cdf(tg[i][g]);
    }
  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) cells *= r + 1;
  std::vector<double> val(cells);
  std::vector<std::size_t> idx(n);
  std::vector<double> f(n), t(n);
  double best = -kInf;
  std::size_t best_cell = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = rest % (r + 1);
      rest /= r + 1;
      f[i] = fg[i][idx[i]];
      t[i] = tg[i][idx[i]];
    }
    val[c] = full_threshold_revenue(f, t);
    if (val[c] > best) {
      best = val[c];
      best_cell = c;
    }
  }
  double lip = 0.0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cells; ++c)
      if ((c / stride) % (r + 1) < r) lip = std::max(lip, std::abs(val[c + stride] - val[c]));
    stride *= r + 1;
  }
  std::size_t rest = best_cell;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = tg[i][rest % (r + 1)];
    rest /= r + 1;
  }
  auto revenue_at = [&](const std::vector<double>& x) {
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = s.dists[i].cdf(x[i]);
    return full_threshold_revenue(fx, x);
  };
  double cur = revenue_at(t);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = cur;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = (s.dists[i].hi() - s.dists[i].lo()) / static_cast<double>(r);
      const double a = std::max(s.dists[i].lo(), t[i] - 2.0 * step);
      const double b = std::min(s.dists[i].hi(), t[i] + 2.0 * step);
      auto x = t;
      x[i] = num::golden_max(
          [&](double y) {
            x[i] = y;
            return revenue_at(x);
          },
          a, b, 1e-14);
      const double v = revenue_at(x);
      if (v > cur) {
        cur = v;
        t = x;
      }
    }
    if (cur - before <= 1e-15) break;
  }
  GridOptimum out;
  out.thresholds = t;
  out.prices = thresholds_to_prices(s, Simple{t});
  out.benchmark = {s.sequential() ? BenchmarkKind::OptSeq : BenchmarkKind::OptSimBest, 1, cur,
                   "threshold grid " + std::to_string(resolution) + "^" + std::to_string(n) + " + golden polish",
                   std::max(lip, 1e-12)};
  return out;
}

struct AdaptiveOptimum {
  Adaptive prices;
  Benchmark benchmark;
};

// Best history-indexed prices for a sequential availability sale, n <= 3:
// seeded multi-start coordinate ascent (golden section per price) on the
// exact game value. `restricted` ties the last agent's prices after exactly
// one of the first two agents bought.
inline AdaptiveOptimum optimal_adaptive_availability(const ProductDistribution& d, const std::vector<double>& w,
                                                     bool restricted = false, int starts = 64,
                                                     std::uint64_t seed = 2026) {
  const std::size_t n = d.size();
  if (n < 1 || n > 3) throw UnsupportedError("the adaptive oracle is limited to 1 <= n <= 3");
  if (restricted && n != 3) throw DomainError("the restricted variant needs three agents");
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  const Scenario s{d, AvailabilityBased{w}, Sequential{order}};
  s.validate();
  // Free coordinates map to (row, history) cells; the tied cell copies its twin.
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t h = 0; h < (std::size_t{1} << k); ++h)
      if (!(restricted && k == 2 && h == 2)) coords.emplace_back(k, h);
  double top = 0.0;
  for (const auto& x : d) top = std::max(top, x.hi());
  auto build = [&](const std::vector<double>& x) {
    Adaptive a;
    for (std::size_t k = 0; k < n; ++k) a.rows.emplace_back(std::size_t{1} << k, 0.0);
    for (std::size_t c = 0; c < coords.size(); ++c) a.rows[coords[c].first][coords[c].second] = x[c];
    if (restricted) a.rows[2][2] = a.rows[2][1];
    return a;
  };
  auto value = [&](const std::vector<double>& x) { return solve_seq_adaptive(s, build(x)).revenue; };
  std::vector<std::vector<double>> best_x(static_cast<std::size_t>(starts));
  std::vector<double> best_v(static_cast<std::size_t>(starts), -kInf);
  num::parallel_for(static_cast<std::size_t>(starts), num::thread_count(), [&](std::size_t st) {
    std::mt19937_64 rng(num::mix_seed(seed, st));
    std::uniform_real_distribution<double> u(0.0, top);
    std::vector<double> x(coords.size());
    for (auto& v : x) v = u(rng);
    double cur = value(x);
    double width = top;
    for (int sweep = 0; sweep < 400; ++sweep) {
      const double before = cur;
      for (std::size_t c = 0; c < x.size(); ++c) {
        auto y = x;
        const double a = std::max(0.0, x[c] - width), b = std::min(top, x[c] + width);
        y[c] = num::golden_max(
            [&](double z) {
              y[c] = z;
              return value(y);
            },
            a, b, 1e-12);
        const double v = value(y);
        if (v > cur) {
          cur = v;
          x = y;
        }
      }
      if (cur - before <= 1e-15) {
        if (width < 1e-6) break;
        width *= 0.25;
      }
    }
    best_x[st] = x;
    best_v[st] = cur;
  });
  std::size_t arg = 0;
  for (std::size_t st = 1; st < best_v.size(); ++st)
    if (best_v[st] > best_v[arg]) arg = st;
  double spread = 0.0;
  for (double v : best_v)
    if (best_v[arg] - v < 1e-6) spread = std::max(spread, best_v[arg] - v);
  return {build(best_x[arg]),
          {BenchmarkKind::OptAdaptiveAvailability, 1, best_v[arg],
           std::string(restricted ? "restricted " : "") + "adaptive multistart coordinate ascent",
           std::max(spread, 1e-9)}};
}

struct IndependentSet {
  std::size_t size = 0;
  std::vector<int> witness;
};

// Exact maximum independent set by branch and bound on bitmasks, n <= 20.
inline IndependentSet max_independent_set(const NetworkBased& g) {
  const std::size_t n = g.adj.size();
  if (n > 20) throw UnsupportedError("the independent-set oracle is limited to 20 nodes");
  std::vector<std::uint32_t> nb(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j : g.adj[i]) nb[i] |= std::uint32_t{1} << j;
  std::uint32_t best = 0;
  std::function<void(std::uint32_t, std::uint32_t)> go = [&](std::uint32_t cand, std::uint32_t chosen) {
    if (std::popcount(chosen) + std::popcount(cand) <= std::popcount(best)) return;
    if (cand == 0) {
      best = chosen;
      return;
    }
    const int v = std::countr_zero(cand);
    const std::uint32_t bit = std::uint32_t{1} << v;
    go(cand & ~bit & ~nb[static_cast<std::size_t>(v)], chosen | bit);
    if (nb[static_cast<std::size_t>(v)] & cand) go(cand & ~bit, chosen);
  };
  go(n == 0 ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1), 0);
  IndependentSet out;
  for (std::size_t i = 0; i < n; ++i)
    if (best >> i & 1u) out.witness.push_back(static_cast<int>(i));
  out.size = out.witness.size();
  return out;
}

// Buyer set of the subgame-perfect equilibrium of a sequential network sale
// with commonly known values, by backward induction over purchase histories.
inline std::vector<int> subgame_perfect_network(const NetworkBased& g, const std::vector<double>& p,
                                                const std::vector<double>& v, std::vector<int> order = {}) {
  const std::size_t n = g.adj.size();
  if (n > 16) throw UnsupportedError("the game-tree oracle is limited to 16 nodes");
  if (p.size() != n || v.size() != n) throw DomainError("one price and one value per node are required");
  if (order.empty())
    for (std::size_t i = 0; i < n; ++i) order.push_back(static_cast<int>(i));
  std::vector<std::uint32_t> nb(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j : g.adj[i]) nb[i] |= std::uint32_t{1} << j;
  // outcome(k, S): final buyer set when the k-th arrival faces buyers S.
  std::vector<std::vector<std::int64_t>> memo(n + 1);
  std::function<std::uint32_t(std::size_t, std::uint32_t)> outcome = [&](std::size_t k, std::uint32_t s) {
    if (k == n) return s;
    auto& row = memo[k];
    if (row.empty()) row.assign(std::size_t{1} << n, -1);
    if (row[s] >= 0) return static_cast<std::uint32_t>(row[s]);
    const auto a = static_cast<std::size_t>(order[k]);
    const std::uint32_t if_skip = outcome(k + 1, s);
    const double skip_utility = (if_skip & nb[a]) ? v[a] : 0.0;
    const double buy_utility = v[a] - p[a];
    if (buy_utility == skip_utility) throw DomainError("indifferent agent: ties are not resolved");
    const std::uint32_t res = buy_utility > skip_utility ? outcome(k + 1, s | (std::uint32_t{1} << a)) : if_skip;
    row[s] = res;
    return res;
  };
  const std::uint32_t fin = outcome(0, 0);
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (fin >> i & 1u) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace sgp

#endif  // SGP_ORACLE_HPP_
