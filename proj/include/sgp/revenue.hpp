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

#ifndef SGP_REVENUE_HPP_
#define SGP_REVENUE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "sgp/equilibrium.hpp"
#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"
#include "sgp/scenario.hpp"

namespace sgp {

namespace detail {

// Reads a schedule at (arrival position k, agent a, prior sales j, history h).
class ScheduleView {
 public:
  ScheduleView(Schedule s, std::size_t n) : s_(std::move(s)) {
    if (const auto* a = std::get_if<Anonymous>(&s_)) flat_.assign(n, a->v);
    if (const auto* p = std::get_if<Simple>(&s_)) flat_ = p->v;
    validate_schedule(s_, n);
  }
  // `after_sale_blocks` makes a simple schedule mean "offered only before the
  // first sale", which is how sequential full thresholds are defined.
  double at(std::size_t k, std::size_t a, std::size_t j, std::size_t h, bool after_sale_blocks) const {
    switch (s_.index()) {
      case 0:
      case 1:
        return (after_sale_blocks && j > 0) ? kInf : flat_[a];
      case 2: {
        const auto& t = std::get<TwoTier>(s_);
        return j == 0 ? t.zero[a] : t.positive[a];
      }
      case 3:
        return std::get<CountIndexed>(s_).rows[k][j];
      default:
        return std::get<Adaptive>(s_).rows[k][h];
    }
  }

 private:
  Schedule s_;
  std::vector<double> flat_;
};

}  // namespace detail

// Exact expected revenue of (s, p) at the equilibrium strategies in eq.
inline double revenue_closed(const Scenario& s, const PriceSchedule& p, const EquilibriumReport& eq) {
  const std::size_t n = s.n();
  if (!s.sequential()) {
    if (!std::holds_alternative<Simple>(eq.thresholds))
      throw DomainError("simultaneous revenue needs per-agent thresholds");
    return sim_revenue(s.dists, per_agent(p, n), std::get<Simple>(eq.thresholds).v);
  }
  const auto& ord = std::get<Sequential>(s.mode).order;
  const auto& t = eq.thresholds;
  if (std::holds_alternative<Simple>(t)) {
    if (!std::holds_alternative<Full>(s.externality))
      throw DomainError("per-agent sequential thresholds belong to the full model");
    const auto pv = per_agent(p, n);
    const auto& tv = std::get<Simple>(t).v;
    double before = 1.0, rev = 0.0;
    for (int ai : ord) {
      const auto a = static_cast<std::size_t>(ai);
      const double u = s.dists[a].cdf(tv[a]);
      rev += before * num::pay(pv[a], 1.0 - u);
      before *= u;
    }
    return rev;
  }
  if (std::holds_alternative<TwoTier>(t)) {
    if (!std::holds_alternative<StatusBased>(s.externality))
      throw DomainError("two-tier thresholds belong to the status model");
    const auto& tt = std::get<TwoTier>(t);
    TwoTier pt;
    if (const auto* x = std::get_if<TwoTier>(&p)) {
      pt = *x;
    } else {
      const auto v = per_agent(p, n);
      pt = {v, v};
    }
    double q0 = 1.0, rev = 0.0;
    for (int ai : ord) {
      const auto a = static_cast<std::size_t>(ai);
      const double u0 = s.dists[a].cdf(tt.zero[a]);
      const double up = s.dists[a].cdf(tt.positive[a]);
      rev += q0 * num::pay(pt.zero[a], 1.0 - u0) + (1.0 - q0) * num::pay(pt.positive[a], 1.0 - up);
      q0 *= u0;
    }
    return rev;
  }
  if (std::holds_alternative<NetworkBased>(s.externality))
    throw DomainError("no sequential revenue formula for network externalities");
  // Count- and history-indexed: forward pass over the reachable states.
  const bool by_count = std::holds_alternative<CountIndexed>(t);
  if (by_count && !std::holds_alternative<AvailabilityBased>(s.externality))
    throw DomainError("count-indexed thresholds belong to the availability model");
  detail::ScheduleView tv(t, n);
  detail::ScheduleView pv(by_count ? Schedule{to_count_indexed(s, p)} : Schedule{to_adaptive(s, p)}, n);
  std::vector<double> reach{1.0};
  double rev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(ord[k]);
    std::vector<double> next(by_count ? k + 2 : (reach.size() * 2), 0.0);
    for (std::size_t st = 0; st < reach.size(); ++st) {
      if (reach[st] == 0.0) continue;
      const std::size_t j = by_count ? st : static_cast<std::size_t>(std::popcount(st));
      const double u = s.dists[a].cdf(tv.at(k, a, j, st, false));
      rev += reach[st] * num::pay(pv.at(k, a, j, st, false), 1.0 - u);
      next[st] += reach[st] * u;
      next[by_count ? st + 1 : (st | (std::size_t{1} << k))] += reach[st] * (1.0 - u);
    }
    reach = std::move(next);
  }
  return rev;
}

struct SimulationSummary {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> purchase_freq;
  std::vector<std::uint64_t> histogram;  // buyer count -> trials
  std::uint64_t seed = 0;
};

// Trials per aggregation block. Fixed, so the summation tree and hence the
// result do not depend on the worker count.
inline constexpr std::uint64_t kSimBlock = 4096;

// Monte Carlo sale: block b of kSimBlock trials draws its values from
// mt19937_64 seeded with mix_seed(seed, b); agents play the thresholds in
// `strategy`.
inline SimulationSummary simulate(const Scenario& s, const PriceSchedule& p, const ThresholdProfile& strategy,
                                  std::uint64_t trials, std::uint64_t seed, unsigned workers = num::thread_count()) {
  if (trials == 0) throw DomainError("at least one trial is required");
  const std::size_t n = s.n();
  const bool seq = s.sequential();
  const auto ord = s.order();
  if (seq && std::holds_alternative<Adaptive>(strategy) && n > 62)
    throw DomainError("history-indexed simulation is limited to 62 agents");
  const Schedule prices = seq && std::holds_alternative<Adaptive>(strategy) ? Schedule{to_adaptive(s, p)} : p;
  detail::ScheduleView tv(strategy, n);
  detail::ScheduleView pv(prices, n);
  // Sequential full thresholds stop applying after the first sale.
  const bool first_sale_only = seq && std::holds_alternative<Simple>(strategy);

  struct Block {
    double sum = 0.0, sumsq = 0.0;
    std::vector<std::uint64_t> bought, hist;
  };
  const std::uint64_t blocks = (trials + kSimBlock - 1) / kSimBlock;
  std::vector<Block> out(static_cast<std::size_t>(blocks));
  num::parallel_for(static_cast<std::size_t>(blocks), workers, [&](std::size_t b) {
    Block& blk = out[b];
    blk.bought.assign(n, 0);
    blk.hist.assign(n + 1, 0);
    const std::uint64_t first = b * kSimBlock;
    const std::uint64_t last = std::min(trials, first + kSimBlock);
    std::vector<double> revs, sq;
    revs.reserve(static_cast<std::size_t>(last - first));
    sq.reserve(revs.capacity());
    std::vector<double> v(n);
    std::mt19937_64 rng(num::mix_seed(seed, b));
    for (std::uint64_t trial = first; trial < last; ++trial) {
      for (std::size_t i = 0; i < n; ++i) v[i] = s.dists[i].quantile(num::to_unit(rng()));
      double rev = 0.0;
      std::size_t count = 0;
      std::uint64_t hist_mask = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto a = seq ? static_cast<std::size_t>(ord[k]) : k;
        const double th = tv.at(k, a, count, static_cast<std::size_t>(hist_mask), first_sale_only);
        if (!(v[a] >= th)) continue;
        rev += pv.at(k, a, count, static_cast<std::size_t>(hist_mask), false);
        ++blk.bought[a];
        ++count;
        if (seq) hist_mask |= std::uint64_t{1} << k;
      }
      ++blk.hist[count];
      revs.push_back(rev);
      sq.push_back(rev * rev);
    }
    blk.sum = num::pairwise_sum(revs);
    blk.sumsq = num::pairwise_sum(sq);
  });

  SimulationSummary sum;
  sum.trials = trials;
  sum.seed = seed;
  std::vector<double> sums, sqs;
  sum.purchase_freq.assign(n, 0.0);
  sum.histogram.assign(n + 1, 0);
  std::vector<std::uint64_t> bought(n, 0);
  for (const auto& blk : out) {
    sums.push_back(blk.sum);
    sqs.push_back(blk.sumsq);
    for (std::size_t i = 0; i < n; ++i) bought[i] += blk.bought[i];
    for (std::size_t c = 0; c <= n; ++c) sum.histogram[c] += blk.hist[c];
  }
  const double total = num::pairwise_sum(sums);
  const double total_sq = num::pairwise_sum(sqs);
  const double m = static_cast<double>(trials);
  sum.mean = total / m;
  const double var = trials > 1 ? std::max(0.0, (total_sq - m * sum.mean * sum.mean) / (m - 1.0)) : 0.0;
  sum.stderr_ = std::sqrt(var / m);
  for (std::size_t i = 0; i < n; ++i) sum.purchase_freq[i] = static_cast<double>(bought[i]) / m;
  return sum;
}

// Worst and best equilibrium revenue of a simultaneous full/status sale.
// Continua contribute the extremes of their revenue range.
inline std::pair<double, double> pessimistic_and_optimistic_revenue(const Scenario& s, const PriceSchedule& p,
                                                                    int grid = 10000) {
  const auto eqs = scan_sim_equilibria(s, p, grid);
  double worst = kInf, best = -kInf;
  for (const auto& e : eqs) {
    worst = std::min(worst, e.revenue_low);
    best = std::max(best, e.revenue_high);
  }
  return {worst, best};
}

}  // namespace sgp

#endif  // SGP_REVENUE_HPP_
