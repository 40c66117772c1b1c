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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sgp/equilibrium.hpp"

namespace sgp {
namespace {

Distribution U01() { return Distribution::uniform(0.0, 1.0); }

Scenario iid_uniform(std::size_t n, ExternalityModel m, Mode mode = Simultaneous{}) {
  return Scenario{ProductDistribution(n, U01()), std::move(m), std::move(mode)};
}

Sequential identity_order(std::size_t n) {
  Sequential q;
  for (std::size_t i = 0; i < n; ++i) q.order.push_back(static_cast<int>(i));
  return q;
}

const std::vector<double>& simple(const ThresholdProfile& t) { return std::get<Simple>(t).v; }

TEST(FixedPoint, SingleAgentHasNoExternality) {
  const auto rep = solve_sim_fixed_point(iid_uniform(1, Full{}), Simple{{0.4}});
  EXPECT_NEAR(simple(rep.thresholds)[0], 0.4, 1e-12);
}

TEST(FixedPoint, SymmetricFullPair) {
  const auto s = iid_uniform(2, Full{});
  const auto rep = solve_sim_fixed_point(s, Anonymous{0.5});
  EXPECT_NEAR(simple(rep.thresholds)[0], std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(simple(rep.thresholds)[1], std::sqrt(0.5), 1e-10);
  EXPECT_LE(sim_residual(s, {0.5, 0.5}, simple(rep.thresholds)), 1e-9);
}

TEST(FixedPoint, UndampedIterationCycles) {
  FixedPointOptions opt;
  opt.damping = 1.0;
  opt.max_iter = 200;
  opt.start = {1.0, 1.0};
  EXPECT_THROW(solve_sim_fixed_point(iid_uniform(2, Full{}), Anonymous{0.5}, opt), NonConvergenceError);
}

TEST(FixedPoint, ZeroStatusWeightsArePrivate) {
  const auto rep = solve_sim_fixed_point(iid_uniform(3, StatusBased{{0.0, 0.0, 0.0}}), Simple{{0.2, 0.7, 1.0}});
  EXPECT_NEAR(simple(rep.thresholds)[0], 0.2, 1e-12);
  EXPECT_NEAR(simple(rep.thresholds)[1], 0.7, 1e-12);
  EXPECT_NEAR(simple(rep.thresholds)[2], 1.0, 1e-12);
}

TEST(FixedPoint, AvailabilityIsFlaggedWithoutGuarantee) {
  const auto s = iid_uniform(3, AvailabilityBased{{0.0, 0.5, 0.8}});
  const auto rep = solve_sim_fixed_point(s, Simple{{0.3, 0.4, 0.5}});
  EXPECT_TRUE(rep.no_guarantee);
  EXPECT_LE(sim_residual(s, {0.3, 0.4, 0.5}, simple(rep.thresholds)), 1e-9);
}

TEST(Scan, ContinuumForSymmetricPair) {
  const auto eqs = scan_sim_equilibria(iid_uniform(2, Full{}), Simple{{0.5, 0.5}});
  double worst = kInf, best = -kInf;
  bool continuum = false;
  for (const auto& e : eqs) {
    worst = std::min(worst, e.revenue_low);
    best = std::max(best, e.revenue_high);
    continuum = continuum || e.continuum;
    const auto& t = simple(e.thresholds);
    if (e.continuum) {
      EXPECT_NEAR(t[0] * t[1], 0.5, 1e-12);
    }
  }
  EXPECT_TRUE(continuum);
  EXPECT_NEAR(worst, 0.25, 1e-9);
  EXPECT_NEAR(best, 2.0 * 0.5 * (1.0 - std::sqrt(0.5)), 1e-9);
}

TEST(Scan, IidAnonymousPrice) {
  const double p = std::pow(10.0 / 11.0, 10);
  const auto eqs = scan_sim_equilibria(iid_uniform(10, Full{}), Anonymous{p});
  double best = -kInf, worst = kInf;
  for (const auto& e : eqs) {
    best = std::max(best, e.revenue_high);
    worst = std::min(worst, e.revenue_low);
    if (e.best) {
      for (double t : simple(e.thresholds)) EXPECT_NEAR(t, 10.0 / 11.0, 1e-9);
    }
  }
  EXPECT_NEAR(best, std::pow(10.0 / 11.0, 11), 1e-9);
  EXPECT_NEAR(worst, p * (1.0 - p), 1e-9);
}

TEST(Scan, UniqueWhenPricesDiffer) {
  const auto eqs = scan_sim_equilibria(iid_uniform(2, Full{}), Simple{{0.5, 0.9}});
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_NEAR(simple(eqs[0].thresholds)[0], 0.5, 1e-9);
  EXPECT_NEAR(simple(eqs[0].thresholds)[1], 1.8, 1e-9);
  EXPECT_NEAR(eqs[0].revenue, 0.25, 1e-9);
  EXPECT_TRUE(eqs[0].best && eqs[0].worst);
}

TEST(Scan, SingleAgentIsUnique) {
  const auto eqs = scan_sim_equilibria(iid_uniform(1, Full{}), Simple{{0.3}});
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_NEAR(simple(eqs[0].thresholds)[0], 0.3, 1e-9);
}

TEST(Scan, AgreesWithFixedPointOnRandomInstances) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    Scenario s;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 2) {
        s.dists.push_back(Distribution::complement_power(0.5 + 2.0 * u(rng)));
      } else {
        s.dists.push_back(Distribution::shifted_power(1.0 + 2.0 * u(rng), 0.3 * u(rng)));
      }
    }
    StatusBased st;
    for (std::size_t i = 0; i < n; ++i) st.w.push_back(u(rng));
    s.externality = trial % 2 ? ExternalityModel{Full{}} : ExternalityModel{st};
    std::vector<double> p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(0.1 + 0.8 * u(rng));
    const auto eqs = scan_sim_equilibria(s, Simple{p});
    ASSERT_FALSE(eqs.empty());
    for (const auto& e : eqs) ASSERT_LE(e.residual, 1e-9);
    // The damped iterate converges to one of the scanned equilibria.
    try {
      const auto fp = solve_sim_fixed_point(s, Simple{p});
      bool matched = false;
      for (const auto& e : eqs) {
        const auto& a = simple(e.thresholds);
        const auto& b = simple(fp.thresholds);
        bool same = true;
        for (std::size_t i = 0; i < n; ++i)
          same = same && std::abs(s.dists[i].cdf(a[i]) - s.dists[i].cdf(b[i])) < 1e-6;
        matched = matched || same;
      }
      EXPECT_TRUE(matched) << "trial " << trial;
    } catch (const NonConvergenceError&) {
    }
  }
}

TEST(SeqFull, Examples) {
  const auto s = iid_uniform(2, Full{}, identity_order(2));
  const auto rep = solve_seq_full(s, Simple{{std::pow(2.0, -0.5), std::pow(2.0, -0.25)}});
  EXPECT_NEAR(simple(rep.thresholds)[0], std::pow(2.0, -0.25), 1e-12);
  EXPECT_NEAR(simple(rep.thresholds)[1], std::pow(2.0, -0.25), 1e-12);
  const double a = std::pow(2.0, -0.25);
  EXPECT_NEAR(rep.revenue, 2.0 * a * (1.0 - a) * a, 1e-12);
  EXPECT_NEAR(rep.revenue, 0.2250064474, 1e-9);
  EXPECT_NEAR(simple(solve_seq_full(iid_uniform(1, Full{}, identity_order(1)), Simple{{0.3}}).thresholds)[0],
              0.3, 1e-15);
  const auto never = solve_seq_full(s, Simple{{0.9, 0.5}});
  EXPECT_EQ(never.buy_probs[0], 0.0);
  EXPECT_NEAR(never.revenue, 0.25, 1e-12);
}

TEST(ThresholdsToPrices, Examples) {
  const auto seq = iid_uniform(2, Full{}, identity_order(2));
  const auto p = std::get<Simple>(thresholds_to_prices(seq, Simple{{std::pow(2.0, -0.25), std::pow(2.0, -0.25)}})).v;
  EXPECT_NEAR(p[0], std::pow(2.0, -0.5), 1e-12);
  EXPECT_NEAR(p[1], std::pow(2.0, -0.25), 1e-12);
  const auto sim = iid_uniform(2, Full{});
  const auto q = std::get<Simple>(thresholds_to_prices(sim, Simple{{std::sqrt(0.5), std::sqrt(0.5)}})).v;
  EXPECT_NEAR(q[0], 0.5, 1e-12);
  EXPECT_NEAR(q[1], 0.5, 1e-12);
  // Availability with thresholds finite only before the first sale.
  const auto av = iid_uniform(3, AvailabilityBased{{0.0, 0.5, 0.8}}, identity_order(3));
  const std::vector<double> that{0.8, 0.7, 0.6};
  CountIndexed t{{{that[0]}, {that[1], kInf}, {that[2], kInf, kInf}}};
  const auto pc = std::get<CountIndexed>(thresholds_to_prices(av, t));
  for (std::size_t i = 0; i < 3; ++i) {
    double later = 1.0;
    for (std::size_t j = i + 1; j < 3; ++j) later *= that[j];
    EXPECT_NEAR(pc.rows[i][0], that[i] * (1.0 - 0.5 * (1.0 - later)), 1e-12);
    for (std::size_t j = 1; j <= i; ++j) EXPECT_TRUE(std::isinf(pc.rows[i][j]));
  }
  EXPECT_THROW(thresholds_to_prices(iid_uniform(2, NetworkBased::from_edges(2, {{0, 1}}), identity_order(2)),
                                    Simple{{0.5, 0.5}}),
               UnsupportedError);
}

TEST(SeqStatus, Examples) {
  const auto s = iid_uniform(2, StatusBased{{0.5, 0.5}}, identity_order(2));
  const auto rep = solve_seq_status(s, TwoTier{{0.4, 0.5}, {0.25, 0.25}});
  const auto& t = std::get<TwoTier>(rep.thresholds);
  EXPECT_NEAR(t.zero[0], 0.4 / 0.75, 1e-12);
  EXPECT_NEAR(t.zero[1], 0.5, 1e-12);
  EXPECT_NEAR(t.positive[0], 0.5, 1e-12);
  EXPECT_NEAR(t.positive[1], 0.5, 1e-12);
  const auto priv = solve_seq_status(iid_uniform(2, StatusBased{{0.0, 0.0}}, identity_order(2)),
                                     TwoTier{{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(std::get<TwoTier>(priv.thresholds).zero, (std::vector<double>{0.5, 0.5}));
  const auto one = solve_seq_status(iid_uniform(2, StatusBased{{1.0, 1.0}}, identity_order(2)),
                                    TwoTier{{0.5, 0.5}, {0.1, 0.1}});
  EXPECT_TRUE(std::isinf(std::get<TwoTier>(one.thresholds).positive[0]));
}

TEST(SeqAvailability, CollapsesToFull) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    AvailabilityBased ones{std::vector<double>(n, 1.0)};
    ones.w[0] = 0.0;
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    CountIndexed c;
    for (std::size_t k = 0; k < n; ++k) {
      c.rows.emplace_back(k + 1, u(rng));
      c.rows[k][0] = p[k];
    }
    const auto av = solve_seq_availability(iid_uniform(n, ones, identity_order(n)), c);
    const auto fu = solve_seq_full(iid_uniform(n, Full{}, identity_order(n)), Simple{p});
    EXPECT_NEAR(av.revenue, fu.revenue, 1e-12);
    for (std::size_t k = 0; k < n; ++k)
      EXPECT_NEAR(std::get<CountIndexed>(av.thresholds).rows[k][0], simple(fu.thresholds)[k], 1e-12);
  }
}

TEST(SeqAvailability, SingleAgent) {
  const auto rep = solve_seq_availability(iid_uniform(1, AvailabilityBased{{0.0}}, identity_order(1)),
                                          CountIndexed{{{0.5}}});
  EXPECT_NEAR(std::get<CountIndexed>(rep.thresholds).rows[0][0], 0.5, 1e-15);
  EXPECT_NEAR(rep.revenue, 0.25, 1e-15);
}

Adaptive reference_prices() {
  return Adaptive{{{0.4360554077},
                   {0.5510244945, 0.2272487784},
                   {0.6757323434, 0.3119589780, 0.3040872295, 0.1}}};
}

TEST(SeqAdaptive, ReferenceRevenue) {
  const auto s = iid_uniform(3, AvailabilityBased{{0.0, 0.5, 0.8}}, identity_order(3));
  const auto rep = solve_seq_adaptive(s, reference_prices());
  EXPECT_NEAR(rep.revenue, 0.4622033133, 1e-6);
  for (const auto& row : rep.q) {
    double sum = 0.0;
    for (double x : row) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(SeqAdaptive, MatchesCountIndexedSolver) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    AvailabilityBased w{{0.0}};
    for (std::size_t k = 1; k < n; ++k) w.w.push_back(std::min(1.0, w.w.back() + 0.4 * u(rng)));
    CountIndexed c;
    for (std::size_t k = 0; k < n; ++k) {
      c.rows.emplace_back(k + 1);
      for (auto& x : c.rows[k]) x = u(rng);
    }
    const auto s = iid_uniform(n, w, identity_order(n));
    EXPECT_NEAR(solve_seq_adaptive(s, c).revenue, solve_seq_availability(s, c).revenue, 1e-12);
  }
}

TEST(SeqAvailability, TablesAndRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    AvailabilityBased w{{0.0}};
    for (std::size_t k = 1; k < n; ++k) w.w.push_back(std::min(1.0, w.w.back() + 0.3 * u(rng)));
    Sequential ord = identity_order(n);
    std::shuffle(ord.order.begin(), ord.order.end(), rng);
    Scenario s;
    for (std::size_t i = 0; i < n; ++i) s.dists.push_back(Distribution::complement_power(0.5 + 2 * u(rng)));
    s.externality = w;
    s.mode = ord;
    CountIndexed c;
    for (std::size_t k = 0; k < n; ++k) {
      c.rows.emplace_back(k + 1);
      for (auto& x : c.rows[k]) x = u(rng);
    }
    const auto rep = solve_seq_availability(s, c);
    for (const auto& row : rep.q) {
      double sum = 0.0;
      for (double x : row) {
        EXPECT_GE(x, 0.0);
        sum += x;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    for (const auto& block : rep.r) {
      for (const auto& dist : block) {
        double sum = 0.0;
        for (double x : dist) sum += x;
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
    const auto back = std::get<CountIndexed>(thresholds_to_prices(s, rep.thresholds));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j <= k; ++j) EXPECT_NEAR(back.rows[k][j], c.rows[k][j], 1e-9);
  }
}

TEST(RoundTrip, SequentialFullAndStatus) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    Sequential ord = identity_order(n);
    std::shuffle(ord.order.begin(), ord.order.end(), rng);
    std::vector<double> p(n), p2(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u(rng);
      p2[i] = u(rng) * 0.5;
      w[i] = u(rng);
    }
    const auto sf = iid_uniform(n, Full{}, ord);
    const auto back = std::get<Simple>(thresholds_to_prices(sf, solve_seq_full(sf, Simple{p}).thresholds)).v;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], p[i], 1e-9);
    const auto ss = iid_uniform(n, StatusBased{w}, ord);
    const TwoTier tt{p, p2};
    const auto bt = std::get<TwoTier>(thresholds_to_prices(ss, solve_seq_status(ss, tt).thresholds));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(bt.zero[i], p[i], 1e-9);
      EXPECT_NEAR(bt.positive[i], p2[i], 1e-9);
    }
    // The adaptive solver agrees with the two-tier recursion.
    EXPECT_NEAR(solve_seq_adaptive(ss, tt).revenue, solve_seq_status(ss, tt).revenue, 1e-12);
    EXPECT_NEAR(solve_seq_adaptive(sf, Simple{p}).revenue, solve_seq_full(sf, Simple{p}).revenue, 1e-12);
  }
}

TEST(RoundTrip, SimultaneousContainsThresholds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.2, 0.95);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    Scenario s;
    for (std::size_t i = 0; i < n; ++i) s.dists.push_back(Distribution::complement_power(0.7 + u(rng)));
    s.externality = Full{};
    std::vector<double> t(n);
    for (auto& x : t) x = u(rng);
    const auto p = thresholds_to_prices(s, Simple{t});
    const auto eqs = scan_sim_equilibria(s, p);
    bool found = false;
    for (const auto& e : eqs) {
      bool same = true;
      for (std::size_t i = 0; i < n; ++i) same = same && std::abs(simple(e.thresholds)[i] - t[i]) < 1e-9;
      found = found || same;
    }
    EXPECT_TRUE(found) << "trial " << trial;
  }
}

TEST(Network, GreedyExamples) {
  const auto c4 = NetworkBased::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto rep = solve_network_sim_greedy(c4, Anonymous{0.5}, ProductDistribution(4, U01()));
  EXPECT_EQ(rep.buyer_support, (std::vector<int>{0, 2}));
  EXPECT_NEAR(rep.revenue, 0.5, 1e-12);
  EXPECT_LE(rep.residual, 1e-12);
  const auto none = NetworkBased::from_edges(5, {});
  EXPECT_NEAR(solve_network_sim_greedy(none, Anonymous{0.5}, ProductDistribution(5, U01())).revenue, 1.25, 1e-12);
  const auto k3 = NetworkBased::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto r3 = solve_network_sim_greedy(k3, Simple{{0.2, 0.5, 0.9}}, ProductDistribution(3, U01()));
  EXPECT_EQ(r3.buyer_support, (std::vector<int>{0}));
  EXPECT_NEAR(r3.revenue, 0.16, 1e-12);
  EXPECT_LE(r3.residual, 1e-12);
}

TEST(Network, SequentialFixedValues) {
  const auto path = NetworkBased::from_edges(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(solve_network_seq_fixed_values(path, {0.9, 0.1, 0.9}), (std::vector<int>{0, 2}));
  EXPECT_TRUE(solve_network_seq_fixed_values(path, {1.5, 1.2, 2.0}).empty());
  EXPECT_EQ(solve_network_seq_fixed_values(NetworkBased::from_edges(3, {}), {0.5, 0.5, 0.5}),
            (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(solve_network_seq_fixed_values(path, {1.0, 0.5, 0.5}), DomainError);
}

}  // namespace
}  // namespace sgp
