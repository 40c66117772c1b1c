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
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sgp/instances.hpp"
#include "sgp/pricing.hpp"

namespace sgp {
namespace {

Distribution U01() { return Distribution::uniform(0.0, 1.0); }
ProductDistribution iid(std::size_t n) { return ProductDistribution(n, U01()); }

double worst_revenue(const Scenario& s, const Schedule& p, int grid = 4000) {
  double worst = kInf;
  for (const auto& e : equilibria(s, p, grid)) worst = std::min(worst, e.revenue_low);
  return worst;
}

TEST(Ear, Examples) {
  auto two = ear_prices(iid(2));
  EXPECT_NEAR(two.prices[0], 0.5, 1e-12);
  EXPECT_NEAR(two.revenue, 0.5, 1e-12);
  auto one = ear_prices(iid(1));
  EXPECT_NEAR(one.prices[0], 0.5, 1e-12);
  EXPECT_NEAR(one.revenue, 0.25, 1e-12);
  auto four = ear_prices(iid(4));
  for (double p : four.prices) EXPECT_NEAR(p, 0.75, 1e-10);
  EXPECT_NEAR(four.revenue, 0.75, 1e-9);
}

TEST(Ear, RejectsIrregular) {
  EXPECT_THROW(ear_prices({Distribution::shifted_power(0.5, 0.1)}), UnsupportedError);
}

TEST(Ear, FeasibleOnRandomInstances) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto d = random_regular_laws(rng, 1 + t % 8);
    const auto e = ear_prices(d);
    EXPECT_LE(pricing::sales_of(d, e.prices), 1.0 + 1e-9);
    EXPECT_NEAR(e.revenue, pricing::posted_revenue(d, e.prices), 1e-12);
  }
}

TEST(ExanteTransform, Examples) {
  const double c2 = 1.0 + 1.0 / std::numbers::sqrt2;
  auto a = exante_transform({0.5, 0.5}, 0.5);
  EXPECT_NEAR(a.prices.v[0], 0.5 / c2, 1e-12);
  EXPECT_NEAR(a.prices.v[0], 0.29289, 1e-5);
  EXPECT_NEAR(a.tag.factor, 5.8284, 1e-4);
  auto b = exante_transform({1.0, 0.01, 0.01}, 1.0);
  EXPECT_NEAR(b.prices.v[0], 0.58579, 1e-5);
  EXPECT_EQ(b.prices.v[1], kInf);
  EXPECT_EQ(b.prices.v[2], kInf);
  auto c = exante_transform({0.3}, 0.01);
  EXPECT_NEAR(c.prices.v[0], 0.3 / c2, 1e-12);
}

TEST(ExanteTransform, WorstEquilibriumKeepsConstantShare) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 8; ++t) {
    const auto d = random_regular_laws(rng, 1 + t % 4);
    const auto e = ear_prices(d);
    const auto p = exante_transform(e.prices, e.revenue);
    const Scenario s{d, Full{}, Simultaneous{}};
    EXPECT_GE(worst_revenue(s, p.prices), e.revenue / (3.0 + 2.0 * std::numbers::sqrt2) - 1e-6);
  }
}

TEST(Prophet, Examples) {
  auto two = prophet_prices(iid(2));
  EXPECT_NEAR(two.prices[0], std::pow(2.0, -0.5), 1e-10);
  EXPECT_NEAR(two.t, std::sqrt(2.0) - 1.0, 1e-10);
  auto one = prophet_prices(iid(1));
  EXPECT_NEAR(one.prices[0], 0.5, 1e-10);
  EXPECT_NEAR(one.t, 0.0, 1e-10);
  auto three = prophet_prices(iid(3));
  for (double p : three.prices) EXPECT_NEAR(p, std::pow(2.0, -1.0 / 3.0), 1e-10);
}

TEST(Prophet, SellsWithProbabilityHalf) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto d = random_regular_laws(rng, 1 + t % 8);
    const auto pi = prophet_prices(d);
    double unsold = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) unsold *= d[i].cdf(pi.prices[i]);
    EXPECT_NEAR(unsold, 0.5, 1e-9);
  }
}

TEST(SeqFullPrices, Examples) {
  auto two = seq_full_prices(iid(2));
  EXPECT_NEAR(two.prices.v[0], 0.5, 1e-10);
  EXPECT_NEAR(two.prices.v[1], std::pow(2.0, -0.5), 1e-10);
  EXPECT_EQ(two.tag.factor, 4.0);
  EXPECT_NEAR(seq_full_prices(iid(1)).prices.v[0], 0.5, 1e-10);
  auto three = seq_full_prices(iid(3));
  EXPECT_NEAR(three.prices.v[0], 0.5, 1e-10);
  EXPECT_NEAR(three.prices.v[1], std::pow(2.0, -2.0 / 3.0), 1e-10);
  EXPECT_NEAR(three.prices.v[2], std::pow(2.0, -1.0 / 3.0), 1e-10);
}

TEST(SeqFullPrices, ReversedOrderMirrorsPrices) {
  auto p = seq_full_prices(iid(2), {1, 0});
  EXPECT_NEAR(p.prices.v[1], 0.5, 1e-10);
  EXPECT_NEAR(p.prices.v[0], std::pow(2.0, -0.5), 1e-10);
}

TEST(AnonymousPrice, Examples) {
  const double p = anonymous_price(iid(2));
  EXPECT_NEAR(p, 1.0 / std::sqrt(3.0), 1e-8);
  EXPECT_NEAR(anonymous_revenue(iid(2), p), 2.0 / (3.0 * std::sqrt(3.0)), 1e-12);
  EXPECT_NEAR(anonymous_price(iid(1)), 0.5, 1e-8);
  auto h = halve_anonymous(1.0 / std::sqrt(3.0));
  EXPECT_NEAR(h.prices.v, 0.28868, 1e-5);
  EXPECT_NEAR(h.tag.factor, 4.0 * std::numbers::e, 1e-12);
}

TEST(AnonymousPrice, HalvedPriceKeepsQuarterOfAnonymousRevenue) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 6; ++t) {
    const auto d = random_regular_laws(rng, 1 + t % 3);
    const double p = anonymous_price(d);
    const double g = anonymous_revenue(d, p);
    const Schedule half = halve_anonymous(p).prices;
    EXPECT_GE(worst_revenue(Scenario{d, Full{}, Simultaneous{}}, half), g / 4.0 - 1e-6);
    std::vector<int> order(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) order[i] = static_cast<int>(i);
    do {
      EXPECT_GE(solve_seq_full(full_sequential(d, order), half).revenue, g / 4.0 - 1e-6);
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(IidNondiscriminatory, Examples) {
  EXPECT_NEAR(iid_nondiscriminatory(U01(), 2).prices.v, 0.25, 1e-10);
  EXPECT_NEAR(iid_nondiscriminatory(U01(), 4).prices.v, 0.375, 1e-10);
  EXPECT_NEAR(iid_nondiscriminatory(U01(), 1).prices.v, 0.25, 1e-10);
  EXPECT_THROW(iid_nondiscriminatory({U01(), Distribution::uniform(0.0, 2.0)}), UnsupportedError);
}

TEST(StatusPrivate, Examples) {
  EXPECT_EQ(status_private_prices(iid(2), {0.5, 0.5}).v, (std::vector<double>{0.25, 0.25}));
  EXPECT_EQ(status_private_prices(iid(2), {0.0, 0.0}).v, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(status_private_prices(iid(2), {1.0, 1.0}).v, (std::vector<double>{0.0, 0.0}));
}

TEST(StatusPublic, SequentialExamples) {
  const double t = std::pow(2.0, -0.5);
  auto p = std::get<TwoTier>(status_public_prices(iid(2), {0.5, 0.5}, Sequential{{0, 1}}));
  EXPECT_NEAR(p.zero[0], 0.5 * t + 0.5 * t * t, 1e-10);
  EXPECT_NEAR(p.zero[1], t, 1e-10);
  EXPECT_EQ(p.zero, p.positive);
  auto q = std::get<TwoTier>(status_public_prices(iid(2), {0.0, 0.0}, Sequential{{0, 1}}));
  EXPECT_NEAR(q.zero[0], t, 1e-10);
  EXPECT_NEAR(q.zero[1], t, 1e-10);
}

TEST(StatusPublic, SequentialBeatsFullExternalityRevenue) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + t % 4;
    const auto d = random_regular_laws(rng, n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng);
    Sequential order{{}};
    for (std::size_t i = 0; i < n; ++i) order.order.push_back(static_cast<int>(i));
    const auto pub = status_public_prices(d, w, order);
    const double r = solve_seq_status(Scenario{d, StatusBased{w}, order}, pub).revenue;
    const double r_full = solve_seq_full(full_sequential(d, order.order), seq_full_prices(d).prices).revenue;
    EXPECT_GE(r, r_full - 1e-9);
  }
}

TEST(StatusPublic, SimultaneousIsHalvedAnonymous) {
  auto p = std::get<Anonymous>(status_public_prices(iid(2), {0.3, 0.9}, Simultaneous{}));
  EXPECT_NEAR(p.v, 0.5 / std::sqrt(3.0), 1e-8);
}

TEST(StatusBestOf, PrivateWinsWithoutExternality) {
  for (Mode m : {Mode{Simultaneous{}}, Mode{Sequential{{0, 1, 2}}}}) {
    auto b = status_best_of(iid(3), {0.0, 0.0, 0.0}, m, 2000);
    EXPECT_EQ(b.winner, "private");
    for (const auto& [name, r] : b.candidates) EXPECT_LE(r, b.revenue);
  }
}

TEST(StatusBestOf, PublicWinsAtFullExternality) {
  for (Mode m : {Mode{Simultaneous{}}, Mode{Sequential{{0, 1, 2, 3}}}}) {
    auto b = status_best_of(iid(4), {1.0, 1.0, 1.0, 1.0}, m, 2000);
    EXPECT_NE(b.winner, "private");
    EXPECT_EQ(b.candidates.front().second, 0.0);
    EXPECT_GT(b.revenue, 0.0);
  }
}

TEST(StatusBestOf, SingleAgent) {
  auto same = status_best_of(iid(1), {0.0}, Sequential{{0}}, 2000);
  EXPECT_NEAR(same.candidates[0].second, same.candidates[1].second, 1e-12);
  EXPECT_EQ(same.winner, "private");
  auto pub = status_best_of(iid(1), {0.6}, Sequential{{0}}, 2000);
  EXPECT_EQ(pub.winner, "public");
  EXPECT_NEAR(pub.revenue, 0.25, 1e-12);
}

TEST(StatusBestOf, Tags) {
  EXPECT_EQ(status_best_of(iid(2), {0.5, 0.5}, Sequential{{0, 1}}).tag.factor, 6.0);
  EXPECT_NEAR(status_best_of(iid(2), {0.5, 0.5}, Simultaneous{}, 2000).tag.factor, 4.0 * std::numbers::e + 1.0,
              1e-12);
}

TEST(TwoTierFromAdaptive, Examples) {
  Adaptive a{{{0.7}, {0.6, 0.1}}};
  auto t = two_tier_from_adaptive(a, iid(2), {0.5, 0.5});
  EXPECT_EQ(t.zero, (std::vector<double>{0.7, 0.6}));
  EXPECT_EQ(t.positive, (std::vector<double>{0.25, 0.25}));
  Adaptive b{{{0.7}, {0.6, 0.9}, {0.5, 0.2, 0.3, 0.4}}};
  Adaptive c{{{0.7}, {0.6, 0.4}, {0.5, 0.8, 0.1, 0.6}}};
  EXPECT_EQ(two_tier_from_adaptive(b, iid(3), {0.2, 0.4, 0.6}),
            two_tier_from_adaptive(c, iid(3), {0.2, 0.4, 0.6}));
}

TEST(TwoTierFromAdaptive, IdentityOnTwoTierSchedules) {
  const std::vector<double> w{0.5, 0.5};
  const TwoTier tt{{0.7, 0.6}, {0.25, 0.25}};
  const Scenario s{iid(2), StatusBased{w}, Sequential{{0, 1}}};
  EXPECT_EQ(two_tier_from_adaptive(to_adaptive(s, tt), iid(2), w), tt);
}

TEST(KUniform, Examples) {
  for (double p : k_uniform_prices(iid(4), 2).v) EXPECT_NEAR(p, 0.5, 1e-12);
  for (double p : k_uniform_prices(iid(3), 3).v) EXPECT_NEAR(p, 0.5, 1e-12);
  for (double p : k_uniform_prices(iid(2), 1).v) EXPECT_NEAR(p, 0.5, 1e-12);
  for (double p : k_uniform_prices(iid(4), 1).v) EXPECT_NEAR(p, 0.75, 1e-10);
  EXPECT_THROW(k_uniform_prices(iid(2), 0), DomainError);
  EXPECT_THROW(k_uniform_prices(iid(2), 3), DomainError);
}

TEST(Grad1, Examples) {
  // No externality before the last unit: prices equal the thresholds.
  auto a = availability_grad1(iid(3), {0.0, 0.0, 0.0}, 3);
  for (const auto& row : a.prices.rows)
    for (double p : row) EXPECT_NEAR(p, 0.5, 1e-12);
  // Hand recursion with p̂=(0.5,0.5): r^0=r^1=0.5.
  auto b = availability_grad1(iid(2), {0.0, 0.5}, 1);
  EXPECT_NEAR(b.prices.rows[1][0], 0.5, 1e-12);
  EXPECT_EQ(b.prices.rows[1][1], kInf);
  EXPECT_NEAR(b.prices.rows[0][0], 0.5 * (1.0 - 0.5 * 0.5), 1e-12);
  // Four agents, k=1: p̂=0.75 and one later buyer at most.
  auto c = availability_grad1(iid(4), {0.0, 0.4, 0.7, 0.9}, 1);
  double none = 1.0;
  std::vector<double> expect(4);
  for (int pos = 3; pos >= 0; --pos) {
    expect[static_cast<std::size_t>(pos)] = 0.75 * (1.0 - 0.4 * (1.0 - none));
    none *= 0.75;
  }
  for (std::size_t pos = 0; pos < 4; ++pos) EXPECT_NEAR(c.prices.rows[pos][0], expect[pos], 1e-12);
}

TEST(Grad1, FloorHoldsOnRandomInstances) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + t % 5;
    const auto d = random_regular_laws(rng, n);
    const auto w = random_availability_weights(rng, n);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto g = availability_grad1(d, w, k);
      const auto p_hat = k_uniform_prices(d, k).v;
      const double wk = k < n ? w[k] : 1.0;
      for (std::size_t pos = 0; pos < n; ++pos)
        for (double p : g.prices.rows[pos]) EXPECT_GE(p, p_hat[pos] * (1.0 - wk) - 1e-12);
    }
  }
}

TEST(Grad2, Examples) {
  auto a = availability_grad2(iid(2), {0.0, 0.0});
  EXPECT_NEAR(a.prices.rows[0][0], std::pow(2.0, -0.5), 1e-10);
  EXPECT_NEAR(a.prices.rows[1][0], std::pow(2.0, -0.5), 1e-10);
  EXPECT_EQ(a.prices.rows[1][1], kInf);
  const double t = std::pow(2.0, -0.5);
  auto b = availability_grad2(iid(2), {0.0, 0.5});
  EXPECT_NEAR(b.prices.rows[0][0], t * (1.0 - 0.5 * (1.0 - t)), 1e-10);
  EXPECT_NEAR(b.prices.rows[1][0], t, 1e-10);
  auto c = availability_grad2(iid(1), {0.0});
  EXPECT_NEAR(c.prices.rows[0][0], 0.5, 1e-10);
}

TEST(BestBucket, FullCollapseSmallMarkets) {
  for (std::size_t n : {2, 3, 4}) {
    std::vector<double> w(n, 1.0);
    w[0] = 0.0;
    EXPECT_EQ(availability_best_bucket(iid(n), w).winner, "grad2") << n;
  }
}

TEST(BestBucket, PrivateMarketsPickLargestBucket) {
  EXPECT_EQ(availability_best_bucket(iid(4), {0.0, 0.0, 0.0, 0.0}).winner, "grad1_k4");
  EXPECT_EQ(availability_best_bucket(iid(6), std::vector<double>(6, 0.0)).winner, "grad1_k4");
}

TEST(BestBucket, ReturnsArgmaxWithEarliestTie) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto d = random_regular_laws(rng, n);
    const auto b = availability_best_bucket(d, random_availability_weights(rng, n));
    double best = -kInf;
    std::string winner;
    for (const auto& [name, r] : b.candidates)
      if (r > best) {
        best = r;
        winner = name;
      }
    EXPECT_EQ(b.winner, winner);
    EXPECT_EQ(b.revenue, best);
  }
  auto one = availability_best_bucket(iid(1), {0.0});
  EXPECT_EQ(one.candidates.size(), 2u);
  EXPECT_NEAR(one.revenue, 0.25, 1e-12);
}

}  // namespace
}  // namespace sgp
