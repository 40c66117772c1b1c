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

#ifndef SGP_PRICING_HPP_
#define SGP_PRICING_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sgp/distribution.hpp"
#include "sgp/equilibrium.hpp"
#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"
#include "sgp/scenario.hpp"

namespace sgp {

// The approximation a scheme is proven to reach and against what. A factor
// of infinity means the guarantee is asymptotic with no stated constant.
struct GuaranteeTag {
  std::string scheme;
  double factor = kInf;
  std::string factor_label;
  std::string benchmark;  // "Myer", "R*_sim", "R*_seq", "EAR", "MyerK"
};

template <class P>
struct Priced {
  P prices;
  GuaranteeTag tag;
};

namespace pricing {

inline constexpr double kC1 = std::numbers::sqrt2;
inline constexpr double kC2 = 1.0 + 1.0 / std::numbers::sqrt2;

inline void require_regular(const ProductDistribution& d) {
  if (d.empty()) throw DomainError("at least one agent is required");
  if (!all_regular(d)) throw UnsupportedError("pricing needs regular distributions");
}

inline double upper_support(const ProductDistribution& d) {
  double hi = 0.0;
  for (const auto& x : d) hi = std::max(hi, x.hi());
  return hi;
}

inline double lower_support(const ProductDistribution& d) {
  double lo = kInf;
  for (const auto& x : d) lo = std::min(lo, x.lo());
  return lo;
}

// Prices with a common virtual value and `target` expected sales, or the
// monopoly prices when those already sell less.
inline std::vector<double> equalized_prices(const ProductDistribution& d, double target) {
  std::vector<double> mono(d.size());
  double sales = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    mono[i] = d[i].monopoly_price().first;
    sales += 1.0 - d[i].cdf(mono[i]);
  }
  if (sales <= target) return mono;
  auto at = [&](double lam) {
    std::vector<double> p(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) p[i] = d[i].inverse_virtual_value(lam);
    return p;
  };
  auto excess = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += 1.0 - d[i].cdf(d[i].inverse_virtual_value(lam));
    return target - s;  // increasing in lambda
  };
  const double lam = num::bisect_increasing(excess, 0.0, upper_support(d), 1e-15, 400);
  return at(lam);
}

inline double sales_of(const ProductDistribution& d, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += 1.0 - d[i].cdf(p[i]);
  return s;
}

inline double posted_revenue(const ProductDistribution& d, const std::vector<double>& p) {
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) r += num::pay(p[i], 1.0 - d[i].cdf(p[i]));
  return r;
}

}  // namespace pricing

struct EarResult {
  std::vector<double> prices;
  double revenue = 0.0;
};

// Optimal ex-ante relaxation: at most one sale in expectation.
inline EarResult ear_prices(const ProductDistribution& d) {
  pricing::require_regular(d);
  auto p = pricing::equalized_prices(d, 1.0);
  return {p, pricing::posted_revenue(d, p)};
}

// Drops agents with small EAR prices and scales the rest down so that any
// simultaneous full-externality equilibrium keeps a constant share of R.
inline Priced<Simple> exante_transform(const std::vector<double>& p_hat, double r) {
  const double cut = r / pricing::kC1;
  Simple out{std::vector<double>(p_hat.size(), kInf)};
  bool any = false;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    if (p_hat[i] >= cut) {
      out.v[i] = p_hat[i] / pricing::kC2;
      any = true;
    }
  }
  if (!any && r > 0.0) throw InternalConsistencyError("ex-ante transform kept no agent");
  return {out, {"exante_transform", 3.0 + 2.0 * std::numbers::sqrt2, "3+2*sqrt(2)", "R*_sim"}};
}

struct ProphetResult {
  double t = 0.0;
  std::vector<double> prices;
};

// Common virtual-value threshold t at which the item stays unsold with
// probability exactly 1/2.
inline ProphetResult prophet_prices(const ProductDistribution& d) {
  pricing::require_regular(d);
  auto unsold = [&](double t) {
    double prod = 1.0;
    for (const auto& x : d) prod *= x.cdf(x.inverse_virtual_value(t));
    return prod;
  };
  double lo = -1.0;
  for (int k = 0; k < 2000 && unsold(lo) > 0.5; ++k) lo *= 2.0;
  if (unsold(lo) > 0.5) throw UnsupportedError("no prophet threshold: sale probability stays below 1/2");
  const double hi = pricing::upper_support(d);
  const double t = num::bisect_increasing([&](double x) { return unsold(x) - 0.5; }, lo, hi, 0.0, 400);
  ProphetResult out{t, {}};
  for (const auto& x : d) out.prices.push_back(x.inverse_virtual_value(t));
  return out;
}

inline Scenario full_sequential(const ProductDistribution& d, std::vector<int> order) {
  if (order.empty())
    for (std::size_t i = 0; i < d.size(); ++i) order.push_back(static_cast<int>(i));
  Scenario s{d, Full{}, Sequential{std::move(order)}};
  s.validate();
  return s;
}

// Sequential full-externality prices whose equilibrium thresholds are the
// prophet prices.
inline Priced<Simple> seq_full_prices(const ProductDistribution& d, std::vector<int> order = {}) {
  const auto pi = prophet_prices(d);
  const auto s = full_sequential(d, std::move(order));
  auto p = std::get<Simple>(thresholds_to_prices(s, Simple{pi.prices}));
  return {p, {"seq_full_prices", 4.0, "4", "R*_seq"}};
}

// Revenue of one anonymous price when the first taker buys.
inline double anonymous_revenue(const ProductDistribution& d, double p) {
  double unsold = 1.0;
  for (const auto& x : d) unsold *= x.cdf(p);
  return p * (1.0 - unsold);
}

// Best single price over the EAR prices and a 10^4-point grid, polished by
// golden-section search around the winner.
inline double anonymous_price(const ProductDistribution& d) {
  pricing::require_regular(d);
  const double lo = pricing::lower_support(d), hi = pricing::upper_support(d);
  const int points = 10000;
  const double step = (hi - lo) / points;
  double best = lo, best_val = -1.0;
  auto consider = [&](double p) {
    const double v = anonymous_revenue(d, p);
    if (v > best_val) {
      best_val = v;
      best = p;
    }
  };
  for (double p : ear_prices(d).prices) consider(p);
  for (int k = 0; k <= points; ++k) consider(lo + step * k);
  const double a = std::max(lo, best - step), b = std::min(hi, best + step);
  consider(num::golden_max([&](double p) { return anonymous_revenue(d, p); }, a, b, 1e-13));
  return best;
}

inline Priced<Anonymous> halve_anonymous(double p) {
  return {Anonymous{p / 2.0}, {"anonymous_price", 4.0 * std::numbers::e, "4e", "R*_sim"}};
}

// Identical agents: half the common EAR price.
inline Priced<Anonymous> iid_nondiscriminatory(const ProductDistribution& d) {
  pricing::require_regular(d);
  for (const auto& x : d)
    if (!(x == d.front())) throw UnsupportedError("agents must be identically distributed");
  const double p_hat = ear_prices(d).prices.front();
  return {Anonymous{p_hat / 2.0}, {"iid_nondiscriminatory", 4.0, "4", "R*_sim"}};
}

inline Priced<Anonymous> iid_nondiscriminatory(const Distribution& d, std::size_t n) {
  return iid_nondiscriminatory(ProductDistribution(n, d));
}

// Monopoly prices discounted by the status weight.
inline Simple status_private_prices(const ProductDistribution& d, const std::vector<double>& w) {
  pricing::require_regular(d);
  if (w.size() != d.size()) throw DomainError("one status weight per agent is required");
  Simple p{std::vector<double>(d.size())};
  for (std::size_t i = 0; i < d.size(); ++i) p.v[i] = (1.0 - w[i]) * d[i].monopoly_price().first;
  return p;
}

// Sequential: prophet thresholds priced for the status model (both tiers
// equal). Simultaneous: half the best anonymous price.
inline Schedule status_public_prices(const ProductDistribution& d, const std::vector<double>& w, const Mode& mode) {
  pricing::require_regular(d);
  if (w.size() != d.size()) throw DomainError("one status weight per agent is required");
  if (const auto* seq = std::get_if<Sequential>(&mode)) {
    const auto t_hat = prophet_prices(d).prices;
    std::vector<double> p(d.size());
    double later = 1.0;
    for (std::size_t k = d.size(); k > 0; --k) {
      const auto a = static_cast<std::size_t>(seq->order[k - 1]);
      p[a] = (1.0 - w[a]) * t_hat[a] + w[a] * t_hat[a] * later;
      later *= d[a].cdf(t_hat[a]);
    }
    return TwoTier{p, p};
  }
  return halve_anonymous(anonymous_price(d)).prices;
}

struct BestOf {
  Schedule prices;
  double revenue = 0.0;
  std::string winner;
  GuaranteeTag tag;
  std::vector<std::pair<std::string, double>> candidates;
};

// Revenue used to rank candidates: the unique sequential equilibrium, or
// the worst scanned simultaneous equilibrium.
inline double ranking_revenue(const Scenario& s, const Schedule& p, int grid) {
  const auto eqs = equilibria(s, p, grid);
  double worst = kInf;
  for (const auto& e : eqs) worst = std::min(worst, e.revenue_low);
  return worst;
}

// Better of the private and public status prices (and, simultaneously, the
// ex-ante transformed EAR prices). Ties go to the earlier candidate.
inline BestOf status_best_of(const ProductDistribution& d, const std::vector<double>& w, const Mode& mode,
                             int grid = 10000) {
  Scenario s{d, StatusBased{w}, mode};
  s.validate();
  std::vector<std::pair<std::string, Schedule>> cands;
  const auto priv = status_private_prices(d, w);
  if (s.sequential()) {
    cands.emplace_back("private", TwoTier{priv.v, priv.v});
  } else {
    cands.emplace_back("private", priv);
  }
  cands.emplace_back("public", status_public_prices(d, w, mode));
  if (!s.sequential()) {
    const auto ear = ear_prices(d);
    cands.emplace_back("public_ear", exante_transform(ear.prices, ear.revenue).prices);
  }
  BestOf out;
  out.revenue = -kInf;
  for (auto& [name, p] : cands) {
    const double r = ranking_revenue(s, p, grid);
    out.candidates.emplace_back(name, r);
    if (r > out.revenue) {
      out.revenue = r;
      out.prices = p;
      out.winner = name;
    }
  }
  if (s.sequential()) {
    out.tag = {"status_best_of", 6.0, "6", "R*_seq"};
  } else {
    out.tag = {"status_best_of", 4.0 * std::numbers::e + 1.0, "4e+1", "R*_sim"};
  }
  return out;
}

// Two-tier prices from an adaptive schedule: its empty-history prices before
// any sale, discounted monopoly prices after one.
inline TwoTier two_tier_from_adaptive(const Adaptive& adaptive, const ProductDistribution& d,
                                      const std::vector<double>& w, std::vector<int> order = {}) {
  pricing::require_regular(d);
  const std::size_t n = d.size();
  if (order.empty())
    for (std::size_t i = 0; i < n; ++i) order.push_back(static_cast<int>(i));
  validate_schedule(adaptive, n);
  TwoTier out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(order[k]);
    out.zero[a] = adaptive.rows[k][0];
    out.positive[a] = (1.0 - w[a]) * d[a].monopoly_price().first;
  }
  return out;
}

// Ex-ante style prices for selling at most k units.
inline Simple k_uniform_prices(const ProductDistribution& d, std::size_t k) {
  pricing::require_regular(d);
  if (k < 1 || k > d.size()) throw DomainError("k must lie in [1, n]");
  return Simple{pricing::equalized_prices(d, static_cast<double>(k))};
}

struct GradualResult {
  CountIndexed prices;
  EquilibriumReport report;
  GuaranteeTag tag;
};

inline Scenario availability_sequential(const ProductDistribution& d, const std::vector<double>& w,
                                        std::vector<int> order) {
  if (order.empty())
    for (std::size_t i = 0; i < d.size(); ++i) order.push_back(static_cast<int>(i));
  Scenario s{d, AvailabilityBased{w}, Sequential{std::move(order)}};
  s.validate();
  return s;
}

// Count-indexed prices that sell to k-uniform thresholds while fewer than k
// units are gone and stop afterwards.
inline GradualResult availability_grad1(const ProductDistribution& d, const std::vector<double>& w, std::size_t k,
                                        std::vector<int> order = {}) {
  const auto s = availability_sequential(d, w, std::move(order));
  const auto p_hat = k_uniform_prices(d, k).v;
  const auto& ord = std::get<Sequential>(s.mode).order;
  const std::size_t n = d.size();
  CountIndexed t;
  for (std::size_t pos = 0; pos < n; ++pos) {
    t.rows.emplace_back(pos + 1, kInf);
    for (std::size_t j = 0; j <= pos && j < k; ++j) t.rows[pos][j] = p_hat[static_cast<std::size_t>(ord[pos])];
  }
  auto p = std::get<CountIndexed>(thresholds_to_prices(s, t));
  const double floor_w = availability_weight(std::get<AvailabilityBased>(s.externality), k);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const double floor = p_hat[static_cast<std::size_t>(ord[pos])] * (1.0 - floor_w);
    for (double x : p.rows[pos])
      if (x < floor - 1e-12) throw InternalConsistencyError("gradual price fell below its floor");
  }
  auto rep = solve_seq_availability(s, p);
  return {p, std::move(rep), {"availability_grad1", kInf, "O(1)", "MyerK"}};
}

// Prices that sell only while nothing has been sold, at prophet thresholds.
inline GradualResult availability_grad2(const ProductDistribution& d, const std::vector<double>& w,
                                        std::vector<int> order = {}) {
  const auto s = availability_sequential(d, w, std::move(order));
  const auto& ord = std::get<Sequential>(s.mode).order;
  const std::size_t n = d.size();
  const auto t_hat = prophet_prices(d).prices;
  const double w1 = availability_weight(std::get<AvailabilityBased>(s.externality), 1);
  const auto base = std::get<Simple>(thresholds_to_prices(full_sequential(d, ord), Simple{t_hat})).v;
  CountIndexed p;
  double later = 1.0;
  p.rows.resize(n);
  for (std::size_t pos = n; pos > 0; --pos) {
    const auto a = static_cast<std::size_t>(ord[pos - 1]);
    p.rows[pos - 1].assign(pos, kInf);
    p.rows[pos - 1][0] = t_hat[a] * (1.0 - w1 * (1.0 - later));
    if (p.rows[pos - 1][0] < base[a] - 1e-12)
      throw InternalConsistencyError("gradual price fell below the full-externality price");
    later *= d[a].cdf(t_hat[a]);
  }
  auto rep = solve_seq_availability(s, p);
  return {p, std::move(rep), {"availability_grad2", kInf, "O(1)", "MyerK"}};
}

struct BucketResult {
  CountIndexed prices;
  double revenue = 0.0;
  std::string winner;
  GuaranteeTag tag;
  std::vector<std::pair<std::string, double>> candidates;
};

// Best of the single-sale prices and the k-unit prices for k = 1, 2, 4, ...
inline BucketResult availability_best_bucket(const ProductDistribution& d, const std::vector<double>& w,
                                             std::vector<int> order = {}) {
  BucketResult out;
  out.revenue = -kInf;
  auto consider = [&](const std::string& name, GradualResult g) {
    out.candidates.emplace_back(name, g.report.revenue);
    if (g.report.revenue > out.revenue) {
      out.revenue = g.report.revenue;
      out.prices = std::move(g.prices);
      out.winner = name;
    }
  };
  consider("grad2", availability_grad2(d, w, order));
  for (std::size_t k = 1; k <= d.size(); k *= 2) consider("grad1_k" + std::to_string(k), availability_grad1(d, w, k, order));
  out.tag = {"availability_best_bucket", kInf, "O(log n)", "MyerK"};
  return out;
}

}  // namespace sgp

#endif  // SGP_PRICING_HPP_
