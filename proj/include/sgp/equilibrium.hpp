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

#ifndef SGP_EQUILIBRIUM_HPP_
#define SGP_EQUILIBRIUM_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sgp/distribution.hpp"
#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"
#include "sgp/scenario.hpp"

namespace sgp {

// Thresholds, purchase probabilities and revenue of one buyer equilibrium.
// Count tables are filled for the count- and history-indexed sequential
// solvers: q[k][j] is the probability that j sales happened before the k-th
// arrival (row n is the final count), and r[k][j][c] the probability that
// the final count is c given j sales before the k-th arrival.
struct EquilibriumReport {
  ThresholdProfile thresholds;
  std::vector<double> buy_probs;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<std::vector<double>>> r;
  double no_sale_prob = std::numeric_limits<double>::quiet_NaN();
  double revenue = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = true;
  bool degenerate = false;
  bool no_guarantee = false;
  // Set when this profile lies on a continuum of equilibria; the bounds are
  // the revenue extremes over that continuum.
  bool continuum = false;
  double revenue_low = std::numeric_limits<double>::quiet_NaN();
  double revenue_high = std::numeric_limits<double>::quiet_NaN();
  bool best = false;
  bool worst = false;
  std::vector<int> buyer_support;
};

namespace detail {

inline std::vector<double> identity_thresholds(std::size_t n, double v) {
  return std::vector<double>(n, v);
}

// p / denom where a vanishing denominator means "never buys" unless the
// price is also zero; the second member flags that 0/0 case.
inline std::pair<double, bool> threshold_from(double price, double denom) {
  if (std::isinf(price)) return {kInf, false};
  if (denom <= 0.0) {
    if (price > 0.0) return {kInf, false};
    return {0.0, true};
  }
  return {price / denom, false};
}

// Distribution of the number of buyers among independent agents, skipping
// `skip` (pass -1 to keep everyone).
inline std::vector<double> count_distribution(const std::vector<double>& buy, int skip) {
  std::vector<double> dist(buy.size() + 1, 0.0);
  dist[0] = 1.0;
  std::size_t top = 0;
  for (std::size_t j = 0; j < buy.size(); ++j) {
    if (static_cast<int>(j) == skip) continue;
    const double b = buy[j];
    ++top;
    for (std::size_t c = top; c > 0; --c) dist[c] = dist[c] * (1.0 - b) + dist[c - 1] * b;
    dist[0] *= 1.0 - b;
  }
  return dist;
}

inline double final_fraction(const ExternalityModel& m, int agent, std::size_t count) {
  if (count == 0) return 0.0;
  if (std::holds_alternative<Full>(m)) return 1.0;
  if (const auto* s = std::get_if<StatusBased>(&m)) return s->w[static_cast<std::size_t>(agent)];
  if (const auto* a = std::get_if<AvailabilityBased>(&m)) return availability_weight(*a, count);
  throw UnsupportedError("history-indexed sale needs a full, status or availability model");
}

}  // namespace detail

// E_{S ~ others}[x_i(S)] for each non-buying agent i when agent j stays out
// with probability q[j], independently.
inline std::vector<double> expected_fractions(const Scenario& s, const std::vector<double>& q) {
  const std::size_t n = s.n();
  std::vector<double> e(n, 0.0);
  std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * q[j];
  for (std::size_t j = n; j > 0; --j) suffix[j - 1] = suffix[j] * q[j - 1];
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t i = 0; i < n; ++i) {
          const double others_out = prefix[i] * suffix[i + 1];
          if constexpr (std::is_same_v<T, Full>) {
            e[i] = 1.0 - others_out;
          } else if constexpr (std::is_same_v<T, StatusBased>) {
            e[i] = m.w[i] * (1.0 - others_out);
          } else if constexpr (std::is_same_v<T, NetworkBased>) {
            double out = 1.0;
            for (int j : m.adj[i]) out *= q[static_cast<std::size_t>(j)];
            e[i] = 1.0 - out;
          } else {
            std::vector<double> buy(n);
            for (std::size_t j = 0; j < n; ++j) buy[j] = 1.0 - q[j];
            const auto dist = detail::count_distribution(buy, static_cast<int>(i));
            double acc = 0.0;
            for (std::size_t c = 1; c < n; ++c) acc += availability_weight(m, c) * dist[c];
            e[i] = acc;
          }
        }
      },
      s.externality);
  return e;
}

// Largest |T_i (1 - E_i) - p_i| over agents with finite thresholds, where E
// is evaluated at the no-buy probabilities F_j(T_j).
inline double sim_residual(const Scenario& s, const std::vector<double>& p,
                           const std::vector<double>& t) {
  const auto q = cdf_at(s.dists, t);
  const auto e = expected_fractions(s, q);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double denom = 1.0 - e[i];
    if (std::isinf(t[i])) {
      // Never buying is consistent when the price is not worth paying.
      if (std::isfinite(p[i]) && denom > 1e-12 && p[i] / denom < s.dists[i].hi() - 1e-9)
        worst = std::max(worst, std::abs(s.dists[i].hi() * denom - p[i]));
      continue;
    }
    worst = std::max(worst, std::abs(t[i] * denom - p[i]));
  }
  return worst;
}

inline double sim_revenue(const ProductDistribution& d, const std::vector<double>& p,
                          const std::vector<double>& t) {
  double rev = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) rev += num::pay(p[i], 1.0 - d[i].cdf(t[i]));
  return rev;
}

inline EquilibriumReport sim_report(const Scenario& s, const std::vector<double>& p,
                                    std::vector<double> t) {
  EquilibriumReport rep;
  rep.buy_probs.resize(s.n());
  double none = 1.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double u = s.dists[i].cdf(t[i]);
    rep.buy_probs[i] = 1.0 - u;
    none *= u;
  }
  rep.no_sale_prob = none;
  rep.revenue = sim_revenue(s.dists, p, t);
  rep.revenue_low = rep.revenue_high = rep.revenue;
  rep.residual = sim_residual(s, p, t);
  rep.thresholds = Simple{std::move(t)};
  return rep;
}

struct FixedPointOptions {
  double damping = 0.5;
  int max_iter = 100000;
  double tol = 1e-13;
  // Starting no-buy probabilities; defaults to F_i(p_i).
  std::vector<double> start;
};

// Damped iteration q <- (1 - a) q + a Phi(q) on no-buy probabilities, with
// Phi_i(q) = F_i(p_i / (1 - E_i(q))).
inline EquilibriumReport solve_sim_fixed_point(const Scenario& s, const Schedule& prices,
                                               const FixedPointOptions& opt = {}) {
  if (s.sequential()) throw DomainError("fixed-point solver needs a simultaneous scenario");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw DomainError("damping must lie in (0,1]");
  const std::size_t n = s.n();
  const auto p = per_agent(prices, n);
  std::vector<double> q = opt.start;
  if (q.empty()) {
    q.resize(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = s.dists[i].cdf(p[i]);
  }
  if (q.size() != n) throw DomainError("start vector has the wrong length");
  auto phi = [&](const std::vector<double>& cur) {
    const auto e = expected_fractions(s, cur);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = s.dists[i].cdf(num::safe_ratio(p[i], 1.0 - e[i]));
    return out;
  };
  double res = kInf;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const auto next = phi(q);
    res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(next[i] - q[i]));
    if (res <= opt.tol) break;
    for (std::size_t i = 0; i < n; ++i) q[i] = (1.0 - opt.damping) * q[i] + opt.damping * next[i];
  }
  if (res > opt.tol) throw NonConvergenceError("fixed-point iteration did not converge", res, it);
  const auto e = expected_fractions(s, q);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = num::safe_ratio(p[i], 1.0 - e[i]);
  auto rep = sim_report(s, p, std::move(t));
  rep.iterations = it;
  rep.no_guarantee = std::holds_alternative<AvailabilityBased>(s.externality);
  return rep;
}

namespace detail {

// One agent's response in the aggregate parameterisation: at aggregate
// no-sale probability P the agent's own no-buy probability u must satisfy
// P = g(u) = u (p / Q(u) - (1 - w)) / w.
struct Piece {
  enum class Kind { kCurve, kVertical, kFixed, kFree };
  Kind kind = Kind::kCurve;
  double p_lo = 0.0;
  double p_hi = 0.0;
  // kCurve: samples sorted by g, with the u bracket for exact inversion.
  std::vector<double> gs, us;
  double ua = 0.0, ub = 0.0;
  bool increasing = true;
  // kFixed / kVertical: the constant u. kFree: upper bound on u.
  double u = 1.0;
};

struct ScanAgent {
  const Distribution* dist = nullptr;
  double price = 0.0;
  double w = 1.0;
  double slope = 0.0;  // c for a CDF equal to c*v near 0, or 0
  double free_top = 0.0;  // F at the end of that linear stretch
  std::vector<Piece> pieces;

  double g(double u) const {
    const double t = dist->quantile(u);
    return u * (price / t - (1.0 - w)) / w;
  }
  // Threshold for own no-buy probability u at aggregate P.
  double threshold(const Piece& pc, double u, double agg) const {
    switch (pc.kind) {
      case Piece::Kind::kFixed:
        return std::isinf(price) ? kInf : price;
      case Piece::Kind::kVertical:
        return price / ((1.0 - w) + w * agg);
      default:
        return dist->quantile(u);
    }
  }
  double invert(const Piece& pc, double agg, bool exact) const {
    switch (pc.kind) {
      case Piece::Kind::kFixed:
      case Piece::Kind::kVertical:
        return pc.u;
      case Piece::Kind::kFree:
        return kInf;
      default:
        break;
    }
    if (!exact) {
      auto it = std::lower_bound(pc.gs.begin(), pc.gs.end(), agg);
      if (it == pc.gs.begin()) return pc.us.front();
      if (it == pc.gs.end()) return pc.us.back();
      const auto k = static_cast<std::size_t>(it - pc.gs.begin());
      const double g0 = pc.gs[k - 1], g1 = pc.gs[k];
      const double a = g1 > g0 ? (agg - g0) / (g1 - g0) : 0.0;
      return pc.us[k - 1] + a * (pc.us[k] - pc.us[k - 1]);
    }
    const double sign = pc.increasing ? 1.0 : -1.0;
    return num::bisect_increasing([&](double u) { return sign * (g(u) - agg); }, pc.ua, pc.ub,
                                  1e-16, 400);
  }
};

// Whether F(v) = c v on [0, v1] for some v1 > 0; returns c and F(v1).
inline std::pair<double, double> linear_origin(const Distribution& d) {
  if (d.lo() != 0.0) return {0.0, 0.0};
  return std::visit(
      [&](const auto& f) -> std::pair<double, double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {1.0 / f.b, 1.0};
        } else if constexpr (std::is_same_v<T, ShiftedPower>) {
          if (f.ell == 1.0) return {1.0 / (1.0 + f.eps), 1.0};
        } else if constexpr (std::is_same_v<T, ComplementPower>) {
          if (f.k == 1.0) return {1.0, 1.0};
        } else {
          const auto& [v1, f1] = f.points[1];
          return {f1 / v1, f1};
        }
        return {0.0, 0.0};
      },
      d.family());
}

inline std::vector<double> u_grid(int resolution) {
  std::vector<double> u;
  const int m = std::max(200, resolution / 5);
  for (int k = 1; k < m; ++k) u.push_back(static_cast<double>(k) / m);
  for (int e = 3; e <= 12; ++e) {
    for (double mant : {1.0, 3.0}) {
      u.push_back(mant * std::pow(10.0, -e));
      u.push_back(1.0 - mant * std::pow(10.0, -e));
    }
  }
  u.push_back(1e-14);
  u.push_back(1.0 - 1e-14);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

inline void build_pieces(ScanAgent& a, const std::vector<double>& grid) {
  using K = Piece::Kind;
  if (std::isinf(a.price)) {
    a.pieces.push_back({K::kFixed, 0.0, 1.0, {}, {}, 0, 0, true, 1.0});
    return;
  }
  if (a.w == 0.0) {
    const double u = a.dist->cdf(a.price);
    if (u > 0.0) a.pieces.push_back({K::kFixed, 0.0, 1.0, {}, {}, 0, 0, true, u});
    return;
  }
  const double top = (a.price / a.dist->hi() - (1.0 - a.w)) / a.w;
  if (top > 0.0) a.pieces.push_back({K::kVertical, 0.0, std::min(top, 1.0), {}, {}, 0, 0, true, 1.0});

  double u_start = 0.0;
  if (a.w == 1.0) {
    const auto [c, ftop] = linear_origin(*a.dist);
    if (c > 0.0) {
      a.slope = c;
      a.free_top = ftop;
      const double star = a.price * c;
      if (star > 0.0 && star <= 1.0) {
        Piece pc{K::kFree, star, star, {}, {}, 0, 0, true, ftop};
        a.pieces.push_back(pc);
      }
      u_start = ftop;
    }
  }
  // Monotone runs of g on the open interval (u_start, 1).
  std::vector<double> us, gs;
  for (double u : grid) {
    if (u <= u_start) continue;
    us.push_back(u);
    gs.push_back(a.g(u));
  }
  std::size_t begin = 0;
  while (begin + 1 < us.size()) {
    const bool inc = gs[begin + 1] >= gs[begin];
    std::size_t end = begin + 1;
    while (end + 1 < us.size() && ((gs[end + 1] >= gs[end]) == inc)) ++end;
    Piece pc;
    pc.kind = K::kCurve;
    pc.increasing = inc;
    pc.ua = us[begin];
    pc.ub = us[end];
    for (std::size_t k = begin; k <= end; ++k) {
      pc.gs.push_back(gs[k]);
      pc.us.push_back(us[k]);
    }
    if (!inc) {
      std::reverse(pc.gs.begin(), pc.gs.end());
      std::reverse(pc.us.begin(), pc.us.end());
    }
    pc.p_lo = pc.gs.front();
    pc.p_hi = pc.gs.back();
    if (pc.p_hi > 0.0 && pc.p_lo <= 1.0) a.pieces.push_back(std::move(pc));
    begin = end;
  }
}

struct Found {
  std::vector<double> t;
  bool continuum = false;
  double low = 0.0, high = 0.0;
};

inline bool same_profile(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isinf(a[i]) != std::isinf(b[i])) return false;
    if (std::isfinite(a[i]) && std::abs(a[i] - b[i]) > 1e-7 * std::max(1.0, std::abs(a[i])))
      return false;
  }
  return true;
}

}  // namespace detail

// Enumerates simultaneous equilibria of a full or status model by scanning
// the aggregate no-sale probability P. Reports are tagged best/worst by
// revenue; a continuum contributes its two revenue-extreme profiles.
inline std::vector<EquilibriumReport> scan_sim_equilibria(const Scenario& s, const Schedule& prices,
                                                          int grid = 10000) {
  if (s.sequential()) throw DomainError("equilibrium scan needs a simultaneous scenario");
  const bool full = std::holds_alternative<Full>(s.externality);
  const auto* status = std::get_if<StatusBased>(&s.externality);
  if (!full && !status) throw UnsupportedError("equilibrium scan needs a full or status model");
  if (!all_regular(s.dists)) throw UnsupportedError("equilibrium scan needs regular laws");
  const std::size_t n = s.n();
  const auto p = per_agent(prices, n);
  auto weight = [&](std::size_t i) { return full ? 1.0 : status->w[i]; };

  for (int attempt = 0; attempt < 2; ++attempt) {
    const int res = attempt == 0 ? grid : grid * 4;
    const auto ugrid = detail::u_grid(res);
    std::vector<detail::ScanAgent> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
      agents[i].dist = &s.dists[i];
      agents[i].price = p[i];
      agents[i].w = weight(i);
      detail::build_pieces(agents[i], ugrid);
    }
    std::vector<detail::Found> found;
    auto add = [&](detail::Found f) {
      for (auto& g : found)
        if (g.continuum == f.continuum && detail::same_profile(g.t, f.t)) return;
      found.push_back(std::move(f));
    };

    // Equilibria where some agent buys for sure, so the aggregate is zero.
    {
      std::vector<double> t0(n);
      std::vector<int> sure;
      for (std::size_t j = 0; j < n; ++j) {
        t0[j] = detail::threshold_from(p[j], 1.0 - weight(j)).first;
        if (s.dists[j].cdf(t0[j]) == 0.0) sure.push_back(static_cast<int>(j));
      }
      if (sure.size() >= 2) {
        add({t0});
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          bool others_ok = true;
          double others = 1.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double u = s.dists[j].cdf(t0[j]);
            if (u == 0.0) others_ok = false;
            others *= u;
          }
          if (!others_ok) continue;
          const double ti = detail::threshold_from(p[i], (1.0 - weight(i)) + weight(i) * others).first;
          if (s.dists[i].cdf(ti) == 0.0) {
            auto t = t0;
            t[i] = ti;
            add({t});
          }
        }
      }
    }

    // Aggregates in (0, 1]: walk every combination of response pieces.
    std::vector<std::size_t> pick(n, 0);
    bool any_empty = false;
    for (const auto& a : agents) any_empty = any_empty || a.pieces.empty();
    while (!any_empty) {
      double lo = 0.0, hi = 1.0;
      double star = -1.0;
      bool ok = true;
      std::vector<std::size_t> free_idx;
      for (std::size_t i = 0; i < n && ok; ++i) {
        const auto& pc = agents[i].pieces[pick[i]];
        lo = std::max(lo, pc.p_lo);
        hi = std::min(hi, pc.p_hi);
        if (pc.kind == detail::Piece::Kind::kFree) {
          free_idx.push_back(i);
          if (star >= 0.0 && std::abs(star - pc.p_lo) > 1e-15) ok = false;
          star = pc.p_lo;
        }
      }
      if (ok && lo <= hi) {
        auto profile_at = [&](double agg, std::vector<double>& u, bool exact) {
          for (std::size_t i = 0; i < n; ++i)
            u[i] = agents[i].invert(agents[i].pieces[pick[i]], agg, exact);
        };
        auto thresholds_at = [&](double agg, const std::vector<double>& u) {
          std::vector<double> t(n);
          for (std::size_t i = 0; i < n; ++i)
            t[i] = agents[i].threshold(agents[i].pieces[pick[i]], u[i], agg);
          return t;
        };
        std::vector<double> u(n);
        if (free_idx.empty()) {
          auto gamma = [&](double agg, bool exact) {
            profile_at(agg, u, exact);
            double prod = 1.0;
            for (double x : u) prod *= x;
            return prod - agg;
          };
          auto accept = [&](double agg) {
            profile_at(agg, u, true);
            auto t = thresholds_at(agg, u);
            if (sim_residual(s, p, t) <= 1e-9) add({t});
          };
          const double lo_eff = std::max(lo, 1e-300);
          const int steps = std::max(16, static_cast<int>(res * (hi - lo_eff)));
          double prev_x = lo_eff;
          double prev = gamma(lo_eff, false);
          if (std::abs(gamma(lo_eff, true)) <= 1e-13) accept(lo_eff);
          for (int k = 1; k <= steps; ++k) {
            const double x = lo_eff + (hi - lo_eff) * k / steps;
            const double cur = gamma(x, false);
            if (cur == 0.0 || (cur < 0.0) != (prev < 0.0)) {
              const double root = num::bisect_sign_change(
                  [&](double a) { return gamma(a, true); }, prev_x, x, 1e-16, 400);
              accept(root);
            }
            prev = cur;
            prev_x = x;
          }
          if (std::abs(gamma(hi, true)) <= 1e-13) accept(hi);
        } else {
          profile_at(star, u, true);
          double fixed = 1.0;
          double cap = 1.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (agents[i].pieces[pick[i]].kind == detail::Piece::Kind::kFree) {
              cap *= agents[i].pieces[pick[i]].u;
            } else {
              fixed *= u[i];
            }
          }
          const double c = fixed > 0.0 ? star / fixed : kInf;
          if (c > 0.0 && c <= cap * (1.0 + 1e-12)) {
            auto finish = [&](const std::vector<double>& uu) {
              auto t = thresholds_at(star, uu);
              for (std::size_t f : free_idx) t[f] = uu[f] / agents[f].slope;
              return t;
            };
            if (free_idx.size() == 1 || c >= cap * (1.0 - 1e-12)) {
              for (std::size_t f : free_idx)
                u[f] = free_idx.size() == 1 ? c : agents[f].pieces[pick[f]].u;
              auto t = finish(u);
              if (sim_residual(s, p, t) <= 1e-9) add({t});
            } else {
              // Best revenue minimises sum p_f u_f on prod u_f = c.
              auto best = u;
              const double log_c = std::log(c);
              const double lam = std::exp(num::bisect_increasing(
                  [&](double ll) {
                    double acc = 0.0;
                    for (std::size_t f : free_idx) {
                      const double top = agents[f].pieces[pick[f]].u;
                      acc += std::log(std::min(top, std::exp(ll) / p[f]));
                    }
                    return acc - log_c;
                  },
                  -800.0, 800.0, 1e-15, 400));
              for (std::size_t f : free_idx)
                best[f] = std::min(agents[f].pieces[pick[f]].u, lam / p[f]);
              // Worst revenue sits at a vertex: all but one free agent at the cap.
              std::vector<double> worst;
              double worst_rev = kInf;
              for (std::size_t g : free_idx) {
                auto cand = u;
                double others = 1.0;
                for (std::size_t f : free_idx) {
                  if (f == g) continue;
                  cand[f] = agents[f].pieces[pick[f]].u;
                  others *= cand[f];
                }
                cand[g] = c / others;
                if (cand[g] > agents[g].pieces[pick[g]].u * (1.0 + 1e-12)) continue;
                const double rev = sim_revenue(s.dists, p, finish(cand));
                if (rev < worst_rev) {
                  worst_rev = rev;
                  worst = cand;
                }
              }
              const auto tb = finish(best);
              const double best_rev = sim_revenue(s.dists, p, tb);
              if (!worst.empty()) {
                const auto tw = finish(worst);
                if (sim_residual(s, p, tb) <= 1e-9) add({tb, true, worst_rev, best_rev});
                if (sim_residual(s, p, tw) <= 1e-9) add({tw, true, worst_rev, best_rev});
              }
            }
          }
        }
      }
      std::size_t i = 0;
      while (i < n && ++pick[i] == agents[i].pieces.size()) pick[i++] = 0;
      if (i == n) break;
    }

    if (found.empty()) continue;
    std::vector<EquilibriumReport> out;
    for (auto& f : found) {
      auto rep = sim_report(s, p, f.t);
      if (f.continuum) {
        rep.continuum = true;
        rep.revenue_low = f.low;
        rep.revenue_high = f.high;
      }
      out.push_back(std::move(rep));
    }
    std::size_t lo_i = 0, hi_i = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].revenue_low < out[lo_i].revenue_low) lo_i = k;
      if (out[k].revenue_high > out[hi_i].revenue_high) hi_i = k;
    }
    out[lo_i].worst = true;
    out[hi_i].best = true;
    return out;
  }
  throw InternalConsistencyError("equilibrium scan found no equilibrium");
}

// Sequential sale under full externalities: only the first purchase matters.
inline EquilibriumReport solve_seq_full(const Scenario& s, const Schedule& prices) {
  const auto* seq = std::get_if<Sequential>(&s.mode);
  if (!seq || !std::holds_alternative<Full>(s.externality))
    throw DomainError("solve_seq_full needs a sequential full scenario");
  const std::size_t n = s.n();
  const auto p = per_agent(prices, n);
  const auto& ord = seq->order;
  std::vector<double> t(n), u(n);
  double later = 1.0;
  for (std::size_t k = n; k > 0; --k) {
    const auto a = static_cast<std::size_t>(ord[k - 1]);
    t[a] = std::isinf(p[a]) ? kInf : num::safe_ratio(p[a], later);
    u[a] = s.dists[a].cdf(t[a]);
    later *= u[a];
  }
  EquilibriumReport rep;
  rep.buy_probs.assign(n, 0.0);
  double before = 1.0;
  for (int a : ord) {
    const auto i = static_cast<std::size_t>(a);
    rep.buy_probs[i] = before * (1.0 - u[i]);
    before *= u[i];
  }
  rep.no_sale_prob = before;
  // Revenue in threshold form: sum T_i prod_{j != i} F_j (1 - F_i).
  double rev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] >= 1.0) continue;
    double others = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others *= u[j];
    rev += t[i] * others * (1.0 - u[i]);
  }
  rep.revenue = rep.revenue_low = rep.revenue_high = rev;
  rep.thresholds = Simple{std::move(t)};
  return rep;
}

// Two-tier sequential sale under status externalities.
inline EquilibriumReport solve_seq_status(const Scenario& s, const Schedule& prices) {
  const auto* seq = std::get_if<Sequential>(&s.mode);
  const auto* st = std::get_if<StatusBased>(&s.externality);
  if (!seq || !st) throw DomainError("solve_seq_status needs a sequential status scenario");
  const std::size_t n = s.n();
  TwoTier p;
  if (const auto* tt = std::get_if<TwoTier>(&prices)) {
    p = *tt;
  } else {
    const auto v = per_agent(prices, n);
    p = {v, v};
  }
  validate_schedule(p, n);
  EquilibriumReport rep;
  TwoTier t{std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> u0(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [tp, deg] = detail::threshold_from(p.positive[i], 1.0 - st->w[i]);
    t.positive[i] = tp;
    rep.degenerate = rep.degenerate || deg;
    up[i] = s.dists[i].cdf(tp);
  }
  double later = 1.0;
  for (std::size_t k = n; k > 0; --k) {
    const auto a = static_cast<std::size_t>(seq->order[k - 1]);
    auto [tz, deg] = detail::threshold_from(p.zero[a], (1.0 - st->w[a]) + st->w[a] * later);
    t.zero[a] = tz;
    rep.degenerate = rep.degenerate || deg;
    u0[a] = s.dists[a].cdf(tz);
    later *= u0[a];
  }
  rep.buy_probs.assign(n, 0.0);
  double q0 = 1.0;
  double rev = 0.0;
  for (int ai : seq->order) {
    const auto a = static_cast<std::size_t>(ai);
    rep.buy_probs[a] = q0 * (1.0 - u0[a]) + (1.0 - q0) * (1.0 - up[a]);
    rev += q0 * num::pay(p.zero[a], 1.0 - u0[a]) + (1.0 - q0) * num::pay(p.positive[a], 1.0 - up[a]);
    q0 *= u0[a];
  }
  rep.no_sale_prob = q0;
  rep.revenue = rep.revenue_low = rep.revenue_high = rev;
  rep.thresholds = std::move(t);
  return rep;
}

// Expands a schedule into count-indexed rows by arrival position.
inline CountIndexed to_count_indexed(const Scenario& s, const Schedule& sched) {
  const std::size_t n = s.n();
  const auto ord = s.order();
  if (const auto* c = std::get_if<CountIndexed>(&sched)) {
    validate_schedule(*c, n);
    return *c;
  }
  CountIndexed out;
  out.rows.resize(n);
  if (const auto* tt = std::get_if<TwoTier>(&sched)) {
    validate_schedule(*tt, n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto a = static_cast<std::size_t>(ord[k]);
      out.rows[k].assign(k + 1, tt->positive[a]);
      out.rows[k][0] = tt->zero[a];
    }
    return out;
  }
  if (std::holds_alternative<Adaptive>(sched))
    throw UnsupportedError("a history-indexed schedule is not count-indexed");
  const auto v = per_agent(sched, n);
  for (std::size_t k = 0; k < n; ++k) out.rows[k].assign(k + 1, v[static_cast<std::size_t>(ord[k])]);
  return out;
}

// Expands a schedule into history-indexed rows by arrival position.
inline Adaptive to_adaptive(const Scenario& s, const Schedule& sched) {
  const std::size_t n = s.n();
  if (const auto* a = std::get_if<Adaptive>(&sched)) {
    validate_schedule(*a, n);
    return *a;
  }
  if (n > 20) throw DomainError("history-indexed schedules are limited to 20 agents");
  const auto c = to_count_indexed(s, sched);
  Adaptive out;
  out.rows.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.rows[k].resize(std::size_t{1} << k);
    for (std::size_t h = 0; h < out.rows[k].size(); ++h)
      out.rows[k][h] = c.rows[k][static_cast<std::size_t>(std::popcount(h))];
  }
  return out;
}

// Count-indexed sequential sale under availability externalities.
inline EquilibriumReport solve_seq_availability(const Scenario& s, const Schedule& prices) {
  const auto* seq = std::get_if<Sequential>(&s.mode);
  const auto* av = std::get_if<AvailabilityBased>(&s.externality);
  if (!seq || !av) throw DomainError("solve_seq_availability needs a sequential availability scenario");
  const std::size_t n = s.n();
  const auto p = to_count_indexed(s, prices);
  EquilibriumReport rep;
  CountIndexed t;
  t.rows.resize(n);
  std::vector<std::vector<double>> u(n);
  rep.r.assign(n + 1, {});
  rep.r[n].assign(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j <= n; ++j) rep.r[n][j][j] = 1.0;
  for (std::size_t k = n; k > 0; --k) {
    const std::size_t row = k - 1;
    const auto a = static_cast<std::size_t>(seq->order[row]);
    t.rows[row].resize(row + 1);
    u[row].resize(row + 1);
    rep.r[row].assign(row + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j <= row; ++j) {
      const auto& next = rep.r[row + 1][j];
      double e = 0.0;
      for (std::size_t c = j; c < n; ++c) e += availability_weight(*av, c) * next[c];
      auto [tj, deg] = detail::threshold_from(p.rows[row][j], 1.0 - e);
      rep.degenerate = rep.degenerate || deg;
      t.rows[row][j] = tj;
      const double uj = s.dists[a].cdf(tj);
      u[row][j] = uj;
      for (std::size_t c = 0; c <= n; ++c)
        rep.r[row][j][c] = uj * next[c] + (1.0 - uj) * rep.r[row + 1][j + 1][c];
    }
  }
  rep.q.assign(n + 1, {});
  rep.q[0] = {1.0};
  rep.buy_probs.assign(n, 0.0);
  double rev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(seq->order[k]);
    rep.q[k + 1].assign(k + 2, 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
      const double stay = rep.q[k][j] * u[k][j];
      const double buy = rep.q[k][j] * (1.0 - u[k][j]);
      rep.q[k + 1][j] += stay;
      rep.q[k + 1][j + 1] += buy;
      rep.buy_probs[a] += buy;
      rev += rep.q[k][j] * num::pay(p.rows[k][j], 1.0 - u[k][j]);
    }
  }
  rep.no_sale_prob = rep.q[n][0];
  rep.revenue = rep.revenue_low = rep.revenue_high = rev;
  rep.thresholds = std::move(t);
  return rep;
}

// History-indexed sequential sale (full, status or availability model) by
// backward induction over purchase histories.
inline EquilibriumReport solve_seq_adaptive(const Scenario& s, const Schedule& prices) {
  const auto* seq = std::get_if<Sequential>(&s.mode);
  if (!seq) throw DomainError("solve_seq_adaptive needs a sequential scenario");
  const std::size_t n = s.n();
  if (n > 16) throw DomainError("history-indexed solver is limited to 16 agents");
  const auto p = to_adaptive(s, prices);
  // dist[k][h][c]: final-count law from the k-th arrival on, after history h.
  std::vector<std::vector<std::vector<double>>> dist(n + 1);
  dist[n].resize(std::size_t{1} << n);
  Adaptive t;
  t.rows.resize(n);
  std::vector<std::vector<double>> u(n);
  EquilibriumReport rep;
  auto final_law = [&](std::size_t k, std::size_t h) -> const std::vector<double>& {
    auto& slot = dist[k][h];
    if (k == n && slot.empty()) {
      slot.assign(n + 1, 0.0);
      slot[static_cast<std::size_t>(std::popcount(h))] = 1.0;
    }
    return slot;
  };
  for (std::size_t k = n; k > 0; --k) {
    const std::size_t row = k - 1;
    const int a = seq->order[row];
    const std::size_t hs = std::size_t{1} << row;
    dist[row].assign(hs, {});
    t.rows[row].resize(hs);
    u[row].resize(hs);
    for (std::size_t h = 0; h < hs; ++h) {
      const auto& skip = final_law(row + 1, h);
      const auto& take = final_law(row + 1, h | hs);
      double e = 0.0;
      for (std::size_t c = 0; c <= n; ++c)
        if (skip[c] != 0.0) e += detail::final_fraction(s.externality, a, c) * skip[c];
      auto [th, deg] = detail::threshold_from(p.rows[row][h], 1.0 - e);
      rep.degenerate = rep.degenerate || deg;
      t.rows[row][h] = th;
      const double uh = s.dists[static_cast<std::size_t>(a)].cdf(th);
      u[row][h] = uh;
      auto& out = dist[row][h];
      out.resize(n + 1);
      for (std::size_t c = 0; c <= n; ++c) out[c] = uh * skip[c] + (1.0 - uh) * take[c];
    }
    dist[row + 1].clear();
    dist[row + 1].shrink_to_fit();
  }
  std::vector<double> reach{1.0};
  rep.q.assign(n + 1, {});
  rep.buy_probs.assign(n, 0.0);
  double rev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(seq->order[k]);
    const std::size_t hs = std::size_t{1} << k;
    rep.q[k].assign(k + 1, 0.0);
    std::vector<double> next(hs * 2, 0.0);
    for (std::size_t h = 0; h < hs; ++h) {
      rep.q[k][static_cast<std::size_t>(std::popcount(h))] += reach[h];
      const double buy = reach[h] * (1.0 - u[k][h]);
      next[h] += reach[h] * u[k][h];
      next[h | hs] += buy;
      rep.buy_probs[a] += buy;
      rev += reach[h] * num::pay(p.rows[k][h], 1.0 - u[k][h]);
    }
    reach = std::move(next);
  }
  rep.q[n].assign(n + 1, 0.0);
  for (std::size_t h = 0; h < reach.size(); ++h)
    rep.q[n][static_cast<std::size_t>(std::popcount(h))] += reach[h];
  rep.no_sale_prob = reach[0];
  rep.revenue = rep.revenue_low = rep.revenue_high = rev;
  rep.thresholds = std::move(t);
  return rep;
}

// Greedy equilibrium for network externalities with uniform [0,1] values:
// agents in ascending price order join an independent buyer support.
inline EquilibriumReport solve_network_sim_greedy(const NetworkBased& g, const Schedule& prices,
                                                  const ProductDistribution& dists) {
  const std::size_t n = g.adj.size();
  if (dists.size() != n) throw DomainError("one distribution per node is required");
  for (const auto& d : dists)
    if (!(d == Distribution::uniform(0.0, 1.0)))
      throw UnsupportedError("greedy network equilibrium needs uniform [0,1] values");
  const auto p = per_agent(prices, n);
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return p[static_cast<std::size_t>(a)] < p[static_cast<std::size_t>(b)];
  });
  std::vector<bool> in(n, false);
  std::vector<int> support;
  for (int i : idx) {
    bool free = true;
    for (int j : g.adj[static_cast<std::size_t>(i)]) free = free && !in[static_cast<std::size_t>(j)];
    if (free) {
      in[static_cast<std::size_t>(i)] = true;
      support.push_back(i);
    }
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i]) {
      t[i] = p[i];
      continue;
    }
    // A cheaper neighbour is in the support, so this ratio is at least 1.
    double out = 1.0;
    for (int j : g.adj[i])
      if (in[static_cast<std::size_t>(j)]) out *= dists[static_cast<std::size_t>(j)].cdf(p[static_cast<std::size_t>(j)]);
    t[i] = num::safe_ratio(p[i], out);
  }
  Scenario s{dists, g, Simultaneous{}};
  auto rep = sim_report(s, p, std::move(t));
  std::sort(support.begin(), support.end());
  rep.buyer_support = std::move(support);
  return rep;
}

// Subgame-perfect buyers for network externalities with every value equal
// to 1, by the reverse-order greedy rule. order lists agents by arrival.
inline std::vector<int> solve_network_seq_fixed_values(const NetworkBased& g, const std::vector<double>& p,
                                                       std::vector<int> order = {}) {
  const std::size_t n = g.adj.size();
  if (p.size() != n) throw DomainError("one price per node is required");
  if (order.empty())
    for (std::size_t i = 0; i < n; ++i) order.push_back(static_cast<int>(i));
  for (double x : p)
    if (x == 1.0) throw DomainError("a price equal to the common value leaves ties undefined");
  std::vector<bool> in(n, false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto i = static_cast<std::size_t>(*it);
    if (!(p[i] < 1.0)) continue;
    bool free = true;
    for (int j : g.adj[i]) free = free && !in[static_cast<std::size_t>(j)];
    if (free) in[i] = true;
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) out.push_back(static_cast<int>(i));
  return out;
}

// Inverse of the price-to-threshold map.
inline PriceSchedule thresholds_to_prices(const Scenario& s, const ThresholdProfile& t) {
  const std::size_t n = s.n();
  auto price_of = [](double th, double denom) {
    if (std::isinf(th)) return kInf;
    return th * denom;
  };
  if (!s.sequential()) {
    const auto tv = per_agent(t, n);
    const auto e = expected_fractions(s, cdf_at(s.dists, tv));
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = price_of(tv[i], 1.0 - e[i]);
    return Simple{p};
  }
  const auto& ord = std::get<Sequential>(s.mode).order;
  if (std::holds_alternative<Full>(s.externality) &&
      (std::holds_alternative<Simple>(t) || std::holds_alternative<Anonymous>(t))) {
    const auto tv = per_agent(t, n);
    std::vector<double> p(n);
    double later = 1.0;
    for (std::size_t k = n; k > 0; --k) {
      const auto a = static_cast<std::size_t>(ord[k - 1]);
      p[a] = price_of(tv[a], later);
      later *= s.dists[a].cdf(tv[a]);
    }
    return Simple{p};
  }
  if (const auto* st = std::get_if<StatusBased>(&s.externality);
      st && !std::holds_alternative<CountIndexed>(t) && !std::holds_alternative<Adaptive>(t)) {
    TwoTier tt;
    if (const auto* x = std::get_if<TwoTier>(&t)) {
      tt = *x;
    } else {
      const auto v = per_agent(t, n);
      tt = {v, v};
    }
    TwoTier p{std::vector<double>(n), std::vector<double>(n)};
    double later = 1.0;
    for (std::size_t k = n; k > 0; --k) {
      const auto a = static_cast<std::size_t>(ord[k - 1]);
      p.positive[a] = price_of(tt.positive[a], 1.0 - st->w[a]);
      p.zero[a] = price_of(tt.zero[a], (1.0 - st->w[a]) + st->w[a] * later);
      later *= s.dists[a].cdf(tt.zero[a]);
    }
    return p;
  }
  if (const auto* av = std::get_if<AvailabilityBased>(&s.externality);
      av && !std::holds_alternative<Adaptive>(t)) {
    const auto tc = to_count_indexed(s, t);
    CountIndexed p;
    p.rows.resize(n);
    std::vector<std::vector<double>> next(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j <= n; ++j) next[j][j] = 1.0;
    for (std::size_t k = n; k > 0; --k) {
      const std::size_t row = k - 1;
      const auto a = static_cast<std::size_t>(ord[row]);
      p.rows[row].resize(row + 1);
      std::vector<std::vector<double>> cur(row + 1, std::vector<double>(n + 1, 0.0));
      for (std::size_t j = 0; j <= row; ++j) {
        double e = 0.0;
        for (std::size_t c = j; c < n; ++c) e += availability_weight(*av, c) * next[j][c];
        p.rows[row][j] = price_of(tc.rows[row][j], 1.0 - e);
        const double uj = s.dists[a].cdf(tc.rows[row][j]);
        for (std::size_t c = 0; c <= n; ++c) cur[j][c] = uj * next[j][c] + (1.0 - uj) * next[j + 1][c];
      }
      next = std::move(cur);
    }
    return p;
  }
  if (const auto* ad = std::get_if<Adaptive>(&t);
      ad && !std::holds_alternative<NetworkBased>(s.externality)) {
    validate_schedule(*ad, n);
    Adaptive p;
    p.rows.resize(n);
    std::vector<std::vector<double>> next(std::size_t{1} << n);
    for (std::size_t h = 0; h < next.size(); ++h) {
      next[h].assign(n + 1, 0.0);
      next[h][static_cast<std::size_t>(std::popcount(h))] = 1.0;
    }
    for (std::size_t k = n; k > 0; --k) {
      const std::size_t row = k - 1;
      const int a = ord[row];
      const std::size_t hs = std::size_t{1} << row;
      p.rows[row].resize(hs);
      std::vector<std::vector<double>> cur(hs, std::vector<double>(n + 1));
      for (std::size_t h = 0; h < hs; ++h) {
        double e = 0.0;
        for (std::size_t c = 0; c <= n; ++c) e += detail::final_fraction(s.externality, a, c) * next[h][c];
        const double th = ad->rows[row][h];
        p.rows[row][h] = price_of(th, 1.0 - e);
        const double uh = s.dists[static_cast<std::size_t>(a)].cdf(th);
        for (std::size_t c = 0; c <= n; ++c) cur[h][c] = uh * next[h][c] + (1.0 - uh) * next[h | hs][c];
      }
      next = std::move(cur);
    }
    return p;
  }
  throw UnsupportedError("no threshold-to-price map for this model, mode and shape");
}

// Every equilibrium the library can compute for (s, p): the scan for
// simultaneous full/status, the greedy construction for uniform networks,
// the fixed point otherwise, and the unique profile for sequential sales.
inline std::vector<EquilibriumReport> equilibria(const Scenario& s, const Schedule& p, int grid = 10000) {
  s.validate();
  if (!s.sequential()) {
    if (std::holds_alternative<Full>(s.externality) || std::holds_alternative<StatusBased>(s.externality))
      return scan_sim_equilibria(s, p, grid);
    if (const auto* g = std::get_if<NetworkBased>(&s.externality)) {
      bool uniform = true;
      for (const auto& d : s.dists) uniform = uniform && d == Distribution::uniform(0.0, 1.0);
      if (uniform) {
        auto rep = solve_network_sim_greedy(*g, p, s.dists);
        rep.best = rep.worst = true;
        return {rep};
      }
    }
    auto rep = solve_sim_fixed_point(s, p);
    rep.best = rep.worst = true;
    return {rep};
  }
  EquilibriumReport rep;
  const bool history = std::holds_alternative<Adaptive>(p);
  if (std::holds_alternative<NetworkBased>(s.externality)) {
    throw UnsupportedError("sequential network sales are only solved with fixed values");
  } else if (history || (std::holds_alternative<CountIndexed>(p) &&
                         !std::holds_alternative<AvailabilityBased>(s.externality))) {
    rep = solve_seq_adaptive(s, p);
  } else if (std::holds_alternative<Full>(s.externality) && !std::holds_alternative<TwoTier>(p)) {
    rep = solve_seq_full(s, p);
  } else if (std::holds_alternative<StatusBased>(s.externality)) {
    rep = solve_seq_status(s, p);
  } else if (std::holds_alternative<AvailabilityBased>(s.externality)) {
    rep = solve_seq_availability(s, p);
  } else {
    rep = solve_seq_adaptive(s, p);
  }
  rep.best = rep.worst = true;
  return {rep};
}

}  // namespace sgp

#endif  // SGP_EQUILIBRIUM_HPP_
