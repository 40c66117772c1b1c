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

#ifndef SGP_DISTRIBUTION_HPP_
#define SGP_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"

namespace sgp {

// Uniform law on [a, b].
struct Uniform {
  double a = 0.0;
  double b = 1.0;
  bool operator==(const Uniform&) const = default;
};

// CDF (v / (1 + eps))^ell on [0, 1 + eps].
struct ShiftedPower {
  double ell = 1.0;
  double eps = 0.0;
  bool operator==(const ShiftedPower&) const = default;
};

// CDF 1 - (1 - v)^k on [0, 1].
struct ComplementPower {
  double k = 1.0;
  bool operator==(const ComplementPower&) const = default;
};

// Continuous piecewise-linear CDF through (v, F) knots.
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> points;
  bool operator==(const PiecewiseLinear&) const = default;
};

using Family = std::variant<Uniform, ShiftedPower, ComplementPower, PiecewiseLinear>;

// An atomless value law on a bounded support [lo, hi]. Immutable once built;
// all accessors are pure.
class Distribution {
 public:
  explicit Distribution(Family family) : family_(std::move(family)) {
    validate();
    std::visit([this](const auto& f) { init(f); }, family_);
  }

  static Distribution uniform(double a, double b) { return Distribution(Uniform{a, b}); }
  static Distribution shifted_power(double ell, double eps) {
    return Distribution(ShiftedPower{ell, eps});
  }
  static Distribution complement_power(double k) { return Distribution(ComplementPower{k}); }
  static Distribution piecewise(std::vector<std::pair<double, double>> pts) {
    return Distribution(PiecewiseLinear{std::move(pts)});
  }

  const Family& family() const noexcept { return family_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool is_regular() const noexcept { return regular_; }

  std::string family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform>) return "uniform";
          if constexpr (std::is_same_v<T, ShiftedPower>) return "shifted_power";
          if constexpr (std::is_same_v<T, ComplementPower>) return "complement_power";
          return "piecewise";
        },
        family_);
  }

  // Accepts the extended reals; values outside the support clamp to 0 or 1.
  double cdf(double v) const {
    if (std::isnan(v)) throw DomainError("cdf argument is NaN");
    if (v <= lo_) return 0.0;
    if (v >= hi_) return 1.0;
    return std::visit([v](const auto& f) { return cdf_in(f, v); }, family_);
  }

  double pdf(double v) const {
    if (std::isnan(v)) throw DomainError("pdf argument is NaN");
    if (v < lo_ || v > hi_) return 0.0;
    return std::visit([v](const auto& f) { return pdf_in(f, v); }, family_);
  }

  double quantile(double u) const {
    if (!std::isfinite(u)) throw DomainError("quantile argument is not finite");
    if (u < 0.0 || u > 1.0) throw DomainError("quantile argument outside [0,1]");
    if (u == 0.0) return lo_;
    if (u == 1.0) return hi_;
    return std::visit([u](const auto& f) { return quantile_in(f, u); }, family_);
  }

  // Inverse-CDF draw from a uniform variate derived from `seed`.
  double sample(std::uint64_t seed) const {
    return quantile(num::to_unit(num::mix_seed(seed, 0)));
  }

  // phi(v) = v - (1 - F(v)) / f(v) on the support.
  double virtual_value(double v) const {
    if (!std::isfinite(v)) throw DomainError("virtual value argument is not finite");
    if (v < lo_ || v > hi_) throw DomainError("virtual value argument outside support");
    const double tail = 1.0 - cdf(v);
    if (tail <= 0.0) return v;
    const double dens = pdf(v);
    if (dens <= 0.0) return -kInf;
    return v - tail / dens;
  }

  // The v with phi(v) = t, clamped to lo below phi(lo) and to hi above phi(hi).
  double inverse_virtual_value(double t) const {
    if (!regular_) throw UnsupportedError("inverse virtual value needs a regular law");
    if (std::isnan(t)) throw DomainError("inverse virtual value argument is NaN");
    if (t >= hi_) return hi_;  // phi(v) <= v <= hi for every law
    if (const auto* u = std::get_if<Uniform>(&family_)) {
      return std::clamp(0.5 * (t + u->b), u->a, u->b);
    }
    if (const auto* c = std::get_if<ComplementPower>(&family_)) {
      return std::clamp((c->k * t + 1.0) / (c->k + 1.0), 0.0, 1.0);
    }
    if (t <= virtual_value(lo_)) return lo_;
    return num::bisect_increasing([&](double v) { return virtual_value(v) - t; }, lo_, hi_);
  }

  std::pair<double, double> monopoly_price() const {
    if (!regular_) throw UnsupportedError("monopoly price needs a regular law");
    const double p = inverse_virtual_value(0.0);
    return {p, p * (1.0 - cdf(p))};
  }

  bool operator==(const Distribution& o) const { return family_ == o.family_; }

 private:
  void validate() const {
    std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            if (!(std::isfinite(f.a) && std::isfinite(f.b) && f.a < f.b))
              throw InvariantError("support", "uniform needs finite lo < hi");
          } else if constexpr (std::is_same_v<T, ShiftedPower>) {
            if (!(std::isfinite(f.ell) && f.ell > 0.0))
              throw InvariantError("shape", "shifted_power needs ell > 0");
            if (!(std::isfinite(f.eps) && f.eps > -1.0))
              throw InvariantError("support", "shifted_power needs eps > -1");
          } else if constexpr (std::is_same_v<T, ComplementPower>) {
            if (!(std::isfinite(f.k) && f.k > 0.0))
              throw InvariantError("shape", "complement_power needs k > 0");
          } else {
            const auto& p = f.points;
            if (p.size() < 2) throw InvariantError("knots", "piecewise needs at least two points");
            if (p.front().second != 0.0 || p.back().second != 1.0)
              throw InvariantError("knots", "piecewise CDF must run from 0 to 1");
            for (std::size_t i = 0; i < p.size(); ++i) {
              if (!std::isfinite(p[i].first) || !std::isfinite(p[i].second))
                throw InvariantError("knots", "piecewise knots must be finite");
              if (i > 0 && !(p[i].first > p[i - 1].first && p[i].second > p[i - 1].second))
                throw InvariantError("knots", "piecewise knots must increase strictly");
            }
          }
        },
        family_);
  }

  void init(const Uniform& f) {
    lo_ = f.a;
    hi_ = f.b;
    regular_ = true;
  }
  void init(const ShiftedPower& f) {
    lo_ = 0.0;
    hi_ = 1.0 + f.eps;
    regular_ = f.ell >= 1.0;
  }
  void init(const ComplementPower&) {
    lo_ = 0.0;
    hi_ = 1.0;
    regular_ = true;
  }
  // phi has slope 2 inside each segment; it stays monotone across a knot
  // with F < 1 exactly when the segment slopes do not decrease there.
  void init(const PiecewiseLinear& f) {
    lo_ = f.points.front().first;
    hi_ = f.points.back().first;
    regular_ = true;
    for (std::size_t i = 1; i + 1 < f.points.size(); ++i) {
      if (slope(f, i) < slope(f, i - 1)) regular_ = false;
    }
  }

  static double slope(const PiecewiseLinear& f, std::size_t seg) {
    const auto& [v0, f0] = f.points[seg];
    const auto& [v1, f1] = f.points[seg + 1];
    return (f1 - f0) / (v1 - v0);
  }
  // Segment containing v, preferring the right segment at a knot.
  static std::size_t segment(const PiecewiseLinear& f, double v) {
    auto it = std::upper_bound(f.points.begin(), f.points.end(), v,
                               [](double x, const auto& pt) { return x < pt.first; });
    const auto idx = static_cast<std::size_t>(it - f.points.begin());
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, f.points.size() - 2);
  }

  static double cdf_in(const Uniform& f, double v) { return (v - f.a) / (f.b - f.a); }
  static double cdf_in(const ShiftedPower& f, double v) {
    return std::pow(v / (1.0 + f.eps), f.ell);
  }
  static double cdf_in(const ComplementPower& f, double v) {
    return -std::expm1(f.k * std::log1p(-v));
  }
  static double cdf_in(const PiecewiseLinear& f, double v) {
    const std::size_t s = segment(f, v);
    return f.points[s].second + slope(f, s) * (v - f.points[s].first);
  }

  static double pdf_in(const Uniform& f, double) { return 1.0 / (f.b - f.a); }
  static double pdf_in(const ShiftedPower& f, double v) {
    return f.ell * std::pow(v, f.ell - 1.0) / std::pow(1.0 + f.eps, f.ell);
  }
  static double pdf_in(const ComplementPower& f, double v) {
    return f.k * std::pow(1.0 - v, f.k - 1.0);
  }
  static double pdf_in(const PiecewiseLinear& f, double v) { return slope(f, segment(f, v)); }

  static double quantile_in(const Uniform& f, double u) { return f.a + u * (f.b - f.a); }
  static double quantile_in(const ShiftedPower& f, double u) {
    return (1.0 + f.eps) * std::pow(u, 1.0 / f.ell);
  }
  static double quantile_in(const ComplementPower& f, double u) {
    return -std::expm1(std::log1p(-u) / f.k);
  }
  static double quantile_in(const PiecewiseLinear& f, double u) {
    auto it = std::upper_bound(f.points.begin(), f.points.end(), u,
                               [](double x, const auto& pt) { return x < pt.second; });
    const auto idx = static_cast<std::size_t>(it - f.points.begin());
    const std::size_t s = std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, f.points.size() - 2);
    return f.points[s].first + (u - f.points[s].second) / slope(f, s);
  }

  Family family_;
  double lo_ = 0.0;
  double hi_ = 1.0;
  bool regular_ = true;
};

// Independent per-agent laws; index is agent identity.
using ProductDistribution = std::vector<Distribution>;

// Convenience: F_i evaluated at each threshold of a vector.
inline std::vector<double> cdf_at(const ProductDistribution& d, const std::vector<double>& t) {
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].cdf(t[i]);
  return out;
}

inline bool all_regular(const ProductDistribution& d) {
  return std::all_of(d.begin(), d.end(), [](const Distribution& x) { return x.is_regular(); });
}

}  // namespace sgp

#endif  // SGP_DISTRIBUTION_HPP_
