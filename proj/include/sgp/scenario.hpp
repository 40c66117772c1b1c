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

#ifndef SGP_SCENARIO_HPP_
#define SGP_SCENARIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sgp/distribution.hpp"
#include "sgp/errors.hpp"
#include "sgp/numeric.hpp"

namespace sgp {

// Any purchase gives every agent its full value.
struct Full {
  bool operator==(const Full&) const = default;
};

// Non-owner i gets fraction w[i] once anybody has bought.
struct StatusBased {
  std::vector<double> w;
  bool operator==(const StatusBased&) const = default;
};

// Non-owner gets w[|S|]; w has one entry per count 0..n-1 with w[0] = 0.
struct AvailabilityBased {
  std::vector<double> w;
  bool operator==(const AvailabilityBased&) const = default;
};

// Non-owner gets full value iff a graph neighbour bought.
struct NetworkBased {
  std::vector<std::vector<int>> adj;

  static NetworkBased from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    NetworkBased g;
    g.adj.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw InvariantError("graph", "edge endpoint out of range");
      if (u == v) throw InvariantError("graph", "self-loops are not allowed");
      auto& au = g.adj[static_cast<std::size_t>(u)];
      if (std::find(au.begin(), au.end(), v) != au.end())
        throw InvariantError("graph", "duplicate edge");
      au.push_back(v);
      g.adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
    return g;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t u = 0; u < adj.size(); ++u)
      for (int v : adj[u])
        if (static_cast<int>(u) < v) out.emplace_back(static_cast<int>(u), v);
    return out;
  }

  bool operator==(const NetworkBased&) const = default;
};

using ExternalityModel = std::variant<Full, StatusBased, AvailabilityBased, NetworkBased>;

struct Simultaneous {
  bool operator==(const Simultaneous&) const = default;
};

// order[k] is the agent that arrives k-th.
struct Sequential {
  std::vector<int> order;
  bool operator==(const Sequential&) const = default;
};

using Mode = std::variant<Simultaneous, Sequential>;

// Agent sets are membership vectors indexed by agent.
using AgentSet = std::vector<bool>;

// Availability weight for count k, with w(k) = 1 once k reaches n.
inline double availability_weight(const AvailabilityBased& m, std::size_t k) {
  return k < m.w.size() ? m.w[k] : 1.0;
}

// x_i(S): the fraction of its value agent i enjoys when S is the buyer set.
inline double externality_fraction(const ExternalityModel& model, int i, const AgentSet& s) {
  const auto ui = static_cast<std::size_t>(i);
  if (s.at(ui)) return 1.0;
  const auto count = static_cast<std::size_t>(std::count(s.begin(), s.end(), true));
  if (count == 0) return 0.0;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Full>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, StatusBased>) {
          return m.w.at(ui);
        } else if constexpr (std::is_same_v<T, AvailabilityBased>) {
          return availability_weight(m, count);
        } else {
          for (int j : m.adj.at(ui))
            if (s[static_cast<std::size_t>(j)]) return 1.0;
          return 0.0;
        }
      },
      model);
}

// A market instance: value laws, externality, and sale mode.
struct Scenario {
  ProductDistribution dists;
  ExternalityModel externality = Full{};
  Mode mode = Simultaneous{};

  std::size_t n() const noexcept { return dists.size(); }
  bool sequential() const noexcept { return std::holds_alternative<Sequential>(mode); }

  // Arrival order; the identity for simultaneous sales.
  std::vector<int> order() const {
    if (const auto* s = std::get_if<Sequential>(&mode)) return s->order;
    std::vector<int> id(n());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
    return id;
  }

  void validate() const {
    const std::size_t size = n();
    if (size == 0) throw InvariantError("agents", "at least one agent is required");
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, StatusBased>) {
            if (m.w.size() != size)
              throw InvariantError("status.w", "one weight per agent is required");
            for (double x : m.w)
              if (!(x >= 0.0 && x <= 1.0))
                throw InvariantError("status.w", "weights must lie in [0,1]");
          } else if constexpr (std::is_same_v<T, AvailabilityBased>) {
            if (m.w.size() != size)
              throw InvariantError("availability.w", "one weight per count 0..n-1 is required");
            if (m.w.front() != 0.0)
              throw InvariantError("availability.w", "w(0) must be 0");
            for (std::size_t k = 0; k < size; ++k) {
              if (!(m.w[k] >= 0.0 && m.w[k] <= 1.0))
                throw InvariantError("availability.w", "weights must lie in [0,1]");
              if (k > 0 && m.w[k] < m.w[k - 1])
                throw InvariantError("availability.w", "weights must be nondecreasing");
            }
          } else if constexpr (std::is_same_v<T, NetworkBased>) {
            if (m.adj.size() != size)
              throw InvariantError("network", "graph must have one node per agent");
            for (std::size_t u = 0; u < size; ++u) {
              for (int v : m.adj[u]) {
                if (v < 0 || static_cast<std::size_t>(v) >= size || static_cast<std::size_t>(v) == u)
                  throw InvariantError("network", "bad neighbour index");
                const auto& back = m.adj[static_cast<std::size_t>(v)];
                if (std::find(back.begin(), back.end(), static_cast<int>(u)) == back.end())
                  throw InvariantError("network", "graph must be undirected");
              }
            }
          }
        },
        externality);
    if (const auto* s = std::get_if<Sequential>(&mode)) {
      if (s->order.size() != size)
        throw InvariantError("order", "order must list every agent once");
      std::vector<bool> seen(size, false);
      for (int a : s->order) {
        if (a < 0 || static_cast<std::size_t>(a) >= size || seen[static_cast<std::size_t>(a)])
          throw InvariantError("order", "order must be a permutation");
        seen[static_cast<std::size_t>(a)] = true;
      }
    }
  }

  bool operator==(const Scenario&) const = default;
};

// Price and threshold containers share one shape family.
//  - Simple: one value per agent.
//  - Anonymous: one value for every agent.
//  - TwoTier: a value before any sale and one after, per agent.
//  - CountIndexed: rows[k][j] for the k-th arrival after j sales, j <= k.
//  - Adaptive: rows[k][h] for the k-th arrival after history h, a bitmask
//    over earlier arrival positions (bit m set when the m-th arrival bought).
// Infinity means "not offered" for prices and "never buys" for thresholds.
struct Simple {
  std::vector<double> v;
  bool operator==(const Simple&) const = default;
};
struct Anonymous {
  double v = 0.0;
  bool operator==(const Anonymous&) const = default;
};
struct TwoTier {
  std::vector<double> zero;
  std::vector<double> positive;
  bool operator==(const TwoTier&) const = default;
};
struct CountIndexed {
  std::vector<std::vector<double>> rows;
  bool operator==(const CountIndexed&) const = default;
};
struct Adaptive {
  std::vector<std::vector<double>> rows;
  bool operator==(const Adaptive&) const = default;
};

using Schedule = std::variant<Simple, Anonymous, TwoTier, CountIndexed, Adaptive>;
using PriceSchedule = Schedule;
using ThresholdProfile = Schedule;

inline std::string shape_name(const Schedule& s) {
  static const char* names[] = {"simple", "anonymous", "two_tier", "count_indexed", "adaptive"};
  return names[s.index()];
}

// Checks nonnegativity and that the shape matches n agents.
inline void validate_schedule(const Schedule& s, std::size_t n) {
  auto check = [](double x) {
    if (std::isnan(x) || x < 0.0) throw InvariantError("schedule", "entries must be nonnegative");
  };
  auto check_vec = [&](const std::vector<double>& v) {
    if (v.size() != n) throw InvariantError("schedule", "one entry per agent is required");
    for (double x : v) check(x);
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Simple>) {
          check_vec(p.v);
        } else if constexpr (std::is_same_v<T, Anonymous>) {
          check(p.v);
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          check_vec(p.zero);
          check_vec(p.positive);
        } else {
          if (p.rows.size() != n) throw InvariantError("schedule", "one row per arrival is required");
          for (std::size_t k = 0; k < n; ++k) {
            const std::size_t want = std::is_same_v<T, CountIndexed> ? k + 1 : (std::size_t{1} << k);
            if (p.rows[k].size() != want)
              throw InvariantError("schedule", "row " + std::to_string(k) + " has the wrong length");
            for (double x : p.rows[k]) check(x);
          }
        }
      },
      s);
}

// Per-agent values of a Simple or Anonymous schedule.
inline std::vector<double> per_agent(const Schedule& s, std::size_t n) {
  if (const auto* a = std::get_if<Anonymous>(&s)) return std::vector<double>(n, a->v);
  if (const auto* p = std::get_if<Simple>(&s)) {
    if (p->v.size() != n) throw InvariantError("schedule", "one entry per agent is required");
    return p->v;
  }
  throw UnsupportedError("expected a simple or anonymous schedule, got " + shape_name(s));
}

}  // namespace sgp

#endif  // SGP_SCENARIO_HPP_
