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

#ifndef SGP_SCENARIO_IO_HPP_
#define SGP_SCENARIO_IO_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgp/distribution.hpp"
#include "sgp/errors.hpp"
#include "sgp/scenario.hpp"

namespace sgp::io {

using Json = nlohmann::json;

// Extended reals are written as numbers, with infinity as the string "inf".
inline Json encode_real(double x) {
  if (std::isinf(x) && x > 0) return "inf";
  return x;
}

inline double decode_real(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  throw ParseError(0, field, "expected a number or \"inf\"");
}

inline Json encode_reals(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(encode_real(x));
  return out;
}

inline const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(0, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(0, path + "." + key, "missing field");
  return *it;
}

inline const Json& array_member(const Json& j, const char* key, const std::string& path) {
  const Json& a = member(j, key, path);
  if (!a.is_array()) throw ParseError(0, path + "." + key, "expected an array");
  return a;
}

inline std::vector<double> decode_reals(const Json& a, const std::string& path) {
  if (!a.is_array()) throw ParseError(0, path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(decode_real(a[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json to_json(const Distribution& d) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {{"family", "uniform"}, {"lo", f.a}, {"hi", f.b}};
        } else if constexpr (std::is_same_v<T, ShiftedPower>) {
          return {{"family", "shifted_power"}, {"ell", f.ell}, {"eps", f.eps}};
        } else if constexpr (std::is_same_v<T, ComplementPower>) {
          return {{"family", "complement_power"}, {"k", f.k}};
        } else {
          Json pts = Json::array();
          for (auto [v, F] : f.points) pts.push_back({v, F});
          return {{"family", "piecewise"}, {"points", pts}};
        }
      },
      d.family());
}

inline double number(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw ParseError(0, path + "." + key, "expected a number");
  return v.get<double>();
}

inline Distribution distribution_from_json(const Json& j, const std::string& path) {
  const Json& fam = member(j, "family", path);
  if (!fam.is_string()) throw ParseError(0, path + ".family", "expected a string");
  const std::string name = fam.get<std::string>();
  if (name == "uniform") {
    return Distribution::uniform(number(j, "lo", path), number(j, "hi", path));
  }
  if (name == "shifted_power") {
    return Distribution::shifted_power(number(j, "ell", path), number(j, "eps", path));
  }
  if (name == "complement_power") return Distribution::complement_power(number(j, "k", path));
  if (name == "piecewise") {
    const Json& pts = array_member(j, "points", path);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string p = path + ".points[" + std::to_string(i) + "]";
      if (!pts[i].is_array() || pts[i].size() != 2 || !pts[i][0].is_number() || !pts[i][1].is_number())
        throw ParseError(0, p, "expected a [v, F] pair");
      out.emplace_back(pts[i][0].get<double>(), pts[i][1].get<double>());
    }
    return Distribution::piecewise(std::move(out));
  }
  throw ParseError(0, path + ".family", "unknown family '" + name + "'");
}

inline Json to_json(const Scenario& s) {
  Json agents = Json::array();
  for (const auto& d : s.dists) agents.push_back(to_json(d));
  Json ext = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Full>) {
          return {{"type", "full"}};
        } else if constexpr (std::is_same_v<T, StatusBased>) {
          return {{"type", "status"}, {"w", m.w}};
        } else if constexpr (std::is_same_v<T, AvailabilityBased>) {
          return {{"type", "availability"}, {"w", m.w}};
        } else {
          Json edges = Json::array();
          for (auto [u, v] : m.edges()) edges.push_back({u, v});
          return {{"type", "network"}, {"edges", edges}};
        }
      },
      s.externality);
  Json mode;
  if (const auto* q = std::get_if<Sequential>(&s.mode)) {
    mode = {{"type", "sequential"}, {"order", q->order}};
  } else {
    mode = {{"type", "simultaneous"}};
  }
  return {{"agents", agents}, {"externality", ext}, {"mode", mode}};
}

inline std::vector<double> weights(const Json& j, const std::string& path) {
  const Json& a = array_member(j, "w", path);
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(0, path + ".w[" + std::to_string(i) + "]", "expected a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(0, path, "expected an integer");
  return j.get<int>();
}

// Builds and validates a Scenario from a parsed document.
inline Scenario scenario_from_json(const Json& j) {
  Scenario s;
  const Json& agents = array_member(j, "agents", "");
  for (std::size_t i = 0; i < agents.size(); ++i)
    s.dists.push_back(distribution_from_json(agents[i], "agents[" + std::to_string(i) + "]"));
  const int n = static_cast<int>(s.dists.size());

  const Json& ext = member(j, "externality", "");
  const Json& type = member(ext, "type", "externality");
  const std::string t = type.is_string() ? type.get<std::string>() : "";
  if (t == "full") {
    s.externality = Full{};
  } else if (t == "status") {
    s.externality = StatusBased{weights(ext, "externality")};
  } else if (t == "availability") {
    s.externality = AvailabilityBased{weights(ext, "externality")};
  } else if (t == "network") {
    const Json& edges = array_member(ext, "edges", "externality");
    std::vector<std::pair<int, int>> list;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string p = "externality.edges[" + std::to_string(e) + "]";
      if (!edges[e].is_array() || edges[e].size() != 2) throw ParseError(0, p, "expected a [u, v] pair");
      list.emplace_back(integer(edges[e][0], p), integer(edges[e][1], p));
    }
    s.externality = NetworkBased::from_edges(n, list);
  } else {
    throw ParseError(0, "externality.type", "unknown externality type '" + t + "'");
  }

  const Json& mode = member(j, "mode", "");
  const Json& mtype = member(mode, "type", "mode");
  const std::string m = mtype.is_string() ? mtype.get<std::string>() : "";
  if (m == "simultaneous") {
    s.mode = Simultaneous{};
  } else if (m == "sequential") {
    Sequential q;
    if (mode.contains("order")) {
      const Json& ord = array_member(mode, "order", "mode");
      for (std::size_t k = 0; k < ord.size(); ++k)
        q.order.push_back(integer(ord[k], "mode.order[" + std::to_string(k) + "]"));
    } else {
      for (int i = 0; i < n; ++i) q.order.push_back(i);
    }
    s.mode = std::move(q);
  } else {
    throw ParseError(0, "mode.type", "unknown mode '" + m + "'");
  }
  s.validate();
  return s;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

inline Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_of(text, e.byte), "", e.what());
  }
}

inline Scenario parse_scenario(const std::string& text) {
  return scenario_from_json(parse_document(text));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json(s).dump(2) << '\n';
}

inline Json to_json(const Schedule& s) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Simple>) {
          return {{"shape", "simple"}, {"values", encode_reals(p.v)}};
        } else if constexpr (std::is_same_v<T, Anonymous>) {
          return {{"shape", "anonymous"}, {"value", encode_real(p.v)}};
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          return {{"shape", "two_tier"}, {"zero", encode_reals(p.zero)},
                  {"positive", encode_reals(p.positive)}};
        } else {
          Json rows = Json::array();
          for (const auto& r : p.rows) rows.push_back(encode_reals(r));
          return {{"shape", std::is_same_v<T, CountIndexed> ? "count_indexed" : "adaptive"},
                  {"rows", rows}};
        }
      },
      s);
}

inline Schedule schedule_from_json(const Json& j) {
  const Json& shape = member(j, "shape", "schedule");
  const std::string t = shape.is_string() ? shape.get<std::string>() : "";
  if (t == "simple") return Simple{decode_reals(member(j, "values", "schedule"), "schedule.values")};
  if (t == "anonymous") return Anonymous{decode_real(member(j, "value", "schedule"), "schedule.value")};
  if (t == "two_tier") {
    return TwoTier{decode_reals(member(j, "zero", "schedule"), "schedule.zero"),
                   decode_reals(member(j, "positive", "schedule"), "schedule.positive")};
  }
  if (t == "count_indexed" || t == "adaptive") {
    const Json& rows = array_member(j, "rows", "schedule");
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < rows.size(); ++k)
      out.push_back(decode_reals(rows[k], "schedule.rows[" + std::to_string(k) + "]"));
    if (t == "count_indexed") return CountIndexed{std::move(out)};
    return Adaptive{std::move(out)};
  }
  throw ParseError(0, "schedule.shape", "unknown shape '" + t + "'");
}

inline Schedule load_schedule(const std::string& path) {
  return schedule_from_json(parse_document(read_file(path)));
}

}  // namespace sgp::io

#endif  // SGP_SCENARIO_IO_HPP_
