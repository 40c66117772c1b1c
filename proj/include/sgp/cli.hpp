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

#ifndef SGP_CLI_HPP_
#define SGP_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgp/equilibrium.hpp"
#include "sgp/errors.hpp"
#include "sgp/oracle.hpp"
#include "sgp/pricing.hpp"
#include "sgp/repro.hpp"
#include "sgp/revenue.hpp"
#include "sgp/scenario.hpp"
#include "sgp/scenario_io.hpp"

namespace sgp::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitReproFailed = 2;

struct RunConfig {
  std::string command;
  std::vector<std::string> scenarios;
  std::string scheme;
  std::string prices;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned grid = 200;
  std::string out;
  std::string format = "table";
  std::string repro;
  std::size_t n = 0;
  std::size_t k = 1;
};

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string mode_name(const Scenario& s) { return s.sequential() ? "sequential" : "simultaneous"; }

inline std::string model_name(const Scenario& s) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Full>) return "full";
        else if constexpr (std::is_same_v<T, StatusBased>) return "status";
        else if constexpr (std::is_same_v<T, AvailabilityBased>) return "availability";
        else return "network";
      },
      s.externality);
}

// ---------------------------------------------------------------------------
// Scheme registry.

struct SchemeEntry {
  std::string name;
  std::string applies;  // human-readable (model, mode) pairs
  std::function<bool(const Scenario&)> valid;
  std::function<Priced<Schedule>(const Scenario&, const RunConfig&)> make;
};

inline const std::vector<double>& status_weights(const Scenario& s) { return std::get<StatusBased>(s.externality).w; }
inline const std::vector<double>& availability_weights(const Scenario& s) {
  return std::get<AvailabilityBased>(s.externality).w;
}

template <class M>
bool is_model(const Scenario& s) {
  return std::holds_alternative<M>(s.externality);
}

inline const std::vector<SchemeEntry>& schemes() {
  static const std::vector<SchemeEntry> registry = {
      {"exante_transform", "full/simultaneous",
       [](const Scenario& s) { return is_model<Full>(s) && !s.sequential(); },
       [](const Scenario& s, const RunConfig&) {
         const auto e = ear_prices(s.dists);
         auto p = exante_transform(e.prices, e.revenue);
         return Priced<Schedule>{p.prices, p.tag};
       }},
      {"seq_full_prices", "full/sequential", [](const Scenario& s) { return is_model<Full>(s) && s.sequential(); },
       [](const Scenario& s, const RunConfig&) {
         auto p = seq_full_prices(s.dists, s.order());
         return Priced<Schedule>{p.prices, p.tag};
       }},
      {"anonymous_price", "full/any", [](const Scenario& s) { return is_model<Full>(s); },
       [](const Scenario& s, const RunConfig&) {
         auto p = halve_anonymous(anonymous_price(s.dists));
         return Priced<Schedule>{p.prices, p.tag};
       }},
      {"iid_nondiscriminatory", "full/simultaneous, identical agents",
       [](const Scenario& s) {
         return is_model<Full>(s) && !s.sequential() &&
                std::all_of(s.dists.begin(), s.dists.end(), [&](const auto& d) { return d == s.dists.front(); });
       },
       [](const Scenario& s, const RunConfig&) {
         auto p = iid_nondiscriminatory(s.dists);
         return Priced<Schedule>{p.prices, p.tag};
       }},
      {"status_private_prices", "status/any", [](const Scenario& s) { return is_model<StatusBased>(s); },
       [](const Scenario& s, const RunConfig&) {
         const auto p = status_private_prices(s.dists, status_weights(s));
         const Schedule sched = s.sequential() ? Schedule{TwoTier{p.v, p.v}} : Schedule{p};
         return Priced<Schedule>{sched, {"status_private_prices", 1.0, "1", "R1max"}};
       }},
      {"status_public_prices", "status/any", [](const Scenario& s) { return is_model<StatusBased>(s); },
       [](const Scenario& s, const RunConfig&) {
         const GuaranteeTag tag = s.sequential()
                                      ? GuaranteeTag{"status_public_prices", 4.0, "4", "R2max"}
                                      : GuaranteeTag{"status_public_prices", 4.0 * std::numbers::e, "4e", "R2max"};
         return Priced<Schedule>{status_public_prices(s.dists, status_weights(s), s.mode), tag};
       }},
      {"status_best_of", "status/any", [](const Scenario& s) { return is_model<StatusBased>(s); },
       [](const Scenario& s, const RunConfig&) {
         auto b = status_best_of(s.dists, status_weights(s), s.mode);
         return Priced<Schedule>{b.prices, b.tag};
       }},
      {"availability_grad1", "availability/sequential (uses --k)",
       [](const Scenario& s) { return is_model<AvailabilityBased>(s) && s.sequential(); },
       [](const Scenario& s, const RunConfig& c) {
         auto g = availability_grad1(s.dists, availability_weights(s), c.k, s.order());
         return Priced<Schedule>{g.prices, g.tag};
       }},
      {"availability_grad2", "availability/sequential",
       [](const Scenario& s) { return is_model<AvailabilityBased>(s) && s.sequential(); },
       [](const Scenario& s, const RunConfig&) {
         auto g = availability_grad2(s.dists, availability_weights(s), s.order());
         return Priced<Schedule>{g.prices, g.tag};
       }},
      {"availability_best_bucket", "availability/sequential",
       [](const Scenario& s) { return is_model<AvailabilityBased>(s) && s.sequential(); },
       [](const Scenario& s, const RunConfig&) {
         auto b = availability_best_bucket(s.dists, availability_weights(s), s.order());
         return Priced<Schedule>{b.prices, b.tag};
       }},
  };
  return registry;
}

inline std::string scheme_list() {
  std::string s;
  for (const auto& e : schemes()) s += "  " + e.name + " (" + e.applies + ")\n";
  return s;
}

inline const SchemeEntry& find_scheme(const std::string& name) {
  for (const auto& e : schemes())
    if (e.name == name) return e;
  throw DomainError("unknown scheme '" + name + "'; known schemes:\n" + scheme_list());
}

inline Priced<Schedule> make_prices(const Scenario& s, const RunConfig& c) {
  const auto& e = find_scheme(c.scheme);
  if (!e.valid(s))
    throw DomainError("scheme '" + e.name + "' applies to " + e.applies + ", not " + model_name(s) + "/" +
                      mode_name(s));
  return e.make(s, c);
}

// ---------------------------------------------------------------------------
// Benchmarks named by guarantee tags.

inline Benchmark full_optimum(const Scenario& s, unsigned grid) {
  const Scenario full{s.dists, Full{}, s.mode};
  if (s.n() <= 3) return grid_optimal_thresholds(full, static_cast<int>(grid)).benchmark;
  auto b = myerson_revenue(s.dists);
  b.method += " (upper bound: n > 3)";
  return b;
}

inline double r1max(const Scenario& s) {
  const auto& w = status_weights(s);
  double r = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) r += (1.0 - w[i]) * s.dists[i].monopoly_price().second;
  return r;
}

inline Benchmark resolve_benchmark(const Scenario& s, const std::string& name, unsigned grid) {
  if (name == "Myer") return myerson_revenue(s.dists);
  if (name == "R1max") return {BenchmarkKind::Myer, 1, r1max(s), "sum of discounted monopoly revenues", 1e-12};
  if (name == "R2max") return full_optimum(s, grid);
  if (name == "R*_sim" || name == "R*_seq") {
    auto b = full_optimum(s, grid);
    if (is_model<StatusBased>(s)) {
      // Upper bound on the status optimum: R1max (twice when sequential) + R2max.
      b.value += (s.sequential() ? 2.0 : 1.0) * r1max(s);
      b.method = (s.sequential() ? "2*R1max + " : "R1max + ") + b.method;
    }
    return b;
  }
  if (name == "MyerK") {
    // Upper bound on availability revenue: weighted k-unit Myerson values.
    const auto& m = std::get<AvailabilityBased>(s.externality);
    Benchmark b{BenchmarkKind::MyerK, s.n(), 0.0, "sum_k (w_k - w_{k-1}) MyerK(k)", 0.0};
    for (std::size_t k = 1; k <= s.n(); ++k) {
      const double dw = availability_weight(m, k) - availability_weight(m, k - 1);
      if (dw == 0.0) continue;
      const auto mk = myerson_k_uniform(s.dists, k);
      b.value += dw * mk.value;
      b.error_bound += dw * mk.error_bound;
    }
    return b;
  }
  throw DomainError("unknown benchmark '" + name + "'");
}

// ---------------------------------------------------------------------------
// Evaluation rows and CSV.

struct EvalRow {
  std::string scenario_id, scheme, mode;
  double revenue_closed = 0.0, mc_mean = 0.0, mc_stderr = 0.0, worst_eq = 0.0, best_eq = 0.0, benchmark = 0.0,
         ratio = 0.0;
  bool operator==(const EvalRow&) const = default;
};

inline const char* kCsvHeader =
    "scenario_id,scheme,mode,revenue_closed,mc_mean,mc_stderr,worst_eq,best_eq,benchmark,ratio";

inline std::string to_csv(const std::vector<EvalRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    for (const auto& f : {r.scenario_id, r.scheme, r.mode})
      if (f.find_first_of(",\"\n") != std::string::npos) throw DomainError("CSV field contains a separator: " + f);
    out += r.scenario_id + "," + r.scheme + "," + r.mode;
    for (double x : {r.revenue_closed, r.mc_mean, r.mc_stderr, r.worst_eq, r.best_eq, r.benchmark, r.ratio})
      out += "," + fmt(x);
    out += "\n";
  }
  return out;
}

inline std::vector<EvalRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError(1, "header", "unexpected CSV header");
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw ParseError(line_no, "", "expected 10 fields");
    EvalRow r{f[0], f[1], f[2]};
    double* nums[] = {&r.revenue_closed, &r.mc_mean, &r.mc_stderr, &r.worst_eq, &r.best_eq, &r.benchmark, &r.ratio};
    for (std::size_t c = 0; c < 7; ++c) {
      char* end = nullptr;
      *nums[c] = std::strtod(f[c + 3].c_str(), &end);
      if (end == f[c + 3].c_str() || *end != '\0') throw ParseError(line_no, f[c + 3], "not a number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// The equilibrium a guarantee is judged at: the worst for simultaneous sales.
inline const EquilibriumReport& judged_equilibrium(const std::vector<EquilibriumReport>& eqs) {
  for (const auto& e : eqs)
    if (e.worst) return e;
  return eqs.front();
}

inline EvalRow evaluate(const Scenario& s, const std::string& id, const std::string& scheme, const Schedule& p,
                        const GuaranteeTag* tag, const RunConfig& c) {
  const auto eqs = equilibria(s, p);
  const auto& eq = judged_equilibrium(eqs);
  EvalRow r;
  r.scenario_id = id;
  r.scheme = scheme;
  r.mode = mode_name(s);
  r.revenue_closed = revenue_closed(s, p, eq);
  const auto mc = simulate(s, p, eq.thresholds, c.trials, c.seed);
  r.mc_mean = mc.mean;
  r.mc_stderr = mc.stderr_;
  r.worst_eq = kInf;
  r.best_eq = -kInf;
  for (const auto& e : eqs) {
    r.worst_eq = std::min(r.worst_eq, e.revenue_low);
    r.best_eq = std::max(r.best_eq, e.revenue_high);
  }
  if (tag) {
    r.benchmark = resolve_benchmark(s, tag->benchmark, c.grid).value;
    // Revenue over the guaranteed floor; at least 1 when the guarantee holds.
    const double floor = std::isfinite(tag->factor) ? r.benchmark / tag->factor : r.benchmark;
    r.ratio = r.worst_eq / floor;
  } else {
    r.benchmark = myerson_revenue(s.dists).value;
    r.ratio = r.worst_eq / r.benchmark;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Output helpers.

inline Json report_json(const EquilibriumReport& e) {
  Json j;
  j["thresholds"] = io::to_json(e.thresholds);
  j["buy_probs"] = io::encode_reals(e.buy_probs);
  j["revenue"] = e.revenue;
  j["revenue_low"] = e.revenue_low;
  j["revenue_high"] = e.revenue_high;
  j["residual"] = e.residual;
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["degenerate"] = e.degenerate;
  j["continuum"] = e.continuum;
  j["no_guarantee"] = e.no_guarantee;
  j["worst"] = e.worst;
  j["best"] = e.best;
  if (!e.buyer_support.empty()) j["buyer_support"] = e.buyer_support;
  return j;
}

inline Json tag_json(const GuaranteeTag& t) {
  return {{"scheme", t.scheme}, {"factor", io::encode_real(t.factor)}, {"factor_label", t.factor_label},
          {"benchmark", t.benchmark}};
}

inline Json row_json(const EvalRow& r) {
  return {{"scenario_id", r.scenario_id}, {"scheme", r.scheme},   {"mode", r.mode},
          {"revenue_closed", r.revenue_closed}, {"mc_mean", r.mc_mean}, {"mc_stderr", r.mc_stderr},
          {"worst_eq", io::encode_real(r.worst_eq)}, {"best_eq", io::encode_real(r.best_eq)},
          {"benchmark", r.benchmark}, {"ratio", io::encode_real(r.ratio)}};
}

inline std::string rows_table(const std::vector<EvalRow>& rows) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-20s %-26s %-12s %12s %12s %10s %12s %12s %12s %9s\n", "scenario", "scheme",
                "mode", "revenue", "mc_mean", "mc_se", "worst_eq", "best_eq", "benchmark", "ratio");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %-26s %-12s %12.8f %12.8f %10.2e %12.8f %12.8f %12.8f %9.4f\n",
                  r.scenario_id.c_str(), r.scheme.c_str(), r.mode.c_str(), r.revenue_closed, r.mc_mean, r.mc_stderr,
                  r.worst_eq, r.best_eq, r.benchmark, r.ratio);
    out += buf;
  }
  return out;
}

// All entries of a schedule in storage order.
inline std::vector<double> flatten(const Schedule& s) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Simple>) {
          return p.v;
        } else if constexpr (std::is_same_v<T, Anonymous>) {
          return {p.v};
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          auto out = p.zero;
          out.insert(out.end(), p.positive.begin(), p.positive.end());
          return out;
        } else {
          std::vector<double> out;
          for (const auto& r : p.rows) out.insert(out.end(), r.begin(), r.end());
          return out;
        }
      },
      s);
}

inline std::string scenario_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

inline std::vector<std::string> expand_scenarios(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (std::filesystem::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : std::filesystem::directory_iterator(in))
        if (e.path().extension() == ".json") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

// Prices from --prices (a schedule file) or --scheme; exactly one is needed.
inline Priced<Schedule> chosen_prices(const Scenario& s, const RunConfig& c, std::string& label) {
  if (!c.prices.empty() && !c.scheme.empty()) throw DomainError("give either --prices or --scheme, not both");
  if (!c.prices.empty()) {
    label = "prices:" + scenario_id(c.prices);
    auto p = io::load_schedule(c.prices);
    validate_schedule(p, s.n());
    return {p, {label, kInf, "none", "Myer"}};
  }
  if (c.scheme.empty()) throw DomainError("one of --prices or --scheme is required");
  label = c.scheme;
  return make_prices(s, c);
}

inline Scenario single_scenario(const RunConfig& c) {
  if (c.scenarios.size() != 1) throw DomainError("exactly one --scenario is required");
  return io::load_scenario(c.scenarios.front());
}

// ---------------------------------------------------------------------------
// Commands. Each writes to `out` and returns an exit code.

inline int cmd_eq(const RunConfig& c, std::ostream& out) {
  const auto s = single_scenario(c);
  std::string label;
  const auto p = chosen_prices(s, c, label);
  const auto eqs = equilibria(s, p.prices);
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& e : eqs) arr.push_back(report_json(e));
    out << Json{{"scenario", scenario_id(c.scenarios.front())}, {"prices", io::to_json(p.prices)},
                {"equilibria", arr}}.dump(2)
        << "\n";
    return kExitOk;
  }
  if (c.format == "csv") {
    out << "index,revenue,revenue_low,revenue_high,residual,worst,best,continuum,thresholds\n";
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const auto& e = eqs[i];
      std::string t;
      for (double x : flatten(e.thresholds)) t += (t.empty() ? "" : ";") + fmt(x);
      out << i << "," << fmt(e.revenue) << "," << fmt(e.revenue_low) << "," << fmt(e.revenue_high) << ","
          << fmt(e.residual) << "," << e.worst << "," << e.best << "," << e.continuum << "," << t << "\n";
    }
    return kExitOk;
  }
  out << "scenario " << scenario_id(c.scenarios.front()) << " (" << model_name(s) << ", " << mode_name(s)
      << "), prices " << label << "\n";
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto& e = eqs[i];
    out << "equilibrium " << i << ": revenue " << fmt_short(e.revenue);
    if (e.continuum) out << " (continuum " << fmt_short(e.revenue_low) << " .. " << fmt_short(e.revenue_high) << ")";
    if (e.worst) out << " [worst]";
    if (e.best) out << " [best]";
    if (e.no_guarantee) out << " [no guarantee]";
    if (e.degenerate) out << " [degenerate]";
    out << "\n  thresholds " << io::to_json(e.thresholds).dump() << "\n  residual " << fmt_short(e.residual) << "\n";
  }
  return kExitOk;
}

inline int cmd_price(const RunConfig& c, std::ostream& out) {
  const auto s = single_scenario(c);
  if (c.scheme.empty()) throw DomainError("--scheme is required");
  const auto p = make_prices(s, c);
  if (c.format == "csv") {
    out << "scheme,factor,benchmark,shape,index,value\n";
    const auto v = flatten(p.prices);
    for (std::size_t i = 0; i < v.size(); ++i)
      out << p.tag.scheme << "," << fmt(p.tag.factor) << "," << p.tag.benchmark << "," << shape_name(p.prices) << ","
          << i << "," << fmt(v[i]) << "\n";
    return kExitOk;
  }
  if (c.format == "json") {
    out << Json{{"prices", io::to_json(p.prices)}, {"guarantee", tag_json(p.tag)}}.dump(2) << "\n";
    return kExitOk;
  }
  out << "scheme " << p.tag.scheme << ": factor " << p.tag.factor_label << " vs " << p.tag.benchmark << "\n"
      << "prices " << io::to_json(p.prices).dump() << "\n";
  return kExitOk;
}

inline void emit_rows(const std::vector<EvalRow>& rows, const RunConfig& c, std::ostream& out) {
  if (c.format == "csv") {
    out << to_csv(rows);
  } else if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    out << arr.dump(2) << "\n";
  } else {
    out << rows_table(rows);
  }
}

inline int cmd_eval(const RunConfig& c, std::ostream& out) {
  const auto s = single_scenario(c);
  std::string label;
  const auto p = chosen_prices(s, c, label);
  const bool tagged = c.prices.empty();
  emit_rows({evaluate(s, scenario_id(c.scenarios.front()), label, p.prices, tagged ? &p.tag : nullptr, c)}, c, out);
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto s = single_scenario(c);
  std::string label;
  const auto p = chosen_prices(s, c, label);
  const auto eqs = equilibria(s, p.prices);
  const auto& eq = judged_equilibrium(eqs);
  const auto mc = simulate(s, p.prices, eq.thresholds, c.trials, c.seed);
  const double exact = revenue_closed(s, p.prices, eq);
  if (c.format == "json") {
    out << Json{{"scenario", scenario_id(c.scenarios.front())}, {"prices", label}, {"trials", mc.trials},
                {"seed", mc.seed}, {"mean", mc.mean}, {"stderr", mc.stderr_}, {"revenue_closed", exact},
                {"purchase_freq", mc.purchase_freq}, {"histogram", mc.histogram}}.dump(2)
        << "\n";
  } else if (c.format == "csv") {
    out << "trials,seed,mean,stderr,revenue_closed\n"
        << mc.trials << "," << mc.seed << "," << fmt(mc.mean) << "," << fmt(mc.stderr_) << "," << fmt(exact) << "\n";
  } else {
    out << "trials " << mc.trials << ", seed " << mc.seed << "\n"
        << "mean revenue " << fmt_short(mc.mean) << " +- " << fmt_short(mc.stderr_) << " (closed form "
        << fmt_short(exact) << ", " << fmt_short((mc.mean - exact) / std::max(mc.stderr_, 1e-300)) << " se)\n";
    out << "purchase frequency";
    for (double f : mc.purchase_freq) out << " " << fmt_short(f);
    out << "\nbuyer-count histogram";
    for (auto h : mc.histogram) out << " " << h;
    out << "\n";
  }
  return kExitOk;
}

inline int cmd_bench(const RunConfig& c, std::ostream& out) {
  if (c.scenarios.empty()) throw DomainError("at least one --scenario (file or directory) is required");
  std::vector<EvalRow> rows;
  for (const auto& path : expand_scenarios(c.scenarios)) {
    const auto s = io::load_scenario(path);
    for (const auto& e : schemes()) {
      if (!e.valid(s)) continue;
      if (!c.scheme.empty() && e.name != c.scheme) continue;
      RunConfig rc = c;
      rc.scheme = e.name;
      const auto p = e.make(s, rc);
      rows.push_back(evaluate(s, scenario_id(path), e.name, p.prices, &p.tag, rc));
    }
  }
  emit_rows(rows, c, out);
  return kExitOk;
}

inline void verdict(std::ostream& out, const std::string& what, bool pass) {
  out << what << ": " << (pass ? "PASS" : "FAIL") << "\n";
}

// Scalar members of a flat document as a one-row CSV.
inline std::string flat_csv(const Json& doc) {
  std::string head, row;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_structured()) continue;
    head += (head.empty() ? "" : ",") + key;
    row += (row.empty() ? "" : ",") + (value.is_number_float() ? fmt(value.get<double>()) : value.dump());
  }
  return head + "\n" + row + "\n";
}

// Log-gap curve for n = 1..max_n, for plotting ratio against n.
inline std::string log_gap_curve(std::size_t max_n) {
  std::string out = "n,discriminatory,harmonic,ln_n,best_anonymous,ratio\n";
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto g = repro::log_gap(n);
    out += std::to_string(n) + "," + fmt(g.discriminatory) + "," + fmt(g.harmonic) + "," + fmt(g.log_n) + "," +
           fmt(g.best_anonymous) + "," + fmt(g.discriminatory / g.best_anonymous) + "\n";
  }
  return out;
}

inline int cmd_repro(const RunConfig& c, std::ostream& out) {
  const bool json = c.format == "json" || c.format == "csv";
  bool pass = false;
  Json doc;
  if (c.repro == "appendix-f") {
    const auto g = repro::adaptive_gap();
    pass = g.pass;
    doc = {{"unrestricted", g.free.benchmark.value}, {"restricted", g.tied.benchmark.value},
           {"delta_unrestricted", g.free.benchmark.value - repro::kAdaptiveFree},
           {"delta_restricted", g.tied.benchmark.value - repro::kAdaptiveTied},
           {"prices_unrestricted", io::to_json(g.free.prices)}, {"prices_restricted", io::to_json(g.tied.prices)}};
    if (!json) {
      out << "unrestricted revenue " << fmt_short(g.free.benchmark.value) << " (reference "
          << fmt_short(repro::kAdaptiveFree) << ", delta " << fmt_short(g.free.benchmark.value - repro::kAdaptiveFree)
          << ")\n"
          << "restricted revenue   " << fmt_short(g.tied.benchmark.value) << " (reference "
          << fmt_short(repro::kAdaptiveTied) << ", delta " << fmt_short(g.tied.benchmark.value - repro::kAdaptiveTied)
          << ")\n"
          << "unrestricted prices  " << io::to_json(g.free.prices).dump() << "\n";
    }
  } else if (c.repro == "lower-bound") {
    const auto g = repro::worst_best_gap(c.n ? c.n : 10);
    pass = g.pass;
    doc = {{"n", g.n}, {"anonymous_price", g.anonymous_price}, {"best_revenue", g.best_revenue},
           {"closed_form", g.closed_form}, {"worst_bound", g.worst_bound}, {"scanned_worst", g.scanned_worst},
           {"price_vectors", g.vectors}, {"ratio", g.best_revenue / std::max(g.worst_bound, 1e-300)}};
    if (!json) {
      out << "n " << g.n << ", anonymous price " << fmt_short(g.anonymous_price) << "\n"
          << "best equilibrium revenue " << fmt_short(g.best_revenue) << " (closed form " << fmt_short(g.closed_form)
          << ")\n"
          << "worst equilibrium revenue <= " << fmt_short(g.worst_bound) << " over " << g.vectors
          << " price vectors (scanned anonymous worst " << fmt_short(g.scanned_worst) << ")\n"
          << "ratio " << fmt_short(g.best_revenue / std::max(g.worst_bound, 1e-300)) << "\n";
    }
  } else if (c.repro == "log-gap") {
    const auto g = repro::log_gap(c.n ? c.n : 100);
    pass = g.pass;
    doc = {{"n", g.n}, {"discriminatory", g.discriminatory}, {"harmonic", g.harmonic}, {"ln_n", g.log_n},
           {"best_anonymous", g.best_anonymous}, {"best_anonymous_price", g.best_anonymous_price}};
    if (!json) {
      out << "n " << g.n << "\n"
          << "discriminatory revenue " << fmt_short(g.discriminatory) << " (harmonic " << fmt_short(g.harmonic)
          << ", ln n " << fmt_short(g.log_n) << ")\n"
          << "best anonymous revenue " << fmt_short(g.best_anonymous) << " at price "
          << fmt_short(g.best_anonymous_price) << " (bound 2)\n";
    }
  } else if (c.repro == "hardness-demo") {
    const auto h = repro::hardness_demo(c.n ? c.n : 200);
    pass = h.pass;
    doc = {{"graphs", h.graphs}, {"independent", h.independent}, {"within_max_independent_set", h.within_mis},
           {"max_residual", h.max_residual}, {"sequential_checked", h.sequential_checked},
           {"sequential_agree", h.sequential_agree}};
    if (!json) {
      out << "graphs " << h.graphs << ": independent supports " << h.independent << ", revenue within MaxIS "
          << h.within_mis << ", max residual " << fmt_short(h.max_residual) << "\n"
          << "sequential greedy = backward induction on " << h.sequential_agree << "/" << h.sequential_checked << "\n";
    }
  } else {
    throw DomainError("unknown reproduction '" + c.repro + "' (appendix-f, lower-bound, log-gap, hardness-demo)");
  }
  if (c.format == "csv") {
    doc["pass"] = pass;
    out << (c.repro == "log-gap" ? log_gap_curve(c.n ? c.n : 100) : flat_csv(doc));
  } else if (json) {
    doc["name"] = c.repro;
    doc["pass"] = pass;
    out << doc.dump(2) << "\n";
  } else {
    verdict(out, c.repro, pass);
  }
  return pass ? kExitOk : kExitReproFailed;
}

inline int cmd_hardness(const RunConfig& c, std::ostream& out) {
  const auto s = single_scenario(c);
  const auto* g = std::get_if<NetworkBased>(&s.externality);
  if (!g) throw DomainError("hardness needs a network scenario");
  if (c.prices.empty()) throw DomainError("--prices is required");
  const auto p = io::load_schedule(c.prices);
  const auto rep = solve_network_sim_greedy(*g, p, s.dists);
  const auto mis = max_independent_set(*g);
  const double residual = sim_residual(s, per_agent(p, s.n()), std::get<Simple>(rep.thresholds).v);
  const bool independent = repro::is_independent(*g, rep.buyer_support);
  const bool pass = independent && residual <= 1e-9 && rep.revenue <= static_cast<double>(mis.size) + 1e-12;
  if (c.format == "json") {
    out << Json{{"buyer_support", rep.buyer_support}, {"revenue", rep.revenue}, {"residual", residual},
                {"max_independent_set", mis.size}, {"witness", mis.witness}, {"pass", pass}}.dump(2)
        << "\n";
  } else {
    out << "greedy buyer support " << Json(rep.buyer_support).dump() << " (independent: " << (independent ? "yes" : "no")
        << ")\nrevenue " << fmt_short(rep.revenue) << ", residual " << fmt_short(residual) << "\n"
        << "maximum independent set " << mis.size << " " << Json(mis.witness).dump() << "\n";
    verdict(out, "revenue <= MaxIS", pass);
  }
  return pass ? kExitOk : kExitReproFailed;
}

inline int dispatch(const RunConfig& c, std::ostream& out) {
  if (c.command == "eq") return cmd_eq(c, out);
  if (c.command == "price") return cmd_price(c, out);
  if (c.command == "eval") return cmd_eval(c, out);
  if (c.command == "simulate") return cmd_simulate(c, out);
  if (c.command == "bench") return cmd_bench(c, out);
  if (c.command == "repro") return cmd_repro(c, out);
  if (c.command == "hardness") return cmd_hardness(c, out);
  throw DomainError("a command is required");
}

// Parses argv and runs the command. Exit 0 on success, 1 on invalid input,
// 2 when a reproduction or check fails.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Posted prices for goods with externalities: equilibria, pricing schemes, revenue and oracles."};
  app.require_subcommand(1);
  app.footer("Schemes:\n" + scheme_list());
  auto common = [&](CLI::App* sub, bool many_scenarios) {
    if (many_scenarios) {
      sub->add_option("--scenario", c.scenarios, "Scenario JSON file or directory (repeatable)");
    } else {
      sub->add_option("--scenario", c.scenarios, "Scenario JSON file")->expected(1);
    }
    sub->add_option("--scheme", c.scheme, "Pricing scheme name");
    sub->add_option("--prices", c.prices, "Price schedule JSON file");
    sub->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--grid", c.grid, "Oracle grid resolution")->check(CLI::Range(10u, 100000u));
    sub->add_option("--k", c.k, "Unit count for k-unit schemes");
    sub->add_option("--out", c.out, "Write output to this file");
    sub->add_option("--format", c.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json", "json-doc"}));
  };
  common(app.add_subcommand("eq", "Solve and print equilibria"), false);
  common(app.add_subcommand("price", "Compute a pricing scheme"), false);
  common(app.add_subcommand("eval", "Closed-form revenue and guarantee ratio"), false);
  common(app.add_subcommand("simulate", "Monte Carlo sale"), false);
  common(app.add_subcommand("bench", "All applicable schemes against their oracles"), true);
  common(app.add_subcommand("hardness", "Greedy network equilibrium against the maximum independent set"), false);
  auto* repro_cmd = app.add_subcommand("repro", "Run a named reproduction");
  repro_cmd->add_option("name", c.repro, "appendix-f, lower-bound, log-gap or hardness-demo")->required();
  repro_cmd->add_option("--n", c.n, "Instance size (or graph count for hardness-demo)");
  repro_cmd->add_option("--out", c.out, "Write output to this file");
  repro_cmd->add_option("--format", c.format, "table, csv (log-gap: curve over n) or json")
      ->check(CLI::IsMember({"table", "csv", "json", "json-doc"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.format == "json-doc") c.format = "json";
  try {
    if (c.out.empty()) return dispatch(c, out);
    std::ostringstream buf;
    const int code = dispatch(c, buf);
    std::ofstream f(c.out);
    if (!f) throw Error("cannot write '" + c.out + "'");
    f << buf.str();
    return code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace sgp::cli

#endif  // SGP_CLI_HPP_
