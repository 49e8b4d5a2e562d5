// Copyright 2026 The qreadout Authors
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

#include "qreadout/report.h"

#include <cmath>
#include <cstdio>
#include <limits>

namespace qreadout {
namespace {

Json number_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

std::vector<double> numbers_from(const Json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(number_from_json(x));
  return v;
}

const char* sign_label(int a0) { return a0 > 0 ? "+1" : "-1"; }

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

double number_from_json(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("unexpected string '" + s + "' for a number");
  }
  return j.get<double>();
}

Json to_json(const ChernoffSummary& s) {
  return Json{{"C", json_number(s.C)},
              {"s_star", json_number(s.s_star)},
              {"alpha", json_number(s.alpha)},
              {"k2", json_number(s.k2)},
              {"bhattacharyya", json_number(s.bhattacharyya)},
              {"s_tolerance", json_number(s.s_tolerance)},
              {"quadrature_error", json_number(s.quadrature_error)},
              {"degenerate", s.degenerate},
              {"boundary_optimum", s.boundary_optimum}};
}

ChernoffSummary chernoff_summary_from_json(const Json& j) {
  ChernoffSummary s;
  s.C = number_from_json(j.at("C"));
  s.s_star = number_from_json(j.at("s_star"));
  s.alpha = number_from_json(j.at("alpha"));
  s.k2 = number_from_json(j.at("k2"));
  s.bhattacharyya = number_from_json(j.at("bhattacharyya"));
  s.s_tolerance = number_from_json(j.at("s_tolerance"));
  s.quadrature_error = number_from_json(j.at("quadrature_error"));
  s.degenerate = j.at("degenerate").get<bool>();
  s.boundary_optimum = j.at("boundary_optimum").get<bool>();
  return s;
}

Json to_json(const ErrorCurve& c) {
  Json fallback = Json::array();
  for (bool b : c.fallback) fallback.push_back(b);
  return Json{{"method", to_string(c.method)},   {"n_values", number_array(c.n_values)},
              {"e_avg", number_array(c.e_avg)},  {"e_plus", number_array(c.e_plus)},
              {"e_minus", number_array(c.e_minus)}, {"uncertainties", number_array(c.uncertainties)},
              {"fallback", fallback}};
}

ErrorCurve error_curve_from_json(const Json& j) {
  ErrorCurve c;
  c.method = curve_method_from_string(j.at("method").get<std::string>());
  c.n_values = numbers_from(j.at("n_values"));
  c.e_avg = numbers_from(j.at("e_avg"));
  c.e_plus = numbers_from(j.at("e_plus"));
  c.e_minus = numbers_from(j.at("e_minus"));
  c.uncertainties = numbers_from(j.at("uncertainties"));
  for (const auto& b : j.at("fallback")) c.fallback.push_back(b.get<bool>());
  return c;
}

Json to_json(const AdvantageReport& r) {
  return Json{{"C", json_number(r.C)},
              {"C_b", json_number(r.C_b)},
              {"advantage", json_number(r.advantage)},
              {"eps_plus", json_number(r.eps_plus)},
              {"eps_minus", json_number(r.eps_minus)},
              {"s_star_b", json_number(r.s_star_b)},
              {"binary_perfect", r.binary_perfect}};
}

AdvantageReport advantage_report_from_json(const Json& j) {
  AdvantageReport r;
  r.C = number_from_json(j.at("C"));
  r.C_b = number_from_json(j.at("C_b"));
  r.advantage = number_from_json(j.at("advantage"));
  r.eps_plus = number_from_json(j.at("eps_plus"));
  r.eps_minus = number_from_json(j.at("eps_minus"));
  r.s_star_b = number_from_json(j.at("s_star_b"));
  r.binary_perfect = j.at("binary_perfect").get<bool>();
  return r;
}

Json to_json(const std::vector<AdvantageCell>& grid) {
  Json a = Json::array();
  for (const auto& c : grid) {
    a.push_back(Json{{"eps_g", json_number(c.eps_g)}, {"eta", json_number(c.eta)}, {"r", json_number(c.r)},
                     {"C", json_number(c.C)},         {"C_b", json_number(c.C_b)},
                     {"advantage", json_number(c.advantage)}});
  }
  return a;
}

std::vector<AdvantageCell> advantage_grid_from_json(const Json& j) {
  std::vector<AdvantageCell> grid;
  for (const auto& c : j) {
    grid.push_back({number_from_json(c.at("eps_g")), number_from_json(c.at("eta")), number_from_json(c.at("r")),
                    number_from_json(c.at("C")), number_from_json(c.at("C_b")),
                    number_from_json(c.at("advantage"))});
  }
  return grid;
}

Json to_json(const McEstimate& e) {
  Json points = Json::array();
  for (const auto& p : e.points) {
    points.push_back(Json{{"N", p.n},
                          {"errors_plus", p.errors_plus},
                          {"errors_minus", p.errors_minus},
                          {"e_plus", json_number(p.e_plus)},
                          {"e_minus", json_number(p.e_minus)},
                          {"e_avg", json_number(p.e_avg)},
                          {"delta_plus", json_number(p.delta_plus)},
                          {"delta_minus", json_number(p.delta_minus)},
                          {"delta_avg", json_number(p.delta_avg)},
                          {"bound_plus", json_number(p.bound_plus)},
                          {"bound_minus", json_number(p.bound_minus)}});
  }
  return Json{{"m", e.m}, {"seed", e.seed}, {"points", points}};
}

McEstimate mc_estimate_from_json(const Json& j) {
  McEstimate e;
  e.m = j.at("m").get<std::uint64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& p : j.at("points")) {
    McPoint q;
    q.n = p.at("N").get<int>();
    q.errors_plus = p.at("errors_plus").get<std::uint64_t>();
    q.errors_minus = p.at("errors_minus").get<std::uint64_t>();
    q.e_plus = number_from_json(p.at("e_plus"));
    q.e_minus = number_from_json(p.at("e_minus"));
    q.e_avg = number_from_json(p.at("e_avg"));
    q.delta_plus = number_from_json(p.at("delta_plus"));
    q.delta_minus = number_from_json(p.at("delta_minus"));
    q.delta_avg = number_from_json(p.at("delta_avg"));
    q.bound_plus = number_from_json(p.at("bound_plus"));
    q.bound_minus = number_from_json(p.at("bound_minus"));
    e.points.push_back(q);
  }
  return e;
}

Json to_json(const CollapseResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"label", row.label},
                        {"C", json_number(row.C)},
                        {"c_over_p", json_number(row.c_over_p)},
                        {"N", row.n},
                        {"CN", json_number(row.cn)},
                        {"ln_e", json_number(row.ln_e)},
                        {"delta_ln_e", json_number(row.delta_ln_e)}});
  }
  Json comparisons = Json::array();
  for (const auto& c : r.comparisons) {
    comparisons.push_back(Json{{"first", c.first},
                               {"second", c.second},
                               {"CN", json_number(c.cn)},
                               {"deviation", json_number(c.deviation)},
                               {"allowed", json_number(c.allowed)}});
  }
  return Json{{"rows", rows},
              {"comparisons", comparisons},
              {"max_deviation", json_number(r.max_deviation)},
              {"worst_ratio", json_number(r.worst_ratio)},
              {"collapsed", r.collapsed}};
}

CollapseResult collapse_result_from_json(const Json& j) {
  CollapseResult r;
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("label").get<std::string>(), number_from_json(row.at("C")),
                      number_from_json(row.at("c_over_p")), row.at("N").get<int>(),
                      number_from_json(row.at("CN")), number_from_json(row.at("ln_e")),
                      number_from_json(row.at("delta_ln_e"))});
  }
  for (const auto& c : j.at("comparisons")) {
    r.comparisons.push_back({c.at("first").get<std::string>(), c.at("second").get<std::string>(),
                             number_from_json(c.at("CN")), number_from_json(c.at("deviation")),
                             number_from_json(c.at("allowed"))});
  }
  r.max_deviation = number_from_json(j.at("max_deviation"));
  r.worst_ratio = number_from_json(j.at("worst_ratio"));
  r.collapsed = j.at("collapsed").get<bool>();
  return r;
}

Json to_json(const RunManifest& m) {
  return Json{{"subcommand", m.subcommand},
              {"seed", m.seed},
              {"m", m.m},
              {"threads", m.threads},
              {"spec_hashes", m.spec_hashes},
              {"wall_time_s", json_number(m.wall_time_s)}};
}

std::string spec_hash(const HmmSpec& spec) {
  const std::string text = spec.pair.describe() + "|p_relax=" + format12(spec.p_relax) +
                           "|p_excite=" + format12(spec.p_excite) + "|n_max=" + std::to_string(spec.n_max);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_chernoff_csv(std::ostream& out, const ChernoffSummary& s) {
  out << "C,s_star,alpha,k2,bhattacharyya,s_tolerance,quadrature_error,degenerate\n"
      << format12(s.C) << ',' << format12(s.s_star) << ',' << format12(s.alpha) << ',' << format12(s.k2) << ','
      << format12(s.bhattacharyya) << ',' << format12(s.s_tolerance) << ',' << format12(s.quadrature_error) << ','
      << (s.degenerate ? 1 : 0) << '\n';
}

void write_errors_csv(std::ostream& out, const ErrorCurve& ansatz, const ErrorCurve& saddle,
                      const ErrorCurve* upper_bound) {
  out << "N,gaussian_ansatz,saddle_point,saddle_plus,saddle_minus,fallback";
  if (upper_bound) out << ",chernoff_bound";
  out << '\n';
  for (std::size_t i = 0; i < ansatz.n_values.size(); ++i) {
    out << format12(ansatz.n_values[i]) << ',' << format12(ansatz.e_avg[i]) << ',' << format12(saddle.e_avg[i])
        << ',' << format12(saddle.e_plus[i]) << ',' << format12(saddle.e_minus[i]) << ','
        << (saddle.fallback[i] ? 1 : 0);
    if (upper_bound) out << ',' << format12(upper_bound->e_avg[i]);
    out << '\n';
  }
}

void write_advantage_csv(std::ostream& out, const AdvantageReport& r) {
  out << "C,C_b,advantage,eps_plus,eps_minus,s_star_b\n"
      << format12(r.C) << ',' << format12(r.C_b) << ',' << format12(r.advantage) << ',' << format12(r.eps_plus)
      << ',' << format12(r.eps_minus) << ',' << format12(r.s_star_b) << '\n';
}

void write_grid_csv(std::ostream& out, const std::vector<AdvantageCell>& grid) {
  out << "eps_g,eta,r,C,C_b,advantage\n";
  for (const auto& c : grid) {
    out << format12(c.eps_g) << ',' << format12(c.eta) << ',' << format12(c.r) << ',' << format12(c.C) << ','
        << format12(c.C_b) << ',' << format12(c.advantage) << '\n';
  }
}

void write_simulate_csv(std::ostream& out, const McEstimate& e) {
  out << "a0,N,e,delta_e\n";
  for (int a0 : {+1, -1}) {
    for (const auto& p : e.points) {
      out << sign_label(a0) << ',' << p.n << ',' << format12(a0 > 0 ? p.e_plus : p.e_minus) << ','
          << format12(a0 > 0 ? p.delta_plus : p.delta_minus) << '\n';
    }
  }
  for (const auto& p : e.points) {
    out << "avg," << p.n << ',' << format12(p.e_avg) << ',' << format12(p.delta_avg) << '\n';
  }
}

void write_collapse_csv(std::ostream& out, const CollapseResult& r) {
  out << "label,C,c_over_p,N,CN,ln_e,delta_ln_e\n";
  for (const auto& row : r.rows) {
    out << row.label << ',' << format12(row.C) << ',' << format12(row.c_over_p) << ',' << row.n << ','
        << format12(row.cn) << ',' << format12(row.ln_e) << ',' << format12(row.delta_ln_e) << '\n';
  }
}

}  // namespace qreadout
