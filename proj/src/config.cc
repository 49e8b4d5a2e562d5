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

#include "qreadout/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qreadout {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> try_number(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Checks keys against an allow-list and hands out typed values.
class SectionReader {
 public:
  SectionReader(const IniSection& section, std::set<std::string> allowed) : section_(section) {
    for (const auto& e : section.entries) {
      if (!allowed.count(e.key)) {
        throw ConfigError("unknown key '" + e.key + "' in section [" + section.name + "]", e.line);
      }
    }
  }

  const IniEntry* find(const std::string& key) const {
    for (const auto& e : section_.entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  std::optional<double> number(const std::string& key) const {
    const IniEntry* e = find(key);
    if (!e) return std::nullopt;
    auto v = try_number(e->value);
    if (!v) throw ConfigError("key '" + key + "': expected a number, got '" + e->value + "'", e->line);
    return v;
  }

  double required(const std::string& key) const {
    auto v = number(key);
    if (!v) throw ConfigError("section [" + section_.name + "] is missing key '" + key + "'", section_.line);
    return *v;
  }

  std::optional<std::uint64_t> count(const std::string& key) const {
    auto v = number(key);
    if (!v) return std::nullopt;
    if (!(*v >= 0) || *v != std::floor(*v) || *v > 1.8e19) {
      throw ConfigError("key '" + key + "': expected a non-negative integer", find(key)->line);
    }
    return static_cast<std::uint64_t>(*v);
  }

  std::optional<bool> flag(const std::string& key) const {
    const IniEntry* e = find(key);
    if (!e) return std::nullopt;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("key '" + key + "': expected true or false", e->line);
  }

  std::optional<std::vector<double>> list(const std::string& key) const {
    const IniEntry* e = find(key);
    if (!e) return std::nullopt;
    try {
      return parse_number_list(e->value);
    } catch (const ConfigError& err) {
      throw ConfigError("key '" + key + "': " + err.what(), e->line);
    }
  }

  std::optional<std::vector<int>> int_list(const std::string& key) const {
    auto values = list(key);
    if (!values) return std::nullopt;
    std::vector<int> out;
    for (double v : *values) {
      if (!(v >= 1) || v != std::floor(v) || v > 1e9) {
        throw ConfigError("key '" + key + "': repetition counts must be positive integers", find(key)->line);
      }
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  std::optional<std::string> text(const std::string& key) const {
    const IniEntry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

 private:
  const IniSection& section_;
};

std::vector<GaussianComponent> parse_mixture(const std::string& text, int line) {
  // "weight:mean:sigma; weight:mean:sigma"
  std::vector<GaussianComponent> out;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError("mixture component '" + item + "' is not weight:mean:sigma", line);
    GaussianComponent c;
    auto w = try_number(parts[0]), m = try_number(parts[1]), s = try_number(parts[2]);
    if (!w || !m || !s) throw ConfigError("mixture component '" + item + "' is not numeric", line);
    c.weight = *w;
    c.mean = *m;
    c.sigma = *s;
    out.push_back(c);
  }
  if (out.empty()) throw ConfigError("empty mixture", line);
  return out;
}

PairConfig build_pair(const IniSection& section, const std::string& label,
                      const std::filesystem::path& base_dir) {
  const IniEntry* fam = nullptr;
  for (const auto& e : section.entries) {
    if (e.key == "family") fam = &e;
  }
  if (!fam) throw ConfigError("section [" + section.name + "] is missing key 'family'", section.line);

  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"gaussian", {"r"}},
      {"poissonian", {"mu_plus", "mu_minus"}},
      {"cauchy", {"gamma"}},
      {"gaussian_conversion", {"r", "eta"}},
      {"binary", {"eps_plus", "eps_minus", "eps"}},
      {"empirical", {"hist_plus", "hist_minus", "floor", "lambda_max"}},
      {"gaussian_mixture", {"plus", "minus"}},
  };
  const std::string family = lower(fam->value);
  auto it = kKeys.find(family);
  if (it == kKeys.end()) throw ConfigError("unknown family '" + fam->value + "'", fam->line);
  std::set<std::string> allowed = it->second;
  allowed.insert({"family", "p_relax", "p_excite"});
  SectionReader r(section, allowed);

  PairConfig pc{label, OutcomePair::gaussian(1.0), r.number("p_relax"), r.number("p_excite"), section.line};
  try {
    if (family == "gaussian") {
      pc.pair = OutcomePair::gaussian(r.required("r"));
    } else if (family == "poissonian") {
      pc.pair = OutcomePair::poissonian(r.required("mu_plus"), r.required("mu_minus"));
    } else if (family == "cauchy") {
      pc.pair = OutcomePair::cauchy(r.required("gamma"));
    } else if (family == "gaussian_conversion") {
      pc.pair = OutcomePair::gaussian_with_conversion(r.required("r"), r.required("eta"));
    } else if (family == "binary") {
      auto eps = r.number("eps");
      if (eps) {
        if (r.find("eps_plus") || r.find("eps_minus")) {
          throw ConfigError("give either 'eps' or 'eps_plus'/'eps_minus'", r.find("eps")->line);
        }
        pc.pair = OutcomePair::binary(*eps, *eps);
      } else {
        pc.pair = OutcomePair::binary(r.required("eps_plus"), r.required("eps_minus"));
      }
    } else if (family == "empirical") {
      auto resolve = [&](const std::string& key) {
        auto t = r.text(key);
        if (!t) throw ConfigError("section [" + section.name + "] is missing key '" + key + "'", section.line);
        std::filesystem::path p(*t);
        if (p.is_relative()) p = base_dir / p;
        try {
          return load_histogram_csv(p);
        } catch (const ConfigError& e) {
          throw ConfigError(std::string(e.what()), r.find(key)->line);
        }
      };
      Histogram hp = resolve("hist_plus");
      Histogram hm = resolve("hist_minus");
      pc.pair = OutcomePair::empirical(hp, hm, r.number("floor").value_or(1e-8),
                                       r.number("lambda_max").value_or(30.0));
    } else {
      auto p = r.text("plus"), m = r.text("minus");
      if (!p || !m) throw ConfigError("gaussian_mixture needs 'plus' and 'minus'", section.line);
      pc.pair = OutcomePair::gaussian_mixture(parse_mixture(*p, r.find("plus")->line),
                                              parse_mixture(*m, r.find("minus")->line));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid pair parameters: ") + e.what(), section.line);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid pair parameters: ") + e.what(), section.line);
  }
  return pc;
}

}  // namespace

std::vector<IniSection> parse_ini(std::istream& in) {
  std::vector<IniSection> sections;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      std::string name = lower(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ConfigError("empty section name", line_no);
      for (const auto& s : sections) {
        if (s.name == name) throw ConfigError("duplicate section [" + name + "]", line_no);
      }
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (sections.empty()) throw ConfigError("key outside of any section", line_no);
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    for (const auto& e : sections.back().entries) {
      if (e.key == key) throw ConfigError("duplicate key '" + key + "'", line_no);
    }
    sections.back().entries.push_back({key, value, line_no});
  }
  return sections;
}

std::string to_string(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::kChernoff: return "chernoff";
    case Subcommand::kErrors: return "errors";
    case Subcommand::kAdvantage: return "advantage";
    case Subcommand::kSimulate: return "simulate";
    case Subcommand::kCollapse: return "collapse";
  }
  return "?";
}

Subcommand subcommand_from_string(const std::string& name) {
  for (auto c : {Subcommand::kChernoff, Subcommand::kErrors, Subcommand::kAdvantage, Subcommand::kSimulate,
                 Subcommand::kCollapse}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("empty list item");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      auto v = try_number(item);
      if (!v) throw ConfigError("'" + item + "' is not a number");
      out.push_back(*v);
      continue;
    }
    std::string hi_text = item.substr(dots + 2);
    double step = 1.0;
    if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
      auto s = try_number(hi_text.substr(colon + 1));
      if (!s || !(*s > 0)) throw ConfigError("range step in '" + item + "' must be positive");
      step = *s;
      hi_text = hi_text.substr(0, colon);
    }
    auto lo = try_number(item.substr(0, dots));
    auto hi = try_number(hi_text);
    if (!lo || !hi || !std::isfinite(*lo) || !std::isfinite(*hi) || *hi < *lo) {
      throw ConfigError("malformed range '" + item + "'");
    }
    const auto n = static_cast<long>(std::floor((*hi - *lo) / step + 1e-9));
    if (n > 1000000) throw ConfigError("range '" + item + "' is too long");
    for (long k = 0; k <= n; ++k) out.push_back(*lo + static_cast<double>(k) * step);
  }
  return out;
}

Histogram load_histogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open histogram file '" + path.string() + "'");
  Histogram h;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() != 2) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    auto c = try_number(cols[0]), n = try_number(cols[1]);
    if (!c || !n) {
      if (line_no == 1 || (h.centers.empty() && !c)) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    h.centers.push_back(*c);
    h.counts.push_back(*n);
  }
  if (h.centers.empty()) throw ConfigError("histogram file '" + path.string() + "' has no rows");
  return h;
}

RunConfig build_run_config(Subcommand cmd, const std::vector<IniSection>& sections,
                           const std::filesystem::path& base_dir) {
  RunConfig rc;
  rc.subcommand = cmd;
  for (const auto& s : sections) {
    if (s.name == "pair" || s.name.rfind("pair.", 0) == 0) {
      const std::string label = s.name == "pair" ? "pair" : s.name.substr(5);
      if (label.empty()) throw ConfigError("empty pair label", s.line);
      rc.pairs.push_back(build_pair(s, label, base_dir));
    } else if (s.name == "chernoff") {
      SectionReader r(s, {"tol"});
      rc.chernoff.tol = r.number("tol").value_or(rc.chernoff.tol);
    } else if (s.name == "errors") {
      SectionReader r(s, {"n", "c", "alpha", "s_star", "upper_bound"});
      if (auto n = r.list("n")) {
        for (double v : *n) {
          if (!(v > 0 && std::isfinite(v))) {
            throw ConfigError("key 'n': repetition counts must be positive", r.find("n")->line);
          }
        }
        rc.errors.n_values = *n;
      }
      rc.errors.C = r.number("c");
      rc.errors.alpha = r.number("alpha");
      rc.errors.s_star = r.number("s_star");
      rc.errors.upper_bound = r.flag("upper_bound").value_or(false);
    } else if (s.name == "advantage") {
      SectionReader r(s, {"eps_g_min", "eps_g_max", "eps_g_count", "eta_min", "eta_max", "eta_count"});
      auto& a = rc.advantage;
      a.grid = !s.entries.empty();
      a.eps_g_min = r.number("eps_g_min").value_or(a.eps_g_min);
      a.eps_g_max = r.number("eps_g_max").value_or(a.eps_g_max);
      a.eps_g_count = static_cast<int>(r.count("eps_g_count").value_or(a.eps_g_count));
      a.eta_min = r.number("eta_min").value_or(a.eta_min);
      a.eta_max = r.number("eta_max").value_or(a.eta_max);
      a.eta_count = static_cast<int>(r.count("eta_count").value_or(a.eta_count));
      if (!(a.eps_g_min > 0 && a.eps_g_max < 0.5 && a.eps_g_min <= a.eps_g_max && a.eps_g_count >= 1)) {
        throw ConfigError("eps_g range must satisfy 0 < min <= max < 0.5 with count >= 1", s.line);
      }
      if (!(a.eta_min >= 0 && a.eta_max < 0.5 && a.eta_min <= a.eta_max && a.eta_count >= 1)) {
        throw ConfigError("eta range must satisfy 0 <= min <= max < 0.5 with count >= 1", s.line);
      }
    } else if (s.name == "simulate") {
      SectionReader r(s, {"m", "seed", "n", "p_relax", "p_excite", "threads"});
      auto& sim = rc.simulate;
      sim.m = r.count("m").value_or(sim.m);
      sim.seed = r.count("seed").value_or(sim.seed);
      if (auto n = r.int_list("n")) sim.n_values = *n;
      sim.p_relax = r.number("p_relax").value_or(0.0);
      sim.p_excite = r.number("p_excite").value_or(0.0);
      sim.threads = static_cast<int>(r.count("threads").value_or(0));
    } else if (s.name == "collapse") {
      SectionReader r(s, {"m", "seed", "n", "c_over_p", "cn_min", "cn_max", "rel_tol", "threads"});
      auto& col = rc.collapse;
      col.m = r.count("m").value_or(col.m);
      col.seed = r.count("seed").value_or(col.seed);
      if (auto n = r.int_list("n")) col.n_values = *n;
      if (auto c = r.list("c_over_p")) col.c_over_p = *c;
      col.cn_min = r.number("cn_min").value_or(col.cn_min);
      col.cn_max = r.number("cn_max").value_or(col.cn_max);
      col.rel_tol = r.number("rel_tol").value_or(col.rel_tol);
      col.threads = static_cast<int>(r.count("threads").value_or(0));
      for (double v : col.c_over_p) {
        if (!(v > 0)) throw ConfigError("c_over_p values must be positive (inf for QND)", s.line);
      }
    } else {
      throw ConfigError("unknown section [" + s.name + "]", s.line);
    }
  }

  const bool has_explicit = rc.errors.C.has_value();
  if (cmd == Subcommand::kErrors && has_explicit) {
    if (!rc.pairs.empty()) throw ConfigError("[errors] gives C explicitly; remove the [pair] section");
  } else if (cmd == Subcommand::kErrors && (rc.errors.alpha || rc.errors.s_star)) {
    throw ConfigError("[errors] alpha/s_star require C");
  }
  const bool needs_pair = (cmd == Subcommand::kChernoff || cmd == Subcommand::kSimulate ||
                           (cmd == Subcommand::kErrors && !has_explicit) ||
                           (cmd == Subcommand::kAdvantage && !rc.advantage.grid));
  if (needs_pair && rc.pairs.size() != 1) {
    throw ConfigError(rc.pairs.empty() ? "config needs a [pair] section"
                                       : "this subcommand takes exactly one pair section");
  }
  if (cmd == Subcommand::kAdvantage && rc.advantage.grid && !rc.pairs.empty()) {
    throw ConfigError("give either a [pair] section or [advantage] grid ranges, not both");
  }
  if (cmd == Subcommand::kCollapse && rc.pairs.empty()) throw ConfigError("collapse needs at least one pair");

  if (rc.errors.n_values.empty()) rc.errors.n_values = parse_number_list("1..12");
  for (auto* n : {&rc.simulate.n_values, &rc.collapse.n_values}) {
    if (n->empty()) {
      for (int k = 1; k <= 12; ++k) n->push_back(k);
    }
  }
  return rc;
}

RunConfig load_run_config(Subcommand cmd, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::vector<IniSection> sections;
  try {
    sections = parse_ini(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return build_run_config(cmd, sections, path.parent_path());
}

}  // namespace qreadout
