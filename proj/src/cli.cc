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

#include "qreadout/cli.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "qreadout/chernoff.h"
#include "qreadout/error_model.h"
#include "qreadout/hmm.h"
#include "qreadout/quadrature.h"
#include "qreadout/report.h"

namespace qreadout {
namespace {

OutputFormat format_or(const RunConfig& config, OutputFormat fallback) {
  return config.format.value_or(fallback);
}

void warn(std::ostream& diag, const std::string& message) { diag << "warning: " << message << '\n'; }

void emit_manifest(const RunConfig& config, const RunManifest& manifest, std::ostream& diag) {
  const Json j = to_json(manifest);
  if (config.out_path) {
    std::ofstream f(*config.out_path + ".manifest.json");
    if (!f) throw ConfigError("cannot write manifest next to '" + *config.out_path + "'");
    f << j.dump(2) << '\n';
  } else {
    diag << "manifest: " << j.dump() << '\n';
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

HmmSpec make_spec(const PairConfig& pc, double p_relax, double p_excite, int n_max) {
  HmmSpec spec{pc.pair, pc.p_relax.value_or(p_relax), pc.p_excite.value_or(p_excite), n_max};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pair '") + pc.label + "': " + e.what(), pc.line);
  }
  return spec;
}

}  // namespace

void apply_overrides(RunConfig& config, const CliOverrides& o) {
  if (o.seed) config.simulate.seed = config.collapse.seed = *o.seed;
  if (o.m) config.simulate.m = config.collapse.m = *o.m;
  if (o.threads) config.simulate.threads = config.collapse.threads = *o.threads;
  if (o.tol) config.chernoff.tol = *o.tol;
  if (o.out) config.out_path = *o.out;
  if (o.format) config.format = *o.format;
}

int run_chernoff(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  const PairConfig& pc = config.pairs.front();
  const ChernoffSummary s = chernoff_information(pc.pair, config.chernoff.tol);
  if (s.degenerate) warn(diag, "the two outcome distributions are indistinguishable (C = 0)");
  if (s.boundary_optimum) warn(diag, "the Chernoff optimum lies on the boundary of [0, 1]; alpha is undefined");
  if (format_or(config, OutputFormat::kJson) == OutputFormat::kCsv) {
    write_chernoff_csv(out, s);
  } else {
    Json j = to_json(s);
    j["pair"] = pc.pair.describe();
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

int run_errors(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  ChernoffSummary s;
  if (config.errors.C) {
    s.C = *config.errors.C;
    s.alpha = config.errors.alpha.value_or(1.0);
    s.s_star = config.errors.s_star.value_or(0.5);
  } else {
    s = chernoff_information(config.pairs.front().pair, config.chernoff.tol);
    if (s.degenerate) warn(diag, "the two outcome distributions are indistinguishable (C = 0)");
  }
  const auto& n = config.errors.n_values;
  const ErrorCurve ansatz = gaussian_ansatz(s.C, n);
  const ErrorCurve saddle = saddle_point(s, n);
  std::optional<ErrorCurve> bound;
  if (config.errors.upper_bound) bound = chernoff_upper_bound(s.C, n);
  const auto fallbacks = std::count(saddle.fallback.begin(), saddle.fallback.end(), true);
  if (fallbacks > 0) {
    warn(diag, std::to_string(fallbacks) + " row(s) have alpha*C*N < 0.1; saddle-point column uses exp(-CN)/2");
  }
  if (format_or(config, OutputFormat::kCsv) == OutputFormat::kCsv) {
    write_errors_csv(out, ansatz, saddle, bound ? &*bound : nullptr);
  } else {
    Json curves = Json::array({to_json(ansatz), to_json(saddle)});
    if (bound) curves.push_back(to_json(*bound));
    Json j{{"metadata",
            {{"summary", to_json(s)}, {"tol", json_number(config.chernoff.tol)}, {"fallback_threshold", 0.1}}},
           {"curves", curves}};
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

int run_advantage(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  if (config.advantage.grid) {
    const auto& a = config.advantage;
    const auto eps = log_spaced(a.eps_g_min, a.eps_g_max, a.eps_g_count);
    std::vector<double> eta;
    if (a.eta_min > 0) {
      eta = log_spaced(a.eta_min, a.eta_max, a.eta_count);
    } else {
      for (int i = 0; i < a.eta_count; ++i) {
        eta.push_back(a.eta_count == 1 ? a.eta_max : a.eta_max * i / (a.eta_count - 1));
      }
    }
    const auto grid = advantage_grid(eps, eta, config.simulate.threads);
    if (format_or(config, OutputFormat::kCsv) == OutputFormat::kCsv) {
      write_grid_csv(out, grid);
    } else {
      Json j{{"metadata",
              {{"method", "closed-form conversion Chernoff"},
               {"eps_g", {json_number(a.eps_g_min), json_number(a.eps_g_max), a.eps_g_count}},
               {"eta", {json_number(a.eta_min), json_number(a.eta_max), a.eta_count}}}},
             {"grid", to_json(grid)}};
      out << j.dump(2) << '\n';
    }
    return kExitOk;
  }
  const AdvantageReport r = advantage(config.pairs.front().pair);
  if (r.binary_perfect) warn(diag, "hard decoding is error-free; C_b is infinite and the advantage undefined");
  if (r.C < 1e-12) warn(diag, "the two outcome distributions are indistinguishable (C = 0)");
  if (format_or(config, OutputFormat::kJson) == OutputFormat::kCsv) {
    write_advantage_csv(out, r);
  } else {
    out << to_json(r).dump(2) << '\n';
  }
  return kExitOk;
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  const auto start = std::chrono::steady_clock::now();
  const auto& sim = config.simulate;
  const PairConfig& pc = config.pairs.front();
  const int n_max = *std::max_element(sim.n_values.begin(), sim.n_values.end());
  const HmmSpec spec = make_spec(pc, sim.p_relax, sim.p_excite, n_max);
  if (spec.p_relax > 0.0 || spec.p_excite > 0.0) {
    const ChernoffSummary s = chernoff_information(spec.pair, config.chernoff.tol);
    if (spec.outside_single_shot_regime(s.C)) {
      warn(diag, "p_relax >= min(C, 1): outside the single-shot regime, results are extrapolation");
    }
  }
  const McEstimate est = monte_carlo(spec, sim.m, sim.n_values, sim.seed, sim.threads);
  for (const auto& p : est.points) {
    if (p.errors_plus == 0 || p.errors_minus == 0) {
      warn(diag, "N=" + std::to_string(p.n) + " has a zero-error cell; 95% upper bound 3/m = " +
                     format12(3.0 / static_cast<double>(sim.m)));
    }
  }
  RunManifest manifest{"simulate", sim.seed, sim.m, sim.threads, {spec_hash(spec)}, seconds_since(start)};
  if (format_or(config, OutputFormat::kCsv) == OutputFormat::kCsv) {
    write_simulate_csv(out, est);
    emit_manifest(config, manifest, diag);
  } else {
    out << Json{{"manifest", to_json(manifest)}, {"estimate", to_json(est)}}.dump(2) << '\n';
  }
  return kExitOk;
}

int run_collapse(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  const auto start = std::chrono::steady_clock::now();
  const auto& col = config.collapse;
  const int n_max = *std::max_element(col.n_values.begin(), col.n_values.end());
  std::vector<CollapseInput> inputs;
  for (const auto& pc : config.pairs) {
    const ChernoffSummary s = chernoff_information(pc.pair, config.chernoff.tol);
    if (s.degenerate) throw ConfigError("pair '" + pc.label + "' is degenerate (C = 0)", pc.line);
    if (pc.p_relax || pc.p_excite) {
      inputs.push_back({pc.label, make_spec(pc, 0.0, 0.0, n_max), s});
      continue;
    }
    for (double ratio : col.c_over_p) {
      const double p = std::isinf(ratio) ? 0.0 : s.C / ratio;
      const std::string label = col.c_over_p.size() == 1 ? pc.label : pc.label + "@" + format12(ratio);
      PairConfig with_rate = pc;
      with_rate.p_relax = p;
      inputs.push_back({label, make_spec(with_rate, 0.0, 0.0, n_max), s});
    }
  }
  RunManifest manifest{"collapse", col.seed, col.m, col.threads, {}, 0.0};
  for (const auto& in : inputs) {
    if (in.spec.outside_single_shot_regime(in.summary.C)) {
      warn(diag, "'" + in.label + "' is outside the single-shot regime");
    }
    manifest.spec_hashes.push_back(spec_hash(in.spec));
  }
  const CollapseResult result = universality_collapse(inputs, col.m, col.n_values, col.seed, col.cn_min,
                                                      col.cn_max, col.rel_tol, col.threads);
  manifest.wall_time_s = seconds_since(start);
  diag << "collapse: " << result.comparisons.size() << " comparisons, max |d ln e| = "
       << format12(result.max_deviation) << ", worst deviation/allowed = " << format12(result.worst_ratio)
       << (result.collapsed ? ", curves collapse" : ", curves do NOT collapse") << '\n';
  if (format_or(config, OutputFormat::kCsv) == OutputFormat::kCsv) {
    write_collapse_csv(out, result);
    emit_manifest(config, manifest, diag);
  } else {
    out << Json{{"manifest", to_json(manifest)}, {"collapse", to_json(result)}}.dump(2) << '\n';
  }
  return kExitOk;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  try {
    switch (config.subcommand) {
      case Subcommand::kChernoff: return run_chernoff(config, out, diag);
      case Subcommand::kErrors: return run_errors(config, out, diag);
      case Subcommand::kAdvantage: return run_advantage(config, out, diag);
      case Subcommand::kSimulate: return run_simulate(config, out, diag);
      case Subcommand::kCollapse: return run_collapse(config, out, diag);
    }
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    diag << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    diag << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  CLI::App app{"Repetitive readout analysis: Chernoff information, error curves, Monte Carlo"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0, m = 0;
  int threads = 0;
  double tol = 0.0;
  std::vector<std::pair<Subcommand, CLI::App*>> subs;
  for (auto cmd : {Subcommand::kChernoff, Subcommand::kErrors, Subcommand::kAdvantage, Subcommand::kSimulate,
                   Subcommand::kCollapse}) {
    CLI::App* sub = app.add_subcommand(to_string(cmd));
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--m", m, "trajectories per eigenvalue")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", tol, "tolerance on s*")->check(CLI::PositiveNumber);
    subs.emplace_back(cmd, sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage, errors;
    const int code = app.exit(e, usage, errors);
    out << usage.str();
    diag << errors.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  Subcommand cmd = Subcommand::kChernoff;
  CLI::App* chosen = nullptr;
  for (auto& [c, sub] : subs) {
    if (sub->parsed()) {
      cmd = c;
      chosen = sub;
    }
  }
  CliOverrides o;
  if (chosen->count("--seed")) o.seed = seed;
  if (chosen->count("--m")) o.m = m;
  if (chosen->count("--threads")) o.threads = threads;
  if (chosen->count("--tol")) o.tol = tol;
  if (chosen->count("--out")) o.out = out_path;
  if (chosen->count("--format")) o.format = format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;

  RunConfig config;
  try {
    config = load_run_config(cmd, config_path);
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  apply_overrides(config, o);

  if (!config.out_path) return run(config, out, diag);
  std::ostringstream buffer;
  const int code = run(config, buffer, diag);
  if (code == kExitOk) {
    std::ofstream f(*config.out_path);
    if (!f) {
      diag << "error: cannot write '" << *config.out_path << "'\n";
      return kExitConfig;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace qreadout
