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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "qreadout/cli.h"
#include "qreadout/report.h"

namespace qreadout {
namespace {

namespace fs = std::filesystem;

const fs::path kGolden = fs::path(QREADOUT_TEST_DATA_DIR) / "golden";

struct CliResult {
  int code = -1;
  std::string out;
  std::string diag;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qreadout");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, diag;
  CliResult r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, diag);
  r.out = out.str();
  r.diag = diag.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qreadout_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

  fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(Cli, ChernoffGaussianJson) {
  const auto r = run_cli({"chernoff", "--config", write("g.ini", "[pair]\nfamily = gaussian\nr = 1\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  EXPECT_TRUE(r.diag.empty()) << r.diag;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(number_from_json(j["C"]), 0.5, 1e-9);
  EXPECT_NEAR(number_from_json(j["alpha"]), 1.0, 1e-6);
  EXPECT_EQ(j["pair"], "gaussian r=1");
  const ChernoffSummary s = chernoff_summary_from_json(j);
  EXPECT_EQ(to_json(s).dump(), [&] {
    Json k = j;
    k.erase("pair");
    return k.dump();
  }());
}

TEST_F(Cli, IdenticalPairWarnsButSucceeds) {
  const auto r = run_cli(
      {"chernoff", "--config", write("id.ini", "[pair]\nfamily = poissonian\nmu_plus = 3\nmu_minus = 3\n")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(number_from_json(Json::parse(r.out)["C"]), 0.0);
  EXPECT_NE(r.diag.find("warning: the two outcome distributions are indistinguishable"), std::string::npos);
}

TEST_F(Cli, EmpiricalFromSyntheticGaussianHistograms) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> plus(1.0, 1.0), minus(-1.0, 1.0);
  const double lo = -7.0, width = 0.05;
  const int bins = 280;
  std::vector<double> hp(bins), hm(bins);
  auto bin = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - lo) / width)), 0, bins - 1); };
  for (int i = 0; i < 1000000; ++i) {
    hp[bin(plus(gen))] += 1;
    hm[bin(minus(gen))] += 1;
  }
  std::ostringstream fp, fm;
  fp << "bin_center,count\n";
  for (int b = 0; b < bins; ++b) {
    fp << lo + (b + 0.5) * width << ',' << hp[b] << '\n';
    fm << lo + (b + 0.5) * width << ',' << hm[b] << '\n';
  }
  write("plus.csv", fp.str());
  write("minus.csv", fm.str());
  const auto r = run_cli({"chernoff", "--config",
                          write("e.ini", "[pair]\nfamily = empirical\nhist_plus = plus.csv\nhist_minus = minus.csv\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const double c = number_from_json(Json::parse(r.out)["C"]);
  EXPECT_TRUE(std::isfinite(c));
  EXPECT_NEAR(c, 0.5, 0.05 * 0.5);
}

TEST_F(Cli, ConfigErrorsExitOneWithLine) {
  auto r = run_cli({"chernoff", "--config", write("bad.ini", "[pair]\nfamily = gaussian\nr = 1\ncolour = red\n")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.diag.find("line 4"), std::string::npos) << r.diag;
  EXPECT_NE(r.diag.find("colour"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  r = run_cli({"chernoff", "--config", (dir_ / "missing.ini").string()});
  EXPECT_EQ(r.code, kExitConfig);
  r = run_cli({"plot", "--config", write("g.ini", "[pair]\nfamily = gaussian\nr = 1\n")});
  EXPECT_EQ(r.code, kExitConfig);
  r = run_cli({"chernoff"});
  EXPECT_EQ(r.code, kExitConfig);
  r = run_cli({"chernoff", "--config", (dir_ / "g.ini").string(), "--format", "xml"});
  EXPECT_EQ(r.code, kExitConfig);
  r = run_cli({"errors", "--config", write("n.ini", "[errors]\nc = 0.5\nn = 0, 1\n")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.diag.find("line 3"), std::string::npos) << r.diag;
}

TEST_F(Cli, NumericalFailureExitsTwo) {
  const std::string id = write("id.ini", "[pair]\nfamily = binary\neps = 0.5\n");
  auto r = run_cli({"advantage", "--config", id});
  EXPECT_EQ(r.code, kExitNumeric);
  EXPECT_NE(r.diag.find("numerical failure"), std::string::npos);
  r = run_cli({"errors", "--config", id});
  EXPECT_EQ(r.code, kExitNumeric);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST_F(Cli, ErrorsUnitAlphaColumnsIdentical) {
  const auto r = run_cli({"errors", "--config", write("e.ini", "[errors]\nc = 0.5\nalpha = 1\ns_star = 0.5\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 13u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], rows[i][2]) << "N=" << rows[i][0];
    const double n = std::stod(rows[i][0]);
    EXPECT_NEAR(std::stod(rows[i][1]), oracle::half_erfc(std::sqrt(0.5 * n)), 5e-12 * std::stod(rows[i][1]));
    EXPECT_EQ(rows[i][5], "0");
  }
}

TEST_F(Cli, ErrorsFromPairMatchesLibrary) {
  const auto r = run_cli({"errors", "--config", write("p.ini", "[pair]\nfamily = poissonian\nmu_plus = 2\n"
                                                                "mu_minus = 0.5\n[errors]\nn = 1..4\n"),
                          "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const Json j = Json::parse(r.out);
  const ChernoffSummary s = chernoff_information(OutcomePair::poissonian(2.0, 0.5));
  const ErrorCurve saddle = error_curve_from_json(j["curves"][1]);
  const ErrorCurve direct = saddle_point(s, {1, 2, 3, 4});
  ASSERT_EQ(saddle.e_avg.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(saddle.e_avg[i], direct.e_avg[i], 1e-11 * direct.e_avg[i]);
  EXPECT_EQ(j["curves"].size(), 2u);
}

TEST_F(Cli, ErrorsFallbackFlagged) {
  const auto r = run_cli({"errors", "--config", write("f.ini", "[errors]\nc = 0.01\nn = 1, 5, 20\n")});
  ASSERT_EQ(r.code, kExitOk);
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows[1][5], "1");
  EXPECT_EQ(rows[2][5], "1");
  EXPECT_EQ(rows[3][5], "0");
  EXPECT_NE(r.diag.find("2 row(s)"), std::string::npos) << r.diag;
}

TEST_F(Cli, AdvantageWeakGaussianIsHalfPi) {
  const auto r = run_cli({"advantage", "--config", write("a.ini", "[pair]\nfamily = gaussian\nr = 0.01\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const AdvantageReport rep = advantage_report_from_json(Json::parse(r.out));
  EXPECT_NEAR(rep.advantage, std::numbers::pi / 2, 0.01 * std::numbers::pi / 2);
}

TEST_F(Cli, AdvantagePerfectBinaryWarns) {
  const auto r = run_cli({"advantage", "--config", write("a.ini", "[pair]\nfamily = binary\neps = 0\n")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.diag.find("warning: hard decoding is error-free"), std::string::npos);
  EXPECT_TRUE(Json::parse(r.out)["advantage"].is_null());
}

TEST_F(Cli, GridCellEqualsDirectPair) {
  const auto r = run_cli({"advantage", "--config",
                          write("g.ini", "[advantage]\neps_g_min = 0.01\neps_g_max = 0.2\neps_g_count = 3\n"
                                         "eta_min = 0.001\neta_max = 0.1\neta_count = 3\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r_snr = std::stod(rows[i][2]), eta = std::stod(rows[i][1]);
    const AdvantageReport direct = advantage(OutcomePair::gaussian_with_conversion(r_snr, eta));
    EXPECT_NEAR(std::stod(rows[i][5]), direct.advantage, 1e-6 * direct.advantage) << i;
  }
}

TEST_F(Cli, GridCornerDominatedByConversion) {
  const auto r = run_cli({"advantage", "--config",
                          write("g.ini", "[advantage]\neps_g_min = 1e-4\neps_g_max = 1e-4\neps_g_count = 1\n"
                                         "eta_min = 0.1\neta_max = 0.1\neta_count = 1\n")});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(std::stod(csv_rows(r.out)[1][5]), 1.0, 0.01);
}

TEST_F(Cli, SimulateBitIdenticalAcrossRunsAndThreads) {
  const std::string cfg = write("s.ini", "[pair]\nfamily = gaussian\nr = 1\n[simulate]\nm = 100000\nseed = 17\n");
  const auto a = run_cli({"simulate", "--config", cfg});
  const auto b = run_cli({"simulate", "--config", cfg});
  const auto c = run_cli({"simulate", "--config", cfg, "--threads", "3"});
  ASSERT_EQ(a.code, kExitOk) << a.diag;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const auto d = run_cli({"simulate", "--config", cfg, "--seed", "18"});
  EXPECT_NE(a.out, d.out);
  EXPECT_NE(a.diag.find("manifest: "), std::string::npos);
}

TEST_F(Cli, SimulateBinaryMatchesBinomial) {
  const auto r = run_cli({"simulate", "--config",
                          write("b.ini", "[pair]\nfamily = binary\neps = 0.2\n[simulate]\nm = 50000\nseed = 4\n"
                                         "n = 1..11:2\n")});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 1u + 3 * 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int n = std::stoi(rows[i][1]);
    const double e = std::stod(rows[i][2]), de = std::stod(rows[i][3]);
    EXPECT_LE(std::abs(e - oracle::majority_vote_error(n, 0.2)), 3 * de + 1e-12) << rows[i][0] << " N=" << n;
  }
}

TEST_F(Cli, SimulateWritesFileAndManifest) {
  const std::string out = (dir_ / "sim.json").string();
  const auto r = run_cli({"simulate", "--config",
                          write("s.ini", "[pair]\nfamily = gaussian\nr = 1\n[simulate]\nm = 1000\nn = 1..3\n"
                                         "p_relax = 0.6\n"),
                          "--out", out, "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.diag.find("outside the single-shot regime"), std::string::npos);
  const Json j = Json::parse(slurp(out));
  EXPECT_EQ(j["manifest"]["m"], 1000);
  EXPECT_EQ(mc_estimate_from_json(j["estimate"]).points.size(), 3u);

  const std::string csv = (dir_ / "sim.csv").string();
  ASSERT_EQ(run_cli({"simulate", "--config", (dir_ / "s.ini").string(), "--out", csv}).code, kExitOk);
  const Json manifest = Json::parse(slurp(csv + ".manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "simulate");
  EXPECT_EQ(manifest["spec_hashes"].size(), 1u);
}

TEST_F(Cli, CollapseGaussianVsPoissonian) {
  const double mu_minus = 1.0;
  double lo = mu_minus, hi = mu_minus + 20;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chernoff_information(OutcomePair::poissonian(mid, mu_minus)).C > 0.25 ? hi : lo) = mid;
  }
  std::ostringstream cfg;
  cfg.precision(12);
  cfg << "[pair.gaussian]\nfamily = gaussian\nr = 0.5\n[pair.poissonian]\nfamily = poissonian\nmu_plus = " << lo
      << "\nmu_minus = 1\n[collapse]\nm = 20000\nseed = 12\ncn_min = 0.5\ncn_max = 3\n";
  const auto r = run_cli({"collapse", "--config", write("c.ini", cfg.str())});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  EXPECT_NE(r.diag.find("curves collapse"), std::string::npos) << r.diag;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows.size(), 1u + 2 * 12);
}

TEST_F(Cli, CollapseRatioLabels) {
  const auto r = run_cli({"collapse", "--config",
                          write("c.ini", "[pair.g]\nfamily = gaussian\nr = 1\n[collapse]\nm = 500\nn = 1..4\n"
                                         "c_over_p = inf, 20\n"),
                          "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  const CollapseResult res = collapse_result_from_json(Json::parse(r.out)["collapse"]);
  ASSERT_EQ(res.rows.size(), 8u);
  EXPECT_EQ(res.rows.front().label, "g@inf");
  EXPECT_EQ(res.rows.back().label, "g@20");
  EXPECT_DOUBLE_EQ(res.rows.back().c_over_p, 20.0);
}

TEST_F(Cli, DegenerateCollapsePairRejected) {
  const auto r = run_cli(
      {"collapse", "--config", write("c.ini", "[pair.a]\nfamily = binary\neps = 0.5\n[collapse]\nm = 10\n")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.diag.find("degenerate"), std::string::npos);
}

void expect_golden(const std::string& cmd, const std::string& name, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {cmd, "--config", (kGolden / (name + ".ini")).string()};
  args.insert(args.end(), extra.begin(), extra.end());
  const auto r = run_cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.diag;
  EXPECT_EQ(r.out, slurp(kGolden / (name + ".csv"))) << name;
}

TEST(Golden, ErrorsCsv) { expect_golden("errors", "errors"); }
TEST(Golden, GridCsv) { expect_golden("advantage", "grid"); }
TEST(Golden, SimulateCsv) { expect_golden("simulate", "simulate"); }
TEST(Golden, ChernoffCsv) { expect_golden("chernoff", "chernoff", {"--format", "csv"}); }

}  // namespace
}  // namespace qreadout
