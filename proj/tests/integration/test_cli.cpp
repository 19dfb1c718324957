#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fockmarket/errors.hpp"
#include "fockmarket_cli/config.hpp"
#include "fockmarket_cli/run.hpp"

using namespace fockmarket;
using namespace fockmarket::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = FOCKMARKET_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fockmarket_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config.ini";
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text, ".");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalFplFillsDefaults) {
  const auto file = parse_config_text("[run]\nscenario = fpl\n", ".");
  EXPECT_EQ(file.base.scenario, Scenario::kFpl);
  const auto& s = std::get<FplSettings>(file.base.settings);
  EXPECT_EQ(s.params.M, 1);
  EXPECT_EQ(s.params.O, 2);
  EXPECT_EQ(s.params.Omega_A, 2.0);
  EXPECT_EQ(s.method, Quadrature::kAdaptive);
  EXPECT_EQ(file.base.grid.samples, 201u);
  EXPECT_TRUE(file.sweep.empty());
}

TEST(Config, MisspelledScenarioNamesTheValidSet) {
  const std::string msg = config_error("[run]\nscenario = fpll\n");
  EXPECT_NE(msg.find("unknown scenario 'fpll'"), std::string::npos);
  for (const auto& name : scenario_names()) EXPECT_NE(msg.find(name), std::string::npos);
}

TEST(Config, NegativeTmaxIsRejected) {
  EXPECT_NE(config_error("[run]\nscenario = fpl\nt_max = -1\n").find("t_max must be > 0"),
            std::string::npos);
}

TEST(Config, ReportsEveryError) {
  const std::string msg = config_error(
      "[run]\nscenario = two-trader-exact\nsamples = many\n"
      "[params]\nlambda = x\ncolour = blue\n"
      "[state]\nn1 = 1\nn2 = 1\nk1 = 1\n"
      "[extra]\na = 1\n");
  EXPECT_NE(msg.find("samples: expected an integer"), std::string::npos);
  EXPECT_NE(msg.find("lambda: expected a number"), std::string::npos);
  EXPECT_NE(msg.find("unknown key 'colour' in [params]"), std::string::npos);
  EXPECT_NE(msg.find("missing required key 'k2' in [state]"), std::string::npos);
  EXPECT_NE(msg.find("missing required key 'price' in [state]"), std::string::npos);
  EXPECT_NE(msg.find("unknown section [extra]"), std::string::npos);
}

TEST(Config, ModuleValidationBecomesConfigError) {
  const std::string msg = config_error("[run]\nscenario = fpl\n[params]\nM = -1\nn = -2\n");
  EXPECT_NE(msg.find("[params]"), std::string::npos);
}

TEST(Config, SyntaxErrorCarriesLine) {
  const std::string msg = config_error("[run]\nscenario = fpl\nscenario = fpl\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(Config, HashCommentsAreIgnored) {
  EXPECT_NO_THROW(parse_config_text("# note\n[run]\n  # indented\nscenario = fpl\n", "."));
}

TEST(Config, SweepExpandsCartesianProduct) {
  const auto file = parse_config_text(
      "[run]\nscenario = fpl\n[sweep]\nparams.n = 5, 10\nparams.w1 = 1, 2, 3\n", ".");
  ASSERT_EQ(file.sweep.size(), 6u);
  EXPECT_EQ(file.sweep[0].name, "run_000");
  EXPECT_EQ(file.sweep[5].name, "run_005");
  const auto& last = std::get<FplSettings>(file.sweep[5].config.settings).params;
  EXPECT_EQ(last.n, 10);
  EXPECT_EQ(last.w1, 3.0);
  const auto& second = std::get<FplSettings>(file.sweep[1].config.settings).params;
  EXPECT_EQ(second.n, 5);
  EXPECT_EQ(second.w1, 2.0);
}

TEST(Config, SweepValuesAreValidatedPerRun) {
  const std::string msg =
      config_error("[run]\nscenario = fpl\n[sweep]\nparams.n = 5, -1\nrun.scenario = fpl\n");
  EXPECT_NE(msg.find("run.scenario"), std::string::npos);
  const std::string per_run = config_error("[run]\nscenario = fpl\n[sweep]\nparams.n = 5, -1\n");
  EXPECT_NE(per_run.find("run_001"), std::string::npos);
  EXPECT_EQ(per_run.find("run_000"), std::string::npos);
}

TEST(Outputs, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Outputs, ManifestIsSortedKeyHash) {
  const OutputFiles files{{"b.csv", "2"}, {"a.csv", "1"}};
  const std::string m = manifest(files);
  EXPECT_EQ(m.substr(0, 6), "a.csv=");
  EXPECT_NE(m.find("\nb.csv=" + sha256_hex("2") + "\n"), std::string::npos);
}

TEST(Outputs, SvgFromCsv) {
  const auto svg = csv_to_svg("t,x,y\n0,1,2\n1,3,-1\n2,2,0\n", "demo");
  ASSERT_TRUE(svg.has_value());
  EXPECT_EQ(svg->rfind("<svg", 0), 0u);
  EXPECT_EQ(std::count(svg->begin(), svg->end(), '\n') > 5, true);
  EXPECT_NE(svg->find("polyline"), std::string::npos);
  EXPECT_FALSE(csv_to_svg("a,b\n", "x").has_value());
  EXPECT_FALSE(csv_to_svg("t,x\n0,abc\n1,2\n", "x").has_value());
}

TEST(Run, FplMatchesCommittedFixture) {
  const auto file = parse_config(kSource / "configs" / "fpl_fig1.ini");
  const auto files = run_scenario(file.base);
  EXPECT_EQ(files.at("fpl.csv"), slurp(kSource / "tests" / "fixtures" / "fig1_w1_1_w2_1.csv"));
}

TEST(Run, TwoTraderConservedReport) {
  const auto file = parse_config(kSource / "configs" / "two_trader_exact.ini");
  const std::string report = run_scenario(file.base).at("report.txt");
  EXPECT_NE(report.find("conserved_ok=true\n"), std::string::npos);
  for (const char* key : {"drift_N=", "drift_K=", "drift_Gamma="}) {
    const auto pos = report.find(key);
    ASSERT_NE(pos, std::string::npos) << key;
    const double v = std::stod(report.substr(pos + std::string(key).size()));
    EXPECT_LT(v, 1e-8) << key;
  }
}

TEST(Run, StochasticVerdictWithoutSupplyResonance) {
  const auto file = parse_config(kSource / "configs" / "stochastic_verdict.ini");
  EXPECT_NE(run_scenario(file.base).at("verdict.txt").find("portfolio_stationary=true\n"),
            std::string::npos);
}

TEST(Run, SameConfigGivesIdenticalOutputs) {
  const auto dir = scratch("determinism");
  std::ostringstream out, err;
  const auto config = kSource / "configs" / "meanfield.ini";
  ASSERT_EQ(run_command(config, {dir / "a", true, 1}, out, err), kOk) << err.str();
  ASSERT_EQ(run_command(config, {dir / "b", true, 1}, out, err), kOk) << err.str();
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / name)) << name;
  }
  EXPECT_TRUE(fs::exists(dir / "a" / "n.svg"));
}

TEST(Run, SweepIsIndependentOfWorkerCount) {
  const auto dir = scratch("sweep");
  std::ostringstream out, err;
  const auto config = kSource / "configs" / "fpl_sweep.ini";
  ASSERT_EQ(run_command(config, {dir / "serial", false, 1}, out, err), kOk) << err.str();
  ASSERT_EQ(run_command(config, {dir / "parallel", false, 4}, out, err), kOk) << err.str();
  EXPECT_EQ(slurp(dir / "serial" / "manifest.txt"), slurp(dir / "parallel" / "manifest.txt"));
  EXPECT_TRUE(fs::exists(dir / "parallel" / "run_007" / "fpl.csv"));
  EXPECT_NE(slurp(dir / "serial" / "sweep.txt").find("run_003: params.n=5 params.w1=10 params.w2=10"),
            std::string::npos);
}

TEST(ExitCodes, ConfigRuntimeAndSuccess) {
  const auto dir = scratch("exit");
  std::ostringstream out, err;
  const auto bad = write_config(dir, "[run]\nscenario = nothing\n");
  EXPECT_EQ(run_command(bad, {dir / "o"}, out, err), kConfigError);
  EXPECT_EQ(run_command(dir / "missing.ini", {dir / "o"}, out, err), kConfigError);
  // phi = nu and no background leaves the oscillation frequency at zero
  const auto degenerate = write_config(
      dir, "[run]\nscenario = meanfield\n[params]\nphi = 0.5\nnu = 0.5\nx0_re = 0\nn0 = 1\nk0 = 1\n");
  err.str("");
  EXPECT_EQ(run_command(degenerate, {dir / "o"}, out, err), kRuntimeError);
  EXPECT_FALSE(err.str().empty());
  const auto good = write_config(dir, "[run]\nscenario = fpl\nsamples = 11\nt_max = 1\n");
  EXPECT_EQ(run_command(good, {dir / "o"}, out, err), kOk);
  EXPECT_TRUE(fs::exists(dir / "o" / "manifest.txt"));
}

TEST(ExitCodes, VerifyDetectsDrift) {
  const auto dir = scratch("verify");
  std::ofstream(dir / "fixture.csv") << "t,Pc,n,k,delta_pi\n0,1,10,10,0\n";
  const auto config = write_config(
      dir, "[run]\nscenario = fpl\nsamples = 2\nt_max = 1\n[verify]\nfpl.csv = fixture.csv\n");
  std::ostringstream out, err;
  EXPECT_EQ(verify_command(config, out, err), kRuntimeError);
  EXPECT_NE(out.str().find("DIFF fpl.csv: first difference at line 3"), std::string::npos);
  const auto none = write_config(dir, "[run]\nscenario = fpl\n");
  EXPECT_EQ(verify_command(none, out, err), kConfigError);
}
