#pragma once

// Scenario configuration files.
//
// Grammar: INI-style sections of `key = value` lines; whole-line comments
// start with ';' or '#'. Lists are comma separated. Sections:
//
//   [run]     scenario, t_max, samples, out, plots
//   [params]  model parameters (per scenario)
//   [state]   initial occupations (per scenario)
//   [space]   truncation cutoffs (stochastic-verdict)
//   [checks]  optional diagnostics
//   [sweep]   `section.key = v1, v2, ...`; the cartesian product of all
//             lines becomes independent runs
//   [verify]  `output-file = fixture-path` pairs for the verify command;
//             paths are relative to the config file
//
// Unknown sections and keys are errors.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fockmarket/fock_space.hpp"
#include "fockmarket/fpl_dynamics.hpp"
#include "fockmarket/market_models.hpp"
#include "fockmarket/meanfield.hpp"
#include "fockmarket/stochastic_limit.hpp"

namespace fockmarket::cli {

enum class Scenario { kTwoTraderExact, kEffectiveL, kMeanField, kStochasticVerdict, kFpl };

std::string to_string(Scenario scenario);
const std::vector<std::string>& scenario_names();

struct TimeGrid {
  double t_max = 10.0;
  std::size_t samples = 201;
  std::vector<double> times() const;
};

struct TwoTraderSettings {
  ModelParams params;
  NumberState state;
  bool conserved_check = false;
};

struct EffectiveSettings {
  ModelParams params;
  std::vector<int> shares;
  std::vector<int> cash;
  int supply = 0;
  int price = 0;
  int frozen_price = 0;
  std::optional<double> gamma;
  bool conserved_check = false;
};

struct MeanFieldSettings {
  MeanFieldParams params;
  bool ode = false;
};

struct StochasticSettings {
  ModelParams params;
  ReservoirState reservoir;
  int n = 0;
  int k = 0;
  int price = 0;
  int share_cutoff = 0;
  int cash_cutoff = 0;
  int price_cutoff = 0;
  DeltaOptions delta;
};

struct FplSettings {
  FplParams params;
  Quadrature method = Quadrature::kAdaptive;
};

using Settings = std::variant<TwoTraderSettings, EffectiveSettings, MeanFieldSettings,
                              StochasticSettings, FplSettings>;

struct ScenarioConfig {
  Scenario scenario = Scenario::kFpl;
  TimeGrid grid;
  std::optional<std::filesystem::path> out;
  bool plots = false;
  Settings settings;
};

struct SweepRun {
  std::string name;  // run_000, run_001, ...
  std::vector<std::pair<std::string, std::string>> assignments;
  ScenarioConfig config;
};

struct ConfigFile {
  ScenarioConfig base;
  std::vector<SweepRun> sweep;
  std::vector<std::pair<std::string, std::filesystem::path>> fixtures;
};

// Throws ConfigError whose message lists every problem, one per line.
ConfigFile parse_config(const std::filesystem::path& path);
ConfigFile parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace fockmarket::cli
