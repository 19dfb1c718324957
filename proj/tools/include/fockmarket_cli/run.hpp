#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "fockmarket_cli/config.hpp"

namespace fockmarket::cli {

// File name -> content, sorted by name.
using OutputFiles = std::map<std::string, std::string>;

// Runs one scenario in memory. Module errors propagate as fockmarket::Error.
OutputFiles run_scenario(const ScenarioConfig& config);

// Lower-case hex SHA-256 of `content`.
std::string sha256_hex(const std::string& content);

// `name=sha256` per file, sorted by name.
std::string manifest(const OutputFiles& files);

// Line plot of every column of a CSV against its first column. Returns
// nullopt when the CSV has fewer than two columns or no numeric rows.
std::optional<std::string> csv_to_svg(const std::string& csv, const std::string& title);

// Adds plots (when asked) and manifest.txt, then writes everything to `dir`.
void write_outputs(const std::filesystem::path& dir, OutputFiles files, bool plots);

struct RunOptions {
  std::optional<std::filesystem::path> out;
  bool plots = false;
  unsigned jobs = 1;
};

// Exit codes: 0 success, 1 runtime or model error, 2 configuration error.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2 };

int run_command(const std::filesystem::path& config, const RunOptions& options,
                std::ostream& out, std::ostream& err);

// Re-runs the scenario and compares the outputs named in [verify] byte for
// byte. A mismatch is a runtime error.
int verify_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace fockmarket::cli
