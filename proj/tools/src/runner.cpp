#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "fockmarket/errors.hpp"
#include "fockmarket_cli/run.hpp"

namespace fockmarket::cli {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// 1-based line of the first difference.
std::size_t first_difference_line(const std::string& a, const std::string& b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return line;
    if (a[i] == '\n') ++line;
  }
  return line;
}

int run_sweep(const ConfigFile& file, const std::filesystem::path& dir, const RunOptions& options,
              std::ostream& out, std::ostream& err) {
  const auto& runs = file.sweep;
  std::vector<std::string> failures(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        const auto& run = runs[i];
        write_outputs(dir / run.name, run_scenario(run.config),
                      options.plots || run.config.plots);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned jobs = std::clamp<unsigned>(options.jobs, 1u, static_cast<unsigned>(runs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  OutputFiles index;
  std::string listing;
  int code = kOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string line = runs[i].name + ":";
    for (const auto& [key, value] : runs[i].assignments) line += fmt::format(" {}={}", key, value);
    listing += line + "\n";
    if (!failures[i].empty()) {
      err << fmt::format("error: {}: {}\n", runs[i].name, failures[i]);
      code = kRuntimeError;
      continue;
    }
    if (auto m = read_file(dir / runs[i].name / "manifest.txt")) {
      index[runs[i].name + "/manifest.txt"] = *m;
    }
  }
  index["sweep.txt"] = listing;
  std::ofstream(dir / "sweep.txt", std::ios::binary) << listing;
  std::ofstream(dir / "manifest.txt", std::ios::binary) << manifest(index);
  out << fmt::format("{} runs written to {}\n", runs.size(), dir.string());
  return code;
}

}  // namespace

int run_command(const std::filesystem::path& config, const RunOptions& options,
                std::ostream& out, std::ostream& err) {
  ConfigFile file;
  try {
    file = parse_config(config);
  } catch (const ConfigError& e) {
    err << "config error in " << config.string() << ":\n" << e.what() << "\n";
    return kConfigError;
  }
  const std::filesystem::path dir =
      options.out.value_or(file.base.out.value_or(std::filesystem::path("out")));
  try {
    if (!file.sweep.empty()) return run_sweep(file, dir, options, out, err);
    write_outputs(dir, run_scenario(file.base), options.plots || file.base.plots);
    out << fmt::format("{} written to {}\n", to_string(file.base.scenario), dir.string());
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

int verify_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  ConfigFile file;
  try {
    file = parse_config(config);
  } catch (const ConfigError& e) {
    err << "config error in " << config.string() << ":\n" << e.what() << "\n";
    return kConfigError;
  }
  if (file.fixtures.empty()) {
    err << "config error in " << config.string() << ":\nno [verify] entries\n";
    return kConfigError;
  }
  OutputFiles files;
  try {
    files = run_scenario(file.base);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  int code = kOk;
  for (const auto& [name, fixture] : file.fixtures) {
    const auto produced = files.find(name);
    if (produced == files.end()) {
      err << fmt::format("MISSING {}: the scenario does not write this file\n", name);
      code = kRuntimeError;
      continue;
    }
    const auto expected = read_file(fixture);
    if (!expected) {
      err << fmt::format("MISSING {}: cannot read fixture {}\n", name, fixture.string());
      code = kRuntimeError;
      continue;
    }
    if (*expected == produced->second) {
      out << fmt::format("MATCH {}\n", name);
    } else {
      out << fmt::format("DIFF {}: first difference at line {}\n", name,
                         first_difference_line(*expected, produced->second));
      code = kRuntimeError;
    }
  }
  return code;
}

}  // namespace fockmarket::cli
