#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermitest/config.hpp"

namespace fermitest::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalAnomaly = 3,
  kOracleFailure = 4,
};

struct Options {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct OutputFile {
  std::string name;
  std::string content;
};

/// report.json, curves.csv, psi_curve.json.
std::vector<OutputFile> cmd_exponents(const RunConfig& cfg);

/// psi_convergence.csv, szego_convergence.csv.
std::vector<OutputFile> cmd_converge(const RunConfig& cfg);

struct OracleOutcome {
  nlohmann::json report;
  std::vector<OutputFile> files;
  std::vector<std::string> failed_checks;
  bool pass() const { return failed_checks.empty(); }
};

/// oracle_report.json and exponent_study.csv.
OracleOutcome cmd_oracle(const RunConfig& cfg);

/// Loads the config, runs the command, writes its files and maps failures to
/// exit codes. Diagnostics go to `err`.
int run(const Options& options, std::ostream& err);

}  // namespace fermitest::cli
