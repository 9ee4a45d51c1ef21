#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermitest/asymptotics.hpp"
#include "fermitest/fock.hpp"
#include "fermitest/symbol.hpp"
#include "fermitest/toeplitz.hpp"

namespace fermitest {

struct OracleConfig {
  int mode_cap = 8;
  /// Box sizes n for the determinant-formula checks (n^ν modes each).
  std::vector<int> n_list{1, 2, 4, 6, 8};
  double a = 0.0;
  /// Box sizes for the Neyman–Pearson exponent study.
  std::vector<int> study_n{2, 4, 6, 8};
  int trials = 100;
  std::vector<double> t_probe{-0.5, 0.25, 0.5, 0.75, 1.5};
  /// Multiplies the ρ̂ density after construction; 1 leaves it untouched.
  double density_trace_scale = 1.0;
};

struct ConvergeConfig {
  std::vector<int> n_list;
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<SzegoCase> szego;
};

struct RunConfig {
  int nu = 1;
  double eta = 0.25;
  SymbolFunction q = SymbolFunction::constant(1, 0.5, 0.25);
  SymbolFunction r = SymbolFunction::constant(1, 0.5, 0.25);
  QuadratureConfig quadrature;
  std::vector<double> t_grid;
  std::vector<double> r_grid{0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
  std::vector<double> a_grid{-0.2, -0.1, 0.0, 0.1, 0.2};
  std::vector<int> finite_n;
  std::size_t row_cap = kDefaultRowCap;
  ConvergeConfig converge;
  OracleConfig oracle;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

/// Parses and validates a run configuration. Relative paths (grid value
/// files, output directory) resolve against `base_dir`. Every problem is
/// reported as ConfigError.
RunConfig parse_config(const nlohmann::json& doc,
                       const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Symbol from its JSON description (kinds expr, fourier, grid, gibbs).
SymbolFunction parse_symbol(const nlohmann::json& j, int nu, double eta,
                            const std::filesystem::path& base_dir);

}  // namespace fermitest
