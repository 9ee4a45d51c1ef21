#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fermitest/expression.hpp"
#include "fermitest/linalg.hpp"

namespace fermitest {

using MultiIndex = std::vector<int>;

enum class SymbolKind { expression, fourier, grid };

/// Default per-axis DFT resolution: 4096 (ν=1), 512 (ν=2), 128 (ν=3), 32 above.
std::vector<int> default_resolution(int nu);

/// A real function on the torus [0, 2π)^ν with a declared margin η: the
/// symbol is meant to take values in [η, 1 - η].
///
/// Values are immutable and cheap to copy. Fourier coefficients of sampled
/// representations are computed once, on first request, and shared between
/// copies; concurrent first requests are safe.
class SymbolFunction {
 public:
  static SymbolFunction from_expression(Expression expr, double eta);
  static SymbolFunction from_text(std::string_view text, int nu, double eta);
  static SymbolFunction constant(int nu, double value, double eta);

  /// Trigonometric polynomial Σ a_k e^{i<k,x>}. The coefficient map must be
  /// conjugate symmetric (a_{-k} = conj(a_k) within 1e-12); missing partners
  /// are an error.
  static SymbolFunction from_fourier(int nu, std::map<MultiIndex, Complex> coeffs,
                                     double eta);

  /// Value table on the uniform grid with the given per-axis resolution,
  /// row-major multi-index order. Evaluated off-grid by trigonometric
  /// interpolation.
  static SymbolFunction from_grid(std::vector<int> resolution,
                                  std::vector<double> values, double eta);

  int dimension() const noexcept;
  double eta() const noexcept;
  SymbolKind kind() const noexcept;
  /// Human-readable identifier (expression text, coefficient count, ...).
  const std::string& description() const noexcept;

  /// â(x). Components of x must lie in [0, 2π).
  double evaluate(std::span<const double> x) const;

  /// â_k = (2π)^{-ν} ∫ e^{-i<k,x>} â(x) dx. Exact for Fourier symbols,
  /// otherwise taken from the DFT at `dft_resolution()`; throws AliasingError
  /// when some |k_d| exceeds N_d / 2.
  Complex fourier_coefficient(std::span<const int> k) const;

  /// Values on the uniform grid of the given resolution, row-major.
  std::vector<double> sample(std::span<const int> resolution) const;

  const std::vector<int>& dft_resolution() const noexcept;
  /// Copy with a different DFT resolution (each entry ≥ 2).
  SymbolFunction with_dft_resolution(std::vector<int> resolution) const;
  /// Copy with a different declared margin.
  SymbolFunction with_eta(double eta) const;

  /// Copy whose values are map(â(x)); coefficients then come from the DFT.
  SymbolFunction mapped(std::function<double(double)> map,
                        std::string description) const;

  struct State;

 private:
  explicit SymbolFunction(std::shared_ptr<const State> state)
      : state_(std::move(state)) {}
  std::shared_ptr<const State> state_;
};

/// Result of a Gibbs-symbol construction: the symbol and its derived margin.
struct GibbsSymbol {
  SymbolFunction symbol;
  double eta;
  double dispersion_min;
  double dispersion_max;
};

/// q̂(x) = e^{-β ĥ(x)} / (1 + e^{-β ĥ(x)}), with margin derived from the range
/// of ĥ on its DFT grid. Throws DomainError when the margin vanishes.
GibbsSymbol gibbs_symbol(const SymbolFunction& dispersion, double beta);

/// Stable logistic e^{-z} / (1 + e^{-z}).
double fermi_function(double z);

struct FaithfulnessReport {
  double min;
  double max;
  bool pass;
};

/// Samples s on a uniform grid (≥ 16 points per axis) and checks
/// η ≤ min and max ≤ 1 - η.
FaithfulnessReport verify_faithfulness(const SymbolFunction& s,
                                       int grid_resolution);

}  // namespace fermitest
