#pragma once

#include <cstddef>
#include <string>

#include "fermitest/linalg.hpp"
#include "fermitest/symbol.hpp"

namespace fermitest {

inline constexpr std::size_t kDefaultRowCap = 4096;

/// P_n A P_n for the shift-invariant operator with a given symbol: the
/// n^ν x n^ν matrix whose entry (k, j) is â_{k-j}, multi-indices of the cube
/// {0..n-1}^ν in lexicographic order.
struct ToeplitzTruncation {
  int n = 0;
  int nu = 0;
  CMatrix matrix;
  std::string symbol_id;
  /// max |T - T^*| before symmetrization.
  double hermitian_correction = 0.0;

  std::size_t rows() const { return static_cast<std::size_t>(matrix.rows()); }
};

ToeplitzTruncation truncation(const SymbolFunction& s, int n,
                              std::size_t row_cap = kDefaultRowCap);

struct SpectralReport {
  RVector eigenvalues;
  /// Eigenvalues clamped onto [lo, hi]; only meaningful when `pass`.
  RVector clamped;
  double min = 0.0;
  double max = 0.0;
  bool pass = false;
};

/// Checks that the spectrum lies in [lo - ε, hi + ε], ε = kClampTolerance.
SpectralReport spectral_range_check(const CMatrix& h, double lo, double hi);
SpectralReport spectral_range_check(const ToeplitzTruncation& t, double lo,
                                    double hi);

}  // namespace fermitest
