#include "fermitest/toeplitz.hpp"

#include <algorithm>
#include <vector>

#include "fermitest/error.hpp"
#include "fermitest/kernels.hpp"

namespace fermitest {

ToeplitzTruncation truncation(const SymbolFunction& s, int n,
                              std::size_t row_cap) {
  if (n < 1) throw DomainError("truncation side length must be at least 1");
  const int nu = s.dimension();
  std::size_t rows = 1;
  for (int a = 0; a < nu; ++a) {
    rows *= static_cast<std::size_t>(n);
    if (rows > row_cap)
      throw CapExceeded("truncation n=" + std::to_string(n) + ", nu=" +
                        std::to_string(nu) + " exceeds the row cap " +
                        std::to_string(row_cap));
  }

  // Coefficients for every multi-offset in [-(n-1), n-1]^ν.
  const std::size_t table_size = kernels::offset_table_size(n, nu);
  std::vector<Complex> table(table_size);
  MultiIndex k(static_cast<std::size_t>(nu));
  for (std::size_t pos = 0; pos < table_size; ++pos) {
    std::size_t rest = pos;
    for (int a = nu - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rest % static_cast<std::size_t>(2 * n - 1)) - (n - 1);
      rest /= static_cast<std::size_t>(2 * n - 1);
    }
    table[pos] = s.fourier_coefficient(k);
  }

  ToeplitzTruncation t;
  t.n = n;
  t.nu = nu;
  t.symbol_id = s.description();
  CMatrix raw = kernels::toeplitz_fill_parallel(n, nu, table);
  t.hermitian_correction = linalg::hermiticity_defect(raw);
  t.matrix = linalg::hermitize(raw);
  return t;
}

SpectralReport spectral_range_check(const CMatrix& h, double lo, double hi) {
  SpectralReport r;
  r.eigenvalues = linalg::hermitian_eigenvalues(linalg::hermitize(h));
  if (r.eigenvalues.size() == 0) {
    r.pass = true;
    return r;
  }
  r.min = r.eigenvalues.minCoeff();
  r.max = r.eigenvalues.maxCoeff();
  r.pass = r.min >= lo - kClampTolerance && r.max <= hi + kClampTolerance;
  r.clamped = r.eigenvalues.unaryExpr([lo, hi](double v) { return std::clamp(v, lo, hi); });
  return r;
}

SpectralReport spectral_range_check(const ToeplitzTruncation& t, double lo,
                                    double hi) {
  return spectral_range_check(t.matrix, lo, hi);
}

}  // namespace fermitest
