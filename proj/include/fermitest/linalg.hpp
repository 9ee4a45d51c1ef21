#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace fermitest {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Eigenvalues beyond an interval by at most this much are clamped onto it;
/// anything further out is an error.
inline constexpr double kClampTolerance = 1e-10;

namespace linalg {

/// H = vectors * diag(values) * vectors^*, eigenvalues ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

/// Full eigendecomposition of a Hermitian matrix (LAPACK zheevd, lower
/// triangle referenced). Throws NumericalError when the solver fails.
HermitianEigen hermitian_eigen(const CMatrix& h);

/// Eigenvalues only, ascending.
RVector hermitian_eigenvalues(const CMatrix& h);

/// (H + H^*) / 2
CMatrix hermitize(const CMatrix& h);

/// max |H - H^*| entrywise.
double hermiticity_defect(const CMatrix& h);

/// Clamp values into [lo, hi]. Values outside by more than `tolerance` raise
/// NumericalError naming `what`.
RVector clamp_spectrum(const RVector& values, double lo, double hi,
                       const std::string& what,
                       double tolerance = kClampTolerance);

/// U f(Λ) U^* for a precomputed decomposition, symmetrized.
CMatrix apply_spectral(const HermitianEigen& eig,
                       const std::function<double(double)>& f);

/// A real scalar function together with the closed interval it is defined on.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> f;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double operator()(double x) const { return f(x); }

  static ScalarFunction identity();
  static ScalarFunction square();
  static ScalarFunction log();
  /// x -> log(1 - x)
  static ScalarFunction log1m();
  static ScalarFunction exp();
  /// Lookup by name; throws DomainError for unknown names.
  static ScalarFunction by_name(const std::string& name);
};

/// Spectral calculus: U f(Λ) U^* from H = U Λ U^*. Eigenvalues within
/// kClampTolerance of f's domain are clamped onto it; farther ones throw.
CMatrix matrix_function(const CMatrix& h, const ScalarFunction& f);

/// Σ log(λ_i) over a clamped spectrum; never forms the determinant.
double log_det_from_spectrum(const RVector& values);

/// Thread count of the BLAS/LAPACK backend. Pinned to 1 by the CLI so that
/// eigen-solver output does not depend on the machine.
void set_blas_threads(int threads);

}  // namespace linalg
}  // namespace fermitest
