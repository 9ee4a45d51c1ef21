#include "fermitest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <lapacke.h>

#include "fermitest/error.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace fermitest::linalg {

namespace {

RVector run_zheevd(CMatrix& a, char jobz) {
  const auto n = static_cast<lapack_int>(a.rows());
  RVector w(a.rows());
  if (n == 0) return w;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, jobz, 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0) {
    const double norm = a.cwiseAbs().maxCoeff();
    throw NumericalError("Hermitian eigensolver failed (zheevd info=" +
                         std::to_string(info) + ", n=" + std::to_string(n) +
                         ", max |entry|=" + std::to_string(norm) + ")");
  }
  return w;
}

void require_square(const CMatrix& h) {
  if (h.rows() != h.cols()) throw DomainError("matrix is not square");
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& h) {
  require_square(h);
  CMatrix a = h;
  RVector w = run_zheevd(a, 'V');
  return {std::move(w), std::move(a)};
}

RVector hermitian_eigenvalues(const CMatrix& h) {
  require_square(h);
  CMatrix a = h;
  return run_zheevd(a, 'N');
}

CMatrix hermitize(const CMatrix& h) {
  require_square(h);
  return (h + h.adjoint()) * 0.5;
}

double hermiticity_defect(const CMatrix& h) {
  require_square(h);
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

RVector clamp_spectrum(const RVector& values, double lo, double hi,
                       const std::string& what, double tolerance) {
  RVector out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double v = out[i];
    if (v < lo - tolerance || v > hi + tolerance || std::isnan(v)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "%s: eigenvalue %.17g outside [%.17g, %.17g] beyond "
                    "clamping tolerance %.1e",
                    what.c_str(), v, lo, hi, tolerance);
      throw NumericalError(buf);
    }
    out[i] = std::clamp(v, lo, hi);
  }
  return out;
}

CMatrix apply_spectral(const HermitianEigen& eig,
                       const std::function<double(double)>& f) {
  RVector fv(eig.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = f(eig.values[i]);
  CMatrix out = eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
  return hermitize(out);
}

ScalarFunction ScalarFunction::identity() {
  return {"identity", [](double x) { return x; }};
}

ScalarFunction ScalarFunction::square() {
  return {"square", [](double x) { return x * x; }};
}

ScalarFunction ScalarFunction::log() {
  return {"log", [](double x) { return std::log(x); },
          std::numeric_limits<double>::min()};
}

ScalarFunction ScalarFunction::log1m() {
  return {"log1m", [](double x) { return std::log1p(-x); },
          -std::numeric_limits<double>::infinity(),
          1.0 - std::numeric_limits<double>::epsilon()};
}

ScalarFunction ScalarFunction::exp() {
  return {"exp", [](double x) { return std::exp(x); }};
}

ScalarFunction ScalarFunction::by_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "square") return square();
  if (name == "log") return log();
  if (name == "log1m") return log1m();
  if (name == "exp") return exp();
  throw DomainError("unknown scalar function '" + name + "'");
}

CMatrix matrix_function(const CMatrix& h, const ScalarFunction& f) {
  HermitianEigen eig = hermitian_eigen(hermitize(h));
  eig.values = clamp_spectrum(eig.values, f.lo, f.hi,
                              "matrix_function(" + f.name + ")");
  return apply_spectral(eig, f.f);
}

double log_det_from_spectrum(const RVector& values) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) s += std::log(values[i]);
  return s;
}

void set_blas_threads(int threads) {
  if (threads < 1) throw DomainError("BLAS thread count must be positive");
  openblas_set_num_threads(threads);
}

}  // namespace fermitest::linalg
