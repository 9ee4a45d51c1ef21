#include "fermitest/quasifree.hpp"

#include <cmath>

#include "fermitest/error.hpp"

namespace fermitest {

namespace {

constexpr double kPositivityTolerance = 1e-10;

linalg::HermitianEigen clamped_eigen(const CMatrix& m, double eta,
                                     const char* what) {
  linalg::HermitianEigen e = linalg::hermitian_eigen(m);
  e.values = linalg::clamp_spectrum(e.values, eta, 1.0 - eta, what);
  return e;
}

}  // namespace

FiniteStatePair::FiniteStatePair(const CMatrix& q, const CMatrix& r, double eta,
                                 int nu)
    : q_(linalg::hermitize(q)), r_(linalg::hermitize(r)), eta_(eta), nu_(nu) {
  if (!(eta > 0.0 && eta <= 0.5))
    throw DomainError("state pair needs a margin eta in (0, 1/2]");
  if (q.rows() != r.rows() || q.rows() == 0)
    throw DomainError("Q and R must be non-empty and of equal size");
  q_eig_ = clamped_eigen(q_, eta, "spectrum of Q");
  r_eig_ = clamped_eigen(r_, eta, "spectrum of R");
  overlap_ = q_eig_.vectors.adjoint() * r_eig_.vectors;
}

FiniteStatePair::FiniteStatePair(const ToeplitzTruncation& q,
                                 const ToeplitzTruncation& r, double eta)
    : FiniteStatePair(q.matrix, r.matrix, eta, q.nu) {
  if (q.n != r.n || q.nu != r.nu)
    throw DomainError("truncations differ in side length or dimension");
}

FiniteStatePair FiniteStatePair::from_symbols(const SymbolFunction& q,
                                              const SymbolFunction& r, int n,
                                              std::size_t row_cap) {
  if (q.dimension() != r.dimension())
    throw DomainError("symbols have different dimensions");
  return FiniteStatePair(truncation(q, n, row_cap), truncation(r, n, row_cap),
                         std::min(q.eta(), r.eta()));
}

double psi_n(const FiniteStatePair& pair, double t) {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  const RVector& lq = pair.q_eigen().values;
  const RVector& lr = pair.r_eigen().values;

  double base = 0.0;
  for (Eigen::Index i = 0; i < lq.size(); ++i)
    base += t * std::log1p(-lq[i]) + (1.0 - t) * std::log1p(-lr[i]);

  // W_t is unitarily equivalent to D M D with D = diag((λ/(1-λ))^{t/2}) and
  // M = X diag((μ/(1-μ))^{1-t}) X^*, X = U^* V; only its spectrum is needed.
  RVector d(lq.size()), b(lr.size());
  for (Eigen::Index i = 0; i < lq.size(); ++i) {
    d[i] = std::exp(0.5 * t * (std::log(lq[i]) - std::log1p(-lq[i])));
    b[i] = std::exp((1.0 - t) * (std::log(lr[i]) - std::log1p(-lr[i])));
  }
  const CMatrix& x = pair.overlap();
  CMatrix w = d.asDiagonal() * (x * b.asDiagonal() * x.adjoint()) * d.asDiagonal();
  const RVector mu = linalg::hermitian_eigenvalues(linalg::hermitize(w));

  double tail = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] < -kPositivityTolerance)
      throw NumericalError("I + W_t has a non-positive eigenvalue; W_t should "
                           "be positive semidefinite");
    tail += std::log1p(std::max(mu[i], 0.0));
  }
  return base + tail;
}

double relative_entropy_n(const FiniteStatePair& pair) {
  const RVector& lq = pair.q_eigen().values;
  const RVector& lr = pair.r_eigen().values;
  const CMatrix& x = pair.overlap();

  double s = 0.0;
  for (Eigen::Index i = 0; i < lq.size(); ++i)
    s += lq[i] * std::log(lq[i]) + (1.0 - lq[i]) * std::log1p(-lq[i]);
  // Tr Q log R = Σ_ij λ_i |X_ij|^2 log μ_j, likewise for the complements.
  for (Eigen::Index j = 0; j < lr.size(); ++j) {
    const double log_r = std::log(lr[j]);
    const double log_1mr = std::log1p(-lr[j]);
    for (Eigen::Index i = 0; i < lq.size(); ++i) {
      const double w = std::norm(x(i, j));
      s -= w * (lq[i] * log_r + (1.0 - lq[i]) * log_1mr);
    }
  }
  return s;
}

double psi_n_derivative(const FiniteStatePair& pair, double t, double h) {
  if (!(h >= 1e-6 && h <= 1e-3))
    throw DomainError("finite-difference step must lie in [1e-6, 1e-3]");
  return (psi_n(pair, t + h) - psi_n(pair, t - h)) / (2.0 * h);
}

}  // namespace fermitest
