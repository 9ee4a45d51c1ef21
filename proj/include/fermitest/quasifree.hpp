#pragma once

#include "fermitest/linalg.hpp"
#include "fermitest/symbol.hpp"
#include "fermitest/toeplitz.hpp"

namespace fermitest {

/// Restrictions Q_n, R_n of two quasi-free states to the same finite box,
/// with their eigendecompositions cached at construction. Spectra are
/// clamped into [η, 1 - η]; a violation beyond kClampTolerance throws.
class FiniteStatePair {
 public:
  FiniteStatePair(const CMatrix& q, const CMatrix& r, double eta,
                  int nu = 1);
  FiniteStatePair(const ToeplitzTruncation& q, const ToeplitzTruncation& r,
                  double eta);

  static FiniteStatePair from_symbols(const SymbolFunction& q,
                                      const SymbolFunction& r, int n,
                                      std::size_t row_cap = kDefaultRowCap);

  std::size_t size() const { return static_cast<std::size_t>(q_.rows()); }
  int nu() const { return nu_; }
  double eta() const { return eta_; }
  /// n^ν, the number of lattice sites in the box.
  double volume() const { return static_cast<double>(size()); }

  const CMatrix& q() const { return q_; }
  const CMatrix& r() const { return r_; }
  const linalg::HermitianEigen& q_eigen() const { return q_eig_; }
  const linalg::HermitianEigen& r_eigen() const { return r_eig_; }
  /// U^* V where Q = U Λ U^*, R = V M V^*.
  const CMatrix& overlap() const { return overlap_; }

 private:
  CMatrix q_, r_;
  double eta_;
  int nu_;
  linalg::HermitianEigen q_eig_, r_eig_;
  CMatrix overlap_;
};

/// ψ_n(t) = log Tr ρ̂^t σ̂^{1-t}
///        = t Tr log(I-Q) + (1-t) Tr log(I-R) + Tr log(I + W_t),
/// W_t = (Q/(I-Q))^{t/2} (R/(I-R))^{1-t} (Q/(I-Q))^{t/2}.
double psi_n(const FiniteStatePair& pair, double t);

/// Tr[Q(log Q - log R) + (I-Q)(log(I-Q) - log(I-R))].
double relative_entropy_n(const FiniteStatePair& pair);

/// Central difference (ψ_n(t+h) - ψ_n(t-h)) / 2h, h in [1e-6, 1e-3].
double psi_n_derivative(const FiniteStatePair& pair, double t, double h = 1e-4);

}  // namespace fermitest
