#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fermitest/asymptotics.hpp"
#include "fermitest/linalg.hpp"
#include "fermitest/symbol.hpp"

namespace fermitest {

inline constexpr int kDefaultModeCap = 14;

/// Occupation-number basis of m modes. A basis vector is a bitmask S (bit i
/// set means mode i+1 is occupied); the dense index of S is its integer value.
/// Inside a wedge vector the modes are taken in increasing order.
class FockBasis {
 public:
  explicit FockBasis(int modes, int mode_cap = kDefaultModeCap);

  int modes() const { return modes_; }
  std::size_t dimension() const { return std::size_t{1} << modes_; }
  /// Masks with exactly k bits set, ascending.
  std::span<const std::uint32_t> sector(int k) const { return sectors_[k]; }

 private:
  int modes_;
  std::vector<std::vector<std::uint32_t>> sectors_;
};

/// Operator that preserves particle number, stored as one block per sector
/// k = 0..m in the FockBasis sector order.
struct BlockDiagonal {
  int modes = 0;
  std::vector<CMatrix> blocks;

  Complex trace() const;
  CMatrix dense() const;
  BlockDiagonal scaled(double factor) const;
};

/// Density matrix ρ̂ on 2^m-dimensional Fock space.
struct FockState {
  int modes = 0;
  BlockDiagonal density;

  /// Throws NumericalError unless trace = 1, min eigenvalue ≥ -1e-12 and
  /// Hermiticity hold within 1e-12.
  void validate() const;
};

/// Binary test (T, I - T), 0 ≤ T ≤ I, on the dense Fock space.
struct BinaryTest {
  CMatrix op;
};

/// F(A) = ⊕_k ∧^k A as a dense 2^m x 2^m matrix: entry (S', S) is
/// det A[S', S] when |S'| = |S| and 0 otherwise.
CMatrix second_quantization(const CMatrix& a, int mode_cap = kDefaultModeCap);
/// Same, one block per particle-number sector.
BlockDiagonal second_quantization_blocks(const CMatrix& a,
                                         int mode_cap = kDefaultModeCap);

/// ω̂_Q = det(I - Q) F(Q (I - Q)^{-1}), computed from the eigendecomposition of
/// Q with its spectrum clamped into [η, 1 - η].
FockState quasifree_density(const CMatrix& q, double eta,
                            int mode_cap = kDefaultModeCap);

/// Dense creation operator c*(e_i) on m modes (zero-based i). Acting on S not
/// containing i it produces (-1)^{|{s ∈ S : s < i}|} |S ∪ {i}>.
CMatrix creation_operator(int modes, int i);
/// c(e_i) = c*(e_i)^*.
CMatrix annihilation_operator(int modes, int i);
/// c*(x) = Σ_i x_i c*(e_i).
CMatrix creation_operator(const CVector& x);
/// c(y) = Σ_i conj(y_i) c(e_i).
CMatrix annihilation_operator(const CVector& y);

/// c*(x_1)...c*(x_n) c(y_m)...c(y_1).
struct Monomial {
  std::vector<CVector> creations;      // x_1..x_n
  std::vector<CVector> annihilations;  // y_1..y_m
};

struct WickResult {
  Complex value;
  Complex expected;
  double residual;
};

/// Evaluates the state on the monomial through the Fock density and compares
/// with δ_{mn} det{<y_i, Q x_j>}.
WickResult wick_check(const FockState& state, const CMatrix& q,
                      const Monomial& monomial);

/// Projection onto the strictly positive part of e^{-scale·a} ρ̂ - σ̂;
/// eigenvalues ≤ 1e-12 are excluded.
BinaryTest neyman_pearson_test(const FockState& rho, const FockState& sigma,
                               double a, double scale);

struct ErrorProbabilities {
  double alpha;  // Tr ρ̂ (I - T)
  double beta;   // Tr σ̂ T
};

ErrorProbabilities error_probabilities(const FockState& rho,
                                       const FockState& sigma,
                                       const BinaryTest& test);

/// Error probabilities of the Neyman–Pearson test computed sector by sector,
/// each summed over its own eigenvectors (no cancellation in α).
ErrorProbabilities neyman_pearson_errors(const FockState& rho,
                                         const FockState& sigma, double a,
                                         double scale);

/// ‖e^{-scale·a} ρ̂ - σ̂‖_1.
double trace_norm_difference(const FockState& rho, const FockState& sigma,
                             double a, double scale);

struct NpOptimalityReport {
  int trials = 0;
  int violations = 0;
  /// Largest amount by which a random test beat the NP test (≤ 0 is fine).
  double worst_gap = 0.0;
  double np_value = 0.0;
  double closed_form = 0.0;
  double closed_form_residual = 0.0;
  bool pass = false;
};

/// Compares e^{-sa} α + β of the NP test against random projections and random
/// 0 ≤ T ≤ I, and against ½[e^{-sa} + 1 - ‖e^{-sa} ρ̂ - σ̂‖_1].
NpOptimalityReport np_optimality_check(const FockState& rho,
                                       const FockState& sigma, double a,
                                       double scale, int trials,
                                       std::mt19937_64& rng);

/// log Tr ρ̂^t σ̂^{1-t} by diagonalizing both densities.
double log_trace_power_product(const FockState& rho, const FockState& sigma,
                               double t);

/// Tr ρ̂ (log ρ̂ - log σ̂).
double relative_entropy(const FockState& rho, const FockState& sigma);

struct ExponentStudyRow {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  /// -(1/n) log α, -(1/n) log β, -(1/n) log(e^{-na} α + β); empty when the
  /// probability underflows 1e-300.
  std::optional<double> alpha_exponent;
  std::optional<double> beta_exponent;
  std::optional<double> combined_exponent;
  double target_alpha = 0.0;  // φ̃(-a)
  double target_beta = 0.0;   // φ(a)
  bool saturated = false;
};

/// Builds Q_n, R_n, both Fock densities and S_{n,a} for each n (ν = 1) and
/// records the empirical exponents next to their asymptotic targets.
std::vector<ExponentStudyRow> exponent_convergence_study(
    const SymbolFunction& q, const SymbolFunction& r, double a,
    std::span<const int> n_list, int mode_cap = kDefaultModeCap,
    const QuadratureConfig& quadrature = {});

}  // namespace fermitest
