#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermitest/linalg.hpp"
#include "fermitest/symbol.hpp"
#include "fermitest/toeplitz.hpp"

namespace fermitest {

class FiniteStatePair;

/// Uniform (periodic trapezoidal) rule on [0, 2π)^ν. An empty resolution means
/// default_resolution(ν). Error estimates compare against the grid refined by
/// `refinement` along every axis.
struct QuadratureConfig {
  std::vector<int> resolution;
  int refinement = 2;

  /// Resolution actually used for dimension ν; throws DomainError for fewer
  /// than 16 points per axis or a refinement below 2.
  std::vector<int> resolved(int nu) const;
};

/// A quadrature value with its single-step refinement error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// q̂ and r̂ sampled once on the base quadrature grid and on its refinement,
/// with logarithms precomputed. Every sample must lie strictly inside (0, 1).
class SampledPair {
 public:
  struct Level {
    std::size_t size = 0;
    std::vector<double> q, r;
    std::vector<double> log_q, log_1mq, log_r, log_1mr;
  };

  SampledPair(const SymbolFunction& q, const SymbolFunction& r,
              const QuadratureConfig& cfg = {});

  int nu() const { return q_.dimension(); }
  const SymbolFunction& q() const { return q_; }
  const SymbolFunction& r() const { return r_; }
  const std::vector<int>& resolution() const { return resolution_; }
  int refinement() const { return refinement_; }
  const Level& base() const { return base_; }
  const Level& fine() const { return fine_; }

  /// (2π)^{-ν} ∫ term dx on the base grid, error = |fine - base|. Sums use the
  /// deterministic block reduction, so results do not depend on thread count.
  Estimate integrate(const std::function<double(const Level&, std::size_t)>& term) const;

  /// Same integral on one level only.
  static double mean(const Level& level,
                     const std::function<double(const Level&, std::size_t)>& term);

 private:
  SymbolFunction q_, r_;
  std::vector<int> resolution_;
  int refinement_ = 2;
  Level base_, fine_;
};

/// ψ(t) = (2π)^{-ν} ∫ log[q̂^t r̂^{1-t} + (1-q̂)^t (1-r̂)^{1-t}] dx.
Estimate psi_limit(const SampledPair& pair, double t);
Estimate psi_limit(const SymbolFunction& q, const SymbolFunction& r, double t,
                   const QuadratureConfig& cfg = {});

/// (2π)^{-ν} ∫ [q̂ log(q̂/r̂) + (1-q̂) log((1-q̂)/(1-r̂))] dx.
Estimate mean_relative_entropy(const SampledPair& pair);

/// Grid average of |q̂ - r̂| on the base level.
double l1_distance(const SampledPair& pair);

/// One Szegő comparison: (1/n^ν) Tr f1(A1_n) ... fr(Ar_n) against
/// (2π)^{-ν} ∫ f1(â1) ... fr(âr) dx.
struct SzegoCase {
  std::string label;
  std::vector<SymbolFunction> symbols;
  std::vector<linalg::ScalarFunction> funcs;
};

struct SzegoRow {
  std::string label;
  int n = 0;
  double finite_value = 0.0;
  double limit_value = 0.0;
  double abs_error = 0.0;
};

std::vector<SzegoRow> szego_convergence_study(const SzegoCase& c,
                                              std::span<const int> n_list,
                                              const QuadratureConfig& cfg = {},
                                              std::size_t row_cap = kDefaultRowCap);

/// Samples of t -> ψ(t) (asymptotic) or ψ_n(t)/n^ν (finite), with optional
/// derivative samples and per-sample error estimates.
struct PsiCurve {
  std::string provenance;
  std::vector<double> t, psi, dpsi, err;

  /// Serialized as {"t":[], "psi":[], "dpsi":[], "err":[]}.
  nlohmann::json to_json() const;
  /// t strictly increasing, ψ(1) = 0 within 1e-9 when 1 is sampled, discrete
  /// convexity within 1e-9. Throws NumericalError on violation.
  void validate() const;
};

PsiCurve asymptotic_psi_curve(const SampledPair& pair,
                              std::span<const double> t_grid);
PsiCurve finite_psi_curve(const FiniteStatePair& pair,
                          std::span<const double> t_grid);

struct PsiConvergenceRow {
  int n = 0;
  double t = 0.0;
  double psi_n = 0.0;
  double psi_n_over_volume = 0.0;
  double limit_value = 0.0;
  double abs_error = 0.0;
};

/// ψ_n(t)/n^ν against ψ(t) for every (n, t).
std::vector<PsiConvergenceRow> psi_convergence_study(
    const SampledPair& pair, std::span<const int> n_list,
    std::span<const double> t_grid, std::size_t row_cap = kDefaultRowCap);

}  // namespace fermitest

namespace fermitest {

/// ψ(t) on a single quadrature level.
double psi_on(const SampledPair::Level& level, double t);
/// ψ'(t) on a single quadrature level (derivative under the integral).
double psi_derivative_on(const SampledPair::Level& level, double t);
/// ψ''(t) = (2π)^{-ν} ∫ p(1-p) (log(q̂/r̂) - log((1-q̂)/(1-r̂)))^2 dx with
/// p = q̂^t r̂^{1-t} / (q̂^t r̂^{1-t} + (1-q̂)^t (1-r̂)^{1-t}).
double psi_second_derivative_on(const SampledPair::Level& level, double t);

}  // namespace fermitest
