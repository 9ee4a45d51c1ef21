#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermitest/asymptotics.hpp"

namespace fermitest {

/// ψ'(t) by differentiation under the integral, with refinement error.
Estimate psi_derivative(const SampledPair& pair, double t);

/// Optimal value of a one-dimensional problem and where it is attained.
struct Optimum {
  double value = 0.0;
  double t_star = 0.0;
};

/// -min_{0≤t≤1} ψ(t). For q̂ = r̂ the minimizer is reported as 0.5.
Optimum chernoff_bound(const SampledPair& pair);

/// max_{0≤t<1} (-tr - ψ(t)) / (1-t) for r > 0; ψ'(1) for r = 0.
Optimum hoeffding_bound(const SampledPair& pair, double r);

/// φ(a) = max_{0≤t≤1} {ta - ψ(t)}.
Optimum polar(const SampledPair& pair, double a);

/// φ̃(a) = max_{0≤t≤1} {ta - ψ(1-t)}.
Optimum polar_tilde(const SampledPair& pair, double a);

enum class ConvexityKind { affine, strictly_convex };

struct ConvexityReport {
  ConvexityKind kind = ConvexityKind::strictly_convex;
  double min_second_derivative = 0.0;
  double max_abs_second_derivative = 0.0;
  double l1_distance = 0.0;
  /// affine ⇔ ∫|q̂ - r̂| < 1e-9
  bool consistent = true;
};

/// ψ'' from central differences of ψ' on t ∈ [-1, 2] (step 0.05); affine iff
/// every |ψ''| < 1e-9.
ConvexityReport strict_convexity_check(const SampledPair& pair);

std::string to_string(ConvexityKind kind);

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
  double t_star = 0.0;
};

/// Finite-box counterparts computed from the determinant formulas.
struct FiniteNEntry {
  int n = 0;
  double chernoff = 0.0;
  double chernoff_t_star = 0.0;
  double stein_rate = 0.0;
};

struct ExponentReport {
  Optimum chernoff;
  double chernoff_error = 0.0;
  double stein_rate = 0.0;
  double stein_rate_error = 0.0;
  std::vector<CurvePoint> hoeffding;    // x = r
  std::vector<CurvePoint> polar;        // x = a
  std::vector<CurvePoint> polar_tilde;  // x = a
  ConvexityReport convexity;
  PsiCurve psi_curve;
  std::vector<FiniteNEntry> finite_n;
  std::vector<int> resolution;
  int refinement = 2;

  nlohmann::json to_json() const;
  /// Columns curve,x,value,aux; aux is the quadrature error for ψ samples and
  /// the optimizing t for the exponent curves.
  std::string curves_csv() const;
};

struct ReportRequest {
  std::vector<double> r_grid;
  std::vector<double> a_grid;
  std::vector<double> t_grid;
  std::vector<int> finite_n;
  std::size_t row_cap = kDefaultRowCap;
};

/// Everything above for one pair. Grids must be non-empty (t_grid and
/// finite_n may be empty) and sorted. Violated invariants (negative Chernoff
/// or Stein values, increasing H, inconsistent convexity diagnostics) raise
/// NumericalError.
ExponentReport build_report(const SampledPair& pair, const ReportRequest& request);

/// Chernoff value of a finite box, -min_{0≤t≤1} ψ_n(t) / n^ν, by golden
/// section (tolerance 1e-7 in t).
Optimum finite_chernoff(const FiniteStatePair& pair);

}  // namespace fermitest
