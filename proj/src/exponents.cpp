#include "fermitest/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "fermitest/error.hpp"
#include "fermitest/kernels.hpp"
#include "fermitest/quasifree.hpp"

namespace fermitest {

namespace {

constexpr double kArgTolerance = 1e-10;
constexpr double kHoeffdingGap = 1e-8;
constexpr double kFlatSlope = 1e-13;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

/// Largest t in [lo, hi] with f(t) ≥ 0 for a non-increasing f, f(lo) ≥ 0 ≥ f(hi).
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi) {
  while (hi - lo > kArgTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Minimizer of a convex f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol) {
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

/// Best of an interior candidate and the two endpoints, for a function to be
/// minimized. Guards against a noisy derivative sending bisection astray.
double best_of(const std::function<double(double)>& f, std::initializer_list<double> ts) {
  double best_t = *ts.begin();
  double best = f(best_t);
  for (double t : ts) {
    const double v = f(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

void check_sorted(const std::vector<double>& grid, const char* name, bool allow_empty) {
  if (grid.empty() && !allow_empty)
    throw DomainError(std::string(name) + " must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw DomainError(std::string(name) + " must be strictly increasing");
  for (double v : grid)
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " has a non-finite entry");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Estimate psi_derivative(const SampledPair& pair, double t) {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  const double coarse = psi_derivative_on(pair.base(), t);
  const double refined = psi_derivative_on(pair.fine(), t);
  return {coarse, std::abs(refined - coarse)};
}

Optimum chernoff_bound(const SampledPair& pair) {
  const auto& level = pair.base();
  const auto psi = [&](double t) { return psi_on(level, t); };
  const auto dpsi = [&](double t) { return psi_derivative_on(level, t); };
  const double d0 = dpsi(0.0), d1 = dpsi(1.0);
  if (std::abs(d0) < kFlatSlope && std::abs(d1) < kFlatSlope)
    return {-psi(0.5), 0.5};

  double t;
  if (d0 < 0.0 && d1 > 0.0) {
    t = bisect_decreasing([&](double s) { return -dpsi(s); }, 0.0, 1.0);
  } else {
    t = golden_section(psi, 0.0, 1.0, kArgTolerance);
  }
  t = best_of(psi, {t, 0.0, 1.0});
  return {std::max(0.0, -psi(t)), t};
}

Optimum hoeffding_bound(const SampledPair& pair, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("Hoeffding rate r must be ≥ 0");
  const auto& level = pair.base();
  if (r == 0.0) return {psi_derivative_on(level, 1.0), 1.0};

  const auto g = [&](double t) { return (-t * r - psi_on(level, t)) / (1.0 - t); };
  // g'(t) has the sign of N(t) = -r - ψ(t) - (1-t)ψ'(t), which is
  // non-increasing because N'(t) = -(1-t)ψ''(t).
  const auto numerator = [&](double t) {
    return -r - psi_on(level, t) - (1.0 - t) * psi_derivative_on(level, t);
  };
  const double hi = 1.0 - kHoeffdingGap;
  double t;
  if (numerator(0.0) <= 0.0) t = 0.0;
  else if (numerator(hi) >= 0.0) t = hi;
  else t = bisect_decreasing(numerator, 0.0, hi);

  // g(0) = -ψ(0) vanishes for faithful pairs; use the exact boundary value.
  const double value = t == 0.0 ? 0.0 : g(t);
  if (value <= 0.0) return {0.0, 0.0};
  return {value, t};
}

Optimum polar(const SampledPair& pair, double a) {
  if (!std::isfinite(a)) throw DomainError("a must be finite");
  const auto& level = pair.base();
  const auto objective = [&](double t) { return t * a - psi_on(level, t); };
  double t;
  if (a <= psi_derivative_on(level, 0.0)) t = 0.0;
  else if (a >= psi_derivative_on(level, 1.0)) t = 1.0;
  else t = bisect_decreasing([&](double s) { return a - psi_derivative_on(level, s); }, 0.0, 1.0);
  t = best_of([&](double s) { return -objective(s); }, {t, 0.0, 1.0});
  return {objective(t), t};
}

Optimum polar_tilde(const SampledPair& pair, double a) {
  const Optimum inner = polar(pair, -a);
  return {a + inner.value, 1.0 - inner.t_star};
}

std::string to_string(ConvexityKind kind) {
  return kind == ConvexityKind::affine ? "affine" : "strictly_convex";
}

ConvexityReport strict_convexity_check(const SampledPair& pair) {
  constexpr double h = 1e-4;
  constexpr int steps = 60;
  const auto& level = pair.base();
  std::vector<double> second(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = -1.0 + 0.05 * i;
    second[i] = (psi_derivative_on(level, t + h) - psi_derivative_on(level, t - h)) / (2 * h);
  }
  ConvexityReport report;
  report.min_second_derivative = *std::min_element(second.begin(), second.end());
  report.max_abs_second_derivative = 0.0;
  for (double v : second)
    report.max_abs_second_derivative = std::max(report.max_abs_second_derivative, std::abs(v));
  report.kind = report.max_abs_second_derivative < 1e-9 ? ConvexityKind::affine
                                                        : ConvexityKind::strictly_convex;
  report.l1_distance = l1_distance(pair);
  report.consistent = (report.kind == ConvexityKind::affine) == (report.l1_distance < 1e-9);
  return report;
}

Optimum finite_chernoff(const FiniteStatePair& pair) {
  const double volume = pair.volume();
  const auto f = [&](double t) { return psi_n(pair, t) / volume; };
  double t = golden_section(f, 0.0, 1.0, 1e-7);
  t = best_of(f, {t, 0.0, 1.0});
  return {std::max(0.0, -f(t)), t};
}

ExponentReport build_report(const SampledPair& pair, const ReportRequest& request) {
  check_sorted(request.r_grid, "r_grid", false);
  check_sorted(request.a_grid, "a_grid", false);
  check_sorted(request.t_grid, "t_grid", true);
  for (std::size_t i = 1; i < request.finite_n.size(); ++i)
    if (request.finite_n[i] <= request.finite_n[i - 1])
      throw DomainError("finite_n must be strictly increasing");
  if (request.r_grid.front() < 0.0) throw DomainError("r_grid entries must be ≥ 0");

  ExponentReport report;
  report.resolution = pair.resolution();
  report.refinement = pair.refinement();

  report.chernoff = chernoff_bound(pair);
  report.chernoff_error =
      std::abs(psi_on(pair.fine(), report.chernoff.t_star) -
               psi_on(pair.base(), report.chernoff.t_star));
  const Estimate stein = psi_derivative(pair, 1.0);
  report.stein_rate = stein.value;
  report.stein_rate_error = stein.error;

  report.hoeffding.resize(request.r_grid.size());
  report.polar.resize(request.a_grid.size());
  report.polar_tilde.resize(request.a_grid.size());
  kernels::parallel_for(request.r_grid.size(), [&](std::size_t i) {
    const Optimum h = hoeffding_bound(pair, request.r_grid[i]);
    report.hoeffding[i] = {request.r_grid[i], h.value, h.t_star};
  });
  kernels::parallel_for(request.a_grid.size(), [&](std::size_t i) {
    const double a = request.a_grid[i];
    const Optimum p = polar(pair, a);
    const Optimum pt = polar_tilde(pair, a);
    report.polar[i] = {a, p.value, p.t_star};
    report.polar_tilde[i] = {a, pt.value, pt.t_star};
  });

  report.convexity = strict_convexity_check(pair);
  if (!request.t_grid.empty()) {
    report.psi_curve = asymptotic_psi_curve(pair, request.t_grid);
    report.psi_curve.validate();
  }

  for (int n : request.finite_n) {
    const auto finite = FiniteStatePair::from_symbols(pair.q(), pair.r(), n, request.row_cap);
    const Optimum c = finite_chernoff(finite);
    report.finite_n.push_back(
        {n, c.value, c.t_star, relative_entropy_n(finite) / finite.volume()});
  }

  if (report.chernoff.value < 0.0 || report.stein_rate < -1e-12)
    throw NumericalError("negative exponent: chernoff=" + format_double(report.chernoff.value) +
                         " stein_rate=" + format_double(report.stein_rate));
  for (std::size_t i = 1; i < report.hoeffding.size(); ++i)
    if (report.hoeffding[i].value > report.hoeffding[i - 1].value + 1e-12)
      throw NumericalError("Hoeffding curve increases between r=" +
                           format_double(report.hoeffding[i - 1].x) + " and r=" +
                           format_double(report.hoeffding[i].x));
  if (!report.convexity.consistent)
    throw NumericalError("convexity diagnostic disagrees with the L1 distance of the symbols");
  return report;
}

nlohmann::json ExponentReport::to_json() const {
  nlohmann::json j;
  j["chernoff"] = {{"value", chernoff.value}, {"t_star", chernoff.t_star}};
  j["stein_rate"] = stein_rate;
  auto& h = j["hoeffding"] = nlohmann::json::array();
  for (const auto& p : hoeffding) h.push_back({{"r", p.x}, {"value", p.value}, {"t_star", p.t_star}});
  auto& pl = j["polar"] = nlohmann::json::array();
  for (const auto& p : polar) pl.push_back({{"a", p.x}, {"value", p.value}});
  auto& pt = j["polar_tilde"] = nlohmann::json::array();
  for (const auto& p : polar_tilde) pt.push_back({{"a", p.x}, {"value", p.value}});
  j["convexity"] = {{"kind", to_string(convexity.kind)},
                    {"min_second_derivative", convexity.min_second_derivative}};
  j["quadrature"] = {{"resolution", resolution},
                     {"refinement", refinement},
                     {"chernoff_error", chernoff_error},
                     {"stein_rate_error", stein_rate_error},
                     {"l1_distance", convexity.l1_distance}};
  auto& f = j["finite_n"] = nlohmann::json::array();
  for (const auto& e : finite_n)
    f.push_back({{"n", e.n},
                 {"chernoff", {{"value", e.chernoff}, {"t_star", e.chernoff_t_star}}},
                 {"stein_rate", e.stein_rate}});
  return j;
}

std::string ExponentReport::curves_csv() const {
  std::string out = "curve,x,value,aux\n";
  const auto row = [&](const char* curve, double x, double value, double aux) {
    out += curve;
    out += ',' + format_double(x) + ',' + format_double(value) + ',' + format_double(aux) + '\n';
  };
  for (std::size_t i = 0; i < psi_curve.t.size(); ++i)
    row("psi", psi_curve.t[i], psi_curve.psi[i], psi_curve.err[i]);
  for (const auto& p : hoeffding) row("hoeffding", p.x, p.value, p.t_star);
  for (const auto& p : polar) row("polar", p.x, p.value, p.t_star);
  for (const auto& p : polar_tilde) row("polar_tilde", p.x, p.value, p.t_star);
  return out;
}

}  // namespace fermitest
