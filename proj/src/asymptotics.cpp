#include "fermitest/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "fermitest/error.hpp"
#include "fermitest/exponents.hpp"
#include "fermitest/kernels.hpp"
#include "fermitest/quasifree.hpp"

namespace fermitest {

namespace {

SampledPair::Level make_level(const SymbolFunction& q, const SymbolFunction& r,
                              const std::vector<int>& resolution) {
  SampledPair::Level level;
  level.q = q.sample(resolution);
  level.r = r.sample(resolution);
  level.size = level.q.size();
  for (std::size_t i = 0; i < level.size; ++i) {
    for (double v : {level.q[i], level.r[i]})
      if (!(v > 0.0 && v < 1.0))
        throw DomainError("symbol value " + std::to_string(v) +
                          " outside (0, 1); the pair is not faithful");
  }
  level.log_q.resize(level.size);
  level.log_1mq.resize(level.size);
  level.log_r.resize(level.size);
  level.log_1mr.resize(level.size);
  kernels::parallel_for(level.size, [&](std::size_t i) {
    level.log_q[i] = std::log(level.q[i]);
    level.log_1mq[i] = std::log1p(-level.q[i]);
    level.log_r[i] = std::log(level.r[i]);
    level.log_1mr[i] = std::log1p(-level.r[i]);
  });
  return level;
}

/// log(e^u + e^v) without overflow.
double log_add_exp(double u, double v) {
  const double m = std::max(u, v);
  return m + std::log1p(std::exp(-std::abs(u - v)));
}

/// Weight p = e^u / (e^u + e^v).
double logistic_weight(double u, double v) {
  return 1.0 / (1.0 + std::exp(v - u));
}

}  // namespace

std::vector<int> QuadratureConfig::resolved(int nu) const {
  if (refinement < 2) throw DomainError("quadrature refinement factor must be at least 2");
  std::vector<int> res = resolution.empty() ? default_resolution(nu) : resolution;
  if (static_cast<int>(res.size()) != nu)
    throw DomainError("quadrature resolution has " + std::to_string(res.size()) +
                      " axes, expected " + std::to_string(nu));
  for (int n : res)
    if (n < 16) throw DomainError("quadrature needs at least 16 samples per axis");
  return res;
}

SampledPair::SampledPair(const SymbolFunction& q, const SymbolFunction& r,
                         const QuadratureConfig& cfg)
    : q_(q), r_(r) {
  if (q.dimension() != r.dimension())
    throw DomainError("symbols have different dimensions");
  resolution_ = cfg.resolved(q.dimension());
  refinement_ = cfg.refinement;
  std::vector<int> fine = resolution_;
  for (int& n : fine) n *= cfg.refinement;
  base_ = make_level(q, r, resolution_);
  fine_ = make_level(q, r, fine);
}

double SampledPair::mean(const Level& level,
                         const std::function<double(const Level&, std::size_t)>& term) {
  const double s = kernels::block_sum_parallel<double>(
      level.size, [&](std::size_t i) { return term(level, i); });
  return s / static_cast<double>(level.size);
}

Estimate SampledPair::integrate(
    const std::function<double(const Level&, std::size_t)>& term) const {
  const double coarse = mean(base_, term);
  const double refined = mean(fine_, term);
  return {coarse, std::abs(refined - coarse)};
}

double psi_on(const SampledPair::Level& level, double t) {
  return SampledPair::mean(level, [t](const SampledPair::Level& l, std::size_t i) {
    const double u = t * l.log_q[i] + (1.0 - t) * l.log_r[i];
    const double v = t * l.log_1mq[i] + (1.0 - t) * l.log_1mr[i];
    return log_add_exp(u, v);
  });
}

double psi_derivative_on(const SampledPair::Level& level, double t) {
  return SampledPair::mean(level, [t](const SampledPair::Level& l, std::size_t i) {
    const double u = t * l.log_q[i] + (1.0 - t) * l.log_r[i];
    const double v = t * l.log_1mq[i] + (1.0 - t) * l.log_1mr[i];
    const double p = logistic_weight(u, v);
    return p * (l.log_q[i] - l.log_r[i]) + (1.0 - p) * (l.log_1mq[i] - l.log_1mr[i]);
  });
}

double psi_second_derivative_on(const SampledPair::Level& level, double t) {
  return SampledPair::mean(level, [t](const SampledPair::Level& l, std::size_t i) {
    const double u = t * l.log_q[i] + (1.0 - t) * l.log_r[i];
    const double v = t * l.log_1mq[i] + (1.0 - t) * l.log_1mr[i];
    const double p = logistic_weight(u, v);
    const double d = (l.log_q[i] - l.log_r[i]) - (l.log_1mq[i] - l.log_1mr[i]);
    return p * (1.0 - p) * d * d;
  });
}

Estimate psi_limit(const SampledPair& pair, double t) {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  const double coarse = psi_on(pair.base(), t);
  const double refined = psi_on(pair.fine(), t);
  return {coarse, std::abs(refined - coarse)};
}

Estimate psi_limit(const SymbolFunction& q, const SymbolFunction& r, double t,
                   const QuadratureConfig& cfg) {
  return psi_limit(SampledPair(q, r, cfg), t);
}

Estimate mean_relative_entropy(const SampledPair& pair) {
  return pair.integrate([](const SampledPair::Level& l, std::size_t i) {
    return l.q[i] * (l.log_q[i] - l.log_r[i]) +
           (1.0 - l.q[i]) * (l.log_1mq[i] - l.log_1mr[i]);
  });
}

double l1_distance(const SampledPair& pair) {
  return SampledPair::mean(pair.base(), [](const SampledPair::Level& l, std::size_t i) {
    return std::abs(l.q[i] - l.r[i]);
  });
}

std::vector<SzegoRow> szego_convergence_study(const SzegoCase& c,
                                              std::span<const int> n_list,
                                              const QuadratureConfig& cfg,
                                              std::size_t row_cap) {
  if (c.symbols.empty() || c.symbols.size() != c.funcs.size())
    throw DomainError("Szego case needs one function per symbol");
  const int nu = c.symbols.front().dimension();
  for (const auto& s : c.symbols)
    if (s.dimension() != nu) throw DomainError("Szego symbols differ in dimension");

  const auto res = cfg.resolved(nu);
  std::vector<std::vector<double>> samples;
  for (std::size_t k = 0; k < c.symbols.size(); ++k) {
    samples.push_back(c.symbols[k].sample(res));
    const auto [lo, hi] = std::minmax_element(samples.back().begin(), samples.back().end());
    const auto& f = c.funcs[k];
    if (*lo < f.lo - kClampTolerance || *hi > f.hi + kClampTolerance)
      throw DomainError("function " + f.name + " is not defined on the range of " +
                        c.symbols[k].description());
  }
  const std::size_t points = samples.front().size();
  const double limit =
      kernels::block_sum_parallel<double>(points, [&](std::size_t i) {
        double prod = 1.0;
        for (std::size_t k = 0; k < samples.size(); ++k)
          prod *= c.funcs[k](std::clamp(samples[k][i], c.funcs[k].lo, c.funcs[k].hi));
        return prod;
      }) / static_cast<double>(points);

  std::vector<SzegoRow> rows;
  for (int n : n_list) {
    CMatrix product;
    for (std::size_t k = 0; k < c.symbols.size(); ++k) {
      const CMatrix fk =
          linalg::matrix_function(truncation(c.symbols[k], n, row_cap).matrix, c.funcs[k]);
      product = k == 0 ? fk : CMatrix(product * fk);
    }
    SzegoRow row;
    row.label = c.label;
    row.n = n;
    row.finite_value = product.trace().real() / static_cast<double>(product.rows());
    row.limit_value = limit;
    row.abs_error = std::abs(row.finite_value - limit);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json PsiCurve::to_json() const {
  return {{"t", t}, {"psi", psi}, {"dpsi", dpsi}, {"err", err}};
}

void PsiCurve::validate() const {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw NumericalError("psi curve t-grid is not increasing");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] == 1.0 && std::abs(psi[i]) > 1e-9)
      throw NumericalError("psi(1) differs from 0 by " + std::to_string(psi[i]));
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h = 0.5 * (t[i + 1] - t[i - 1]);
    const double left = (psi[i] - psi[i - 1]) / (t[i] - t[i - 1]);
    const double right = (psi[i + 1] - psi[i]) / (t[i + 1] - t[i]);
    if (h * (right - left) < -1e-9)
      throw NumericalError("psi curve is not convex near t=" + std::to_string(t[i]));
  }
}

PsiCurve asymptotic_psi_curve(const SampledPair& pair,
                              std::span<const double> t_grid) {
  PsiCurve c;
  c.provenance = "asymptotic";
  for (double t : t_grid) {
    const Estimate v = psi_limit(pair, t);
    c.t.push_back(t);
    c.psi.push_back(v.value);
    c.dpsi.push_back(psi_derivative(pair, t).value);
    c.err.push_back(v.error);
  }
  return c;
}

PsiCurve finite_psi_curve(const FiniteStatePair& pair,
                          std::span<const double> t_grid) {
  PsiCurve c;
  c.provenance = "finite n=" + std::to_string(pair.size());
  const double volume = pair.volume();
  for (double t : t_grid) {
    c.t.push_back(t);
    c.psi.push_back(psi_n(pair, t) / volume);
    c.dpsi.push_back(psi_n_derivative(pair, t) / volume);
    c.err.push_back(0.0);
  }
  return c;
}

std::vector<PsiConvergenceRow> psi_convergence_study(
    const SampledPair& pair, std::span<const int> n_list,
    std::span<const double> t_grid, std::size_t row_cap) {
  std::vector<double> limits;
  for (double t : t_grid) limits.push_back(psi_limit(pair, t).value);
  std::vector<PsiConvergenceRow> rows;
  for (int n : n_list) {
    const auto finite = FiniteStatePair::from_symbols(pair.q(), pair.r(), n, row_cap);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      PsiConvergenceRow row;
      row.n = n;
      row.t = t_grid[i];
      row.psi_n = psi_n(finite, t_grid[i]);
      row.psi_n_over_volume = row.psi_n / finite.volume();
      row.limit_value = limits[i];
      row.abs_error = std::abs(row.psi_n_over_volume - row.limit_value);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace fermitest
