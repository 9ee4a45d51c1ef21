#include "fermitest/fock.hpp"

#include <bit>
#include <cmath>

#include "fermitest/error.hpp"
#include "fermitest/exponents.hpp"
#include "fermitest/kernels.hpp"
#include "fermitest/toeplitz.hpp"

namespace fermitest {

namespace {

constexpr double kStateTolerance = 1e-12;
constexpr double kRenormalizeTolerance = 1e-10;
constexpr double kTieThreshold = 1e-12;
constexpr double kClosedFormTolerance = 1e-10;

CMatrix submatrix(const CMatrix& m, std::span<const std::uint32_t> masks) {
  const auto d = static_cast<Eigen::Index>(masks.size());
  CMatrix out(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) out(r, c) = m(masks[r], masks[c]);
  return out;
}

void require_compatible(const FockState& rho, const FockState& sigma) {
  if (rho.modes != sigma.modes)
    throw DomainError("states live on different mode counts");
}

/// e^{-scale·a} ρ_k - σ_k, rescaled by a positive factor when e^{-scale·a}
/// would overflow; the rescaling leaves the positive spectral projection
/// unchanged.
CMatrix np_operator(const CMatrix& rho, const CMatrix& sigma, double a,
                    double scale) {
  const double e = -scale * a;
  if (e <= 0.0) return std::exp(e) * rho - sigma;
  return rho - std::exp(-e) * sigma;
}

linalg::HermitianEigen positive_eigen(const CMatrix& block, const char* what) {
  linalg::HermitianEigen e = linalg::hermitian_eigen(linalg::hermitize(block));
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (!(e.values[i] > 0.0))
      throw NumericalError(std::string(what) +
                           " is not faithful (non-positive eigenvalue)");
  return e;
}

}  // namespace

FockBasis::FockBasis(int modes, int mode_cap) : modes_(modes) {
  if (modes < 0) throw DomainError("mode count must be non-negative");
  if (modes > mode_cap || modes > kernels::kMaxWedgeOrder)
    throw CapExceeded(std::to_string(modes) + " modes exceed the mode cap " +
                      std::to_string(std::min(mode_cap, kernels::kMaxWedgeOrder)));
  sectors_.resize(static_cast<std::size_t>(modes) + 1);
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << modes); ++s)
    sectors_[static_cast<std::size_t>(std::popcount(s))].push_back(s);
}

Complex BlockDiagonal::trace() const {
  Complex t{};
  for (const auto& b : blocks) t += b.trace();
  return t;
}

CMatrix BlockDiagonal::dense() const {
  const FockBasis basis(modes, kernels::kMaxWedgeOrder);
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(basis.dimension()),
                              static_cast<Eigen::Index>(basis.dimension()));
  for (int k = 0; k <= modes; ++k) {
    const auto masks = basis.sector(k);
    const CMatrix& b = blocks[static_cast<std::size_t>(k)];
    for (std::size_t c = 0; c < masks.size(); ++c)
      for (std::size_t r = 0; r < masks.size(); ++r)
        out(masks[r], masks[c]) = b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

BlockDiagonal BlockDiagonal::scaled(double factor) const {
  BlockDiagonal out{modes, blocks};
  for (auto& b : out.blocks) b *= factor;
  return out;
}

void FockState::validate() const {
  const Complex tr = density.trace();
  if (std::abs(tr - 1.0) > kStateTolerance)
    throw NumericalError("density trace " + std::to_string(tr.real()) +
                         " differs from 1");
  for (const auto& b : density.blocks) {
    if (b.size() == 0) continue;
    if (linalg::hermiticity_defect(b) > kStateTolerance)
      throw NumericalError("density is not Hermitian");
    if (linalg::hermitian_eigenvalues(b).minCoeff() < -kStateTolerance)
      throw NumericalError("density has a negative eigenvalue");
  }
}

BlockDiagonal second_quantization_blocks(const CMatrix& a, int mode_cap) {
  if (a.rows() != a.cols()) throw DomainError("F(A) needs a square matrix");
  const int m = static_cast<int>(a.rows());
  const FockBasis basis(m, mode_cap);
  BlockDiagonal out{m, {}};
  out.blocks.reserve(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k)
    out.blocks.push_back(kernels::wedge_block_parallel(a, basis.sector(k)));
  return out;
}

CMatrix second_quantization(const CMatrix& a, int mode_cap) {
  return second_quantization_blocks(a, mode_cap).dense();
}

FockState quasifree_density(const CMatrix& q, double eta, int mode_cap) {
  if (q.rows() != q.cols()) throw DomainError("symbol matrix must be square");
  if (!(eta > 0.0 && eta <= 0.5))
    throw DomainError("quasi-free density needs a margin eta in (0, 1/2]");
  const int m = static_cast<int>(q.rows());
  if (m > mode_cap)
    throw CapExceeded(std::to_string(m) + " modes exceed the mode cap " +
                      std::to_string(mode_cap));

  linalg::HermitianEigen eig = linalg::hermitian_eigen(linalg::hermitize(q));
  eig.values = linalg::clamp_spectrum(eig.values, eta, 1.0 - eta, "spectrum of Q");
  double det = 1.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) det *= 1.0 - eig.values[i];
  const CMatrix ratio =
      linalg::apply_spectral(eig, [](double l) { return l / (1.0 - l); });

  FockState state{m, second_quantization_blocks(ratio, mode_cap).scaled(det)};
  for (auto& b : state.density.blocks) b = linalg::hermitize(b);
  const double tr = state.density.trace().real();
  if (std::abs(tr - 1.0) > kRenormalizeTolerance)
    throw NumericalError("quasi-free density has trace " + std::to_string(tr));
  for (auto& b : state.density.blocks) b /= tr;
  return state;
}

CMatrix creation_operator(int modes, int i) {
  if (i < 0 || i >= modes) throw DomainError("mode index out of range");
  const FockBasis basis(modes, kernels::kMaxWedgeOrder);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  CMatrix c = CMatrix::Zero(dim, dim);
  const std::uint32_t bit = std::uint32_t{1} << i;
  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s) {
    if (s & bit) continue;
    const int below = std::popcount(s & (bit - 1));
    c(s | bit, s) = (below % 2 == 0) ? 1.0 : -1.0;
  }
  return c;
}

CMatrix annihilation_operator(int modes, int i) {
  return creation_operator(modes, i).adjoint();
}

CMatrix creation_operator(const CVector& x) {
  const int m = static_cast<int>(x.size());
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
  CMatrix c = CMatrix::Zero(dim, dim);
  for (int i = 0; i < m; ++i)
    if (x[i] != Complex{}) c += x[i] * creation_operator(m, i);
  return c;
}

CMatrix annihilation_operator(const CVector& y) {
  return creation_operator(y).adjoint();
}

WickResult wick_check(const FockState& state, const CMatrix& q,
                      const Monomial& monomial) {
  const int m = state.modes;
  if (q.rows() != m || q.cols() != m)
    throw DomainError("symbol size does not match the state's mode count");
  for (const auto* list : {&monomial.creations, &monomial.annihilations})
    for (const auto& v : *list)
      if (v.size() != m) throw DomainError("monomial vector has the wrong length");

  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
  CMatrix op = CMatrix::Identity(dim, dim);
  for (const auto& x : monomial.creations) op = op * creation_operator(x);
  for (auto it = monomial.annihilations.rbegin(); it != monomial.annihilations.rend(); ++it)
    op = op * annihilation_operator(*it);

  const CMatrix rho = state.density.dense();
  const Complex value = (rho * op).trace();

  Complex expected{};
  const std::size_t n = monomial.creations.size();
  if (n == monomial.annihilations.size()) {
    if (n == 0) {
      expected = 1.0;
    } else {
      CMatrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              monomial.annihilations[i].dot(q * monomial.creations[j]);
      expected = g.determinant();
    }
  }
  return {value, expected, std::abs(value - expected)};
}

BinaryTest neyman_pearson_test(const FockState& rho, const FockState& sigma,
                               double a, double scale) {
  require_compatible(rho, sigma);
  const FockBasis basis(rho.modes, kernels::kMaxWedgeOrder);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  CMatrix t = CMatrix::Zero(dim, dim);
  for (int k = 0; k <= rho.modes; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const auto eig = linalg::hermitian_eigen(linalg::hermitize(
        np_operator(rho.density.blocks[kk], sigma.density.blocks[kk], a, scale)));
    CMatrix p = CMatrix::Zero(eig.vectors.rows(), eig.vectors.cols());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      if (eig.values[i] > kTieThreshold)
        p += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    const auto masks = basis.sector(k);
    for (std::size_t c = 0; c < masks.size(); ++c)
      for (std::size_t r = 0; r < masks.size(); ++r)
        t(masks[r], masks[c]) = p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return {t};
}

ErrorProbabilities error_probabilities(const FockState& rho,
                                       const FockState& sigma,
                                       const BinaryTest& test) {
  require_compatible(rho, sigma);
  const FockBasis basis(rho.modes, kernels::kMaxWedgeOrder);
  if (test.op.rows() != static_cast<Eigen::Index>(basis.dimension()))
    throw DomainError("test operator has the wrong dimension");
  // The densities are block diagonal, so only the diagonal blocks of T count.
  double alpha = 0.0, beta = 0.0;
  for (int k = 0; k <= rho.modes; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const CMatrix tk = submatrix(test.op, basis.sector(k));
    const CMatrix& r = rho.density.blocks[kk];
    const CMatrix& s = sigma.density.blocks[kk];
    const CMatrix id = CMatrix::Identity(tk.rows(), tk.cols());
    alpha += (r * (id - tk)).trace().real();
    beta += (s * tk).trace().real();
  }
  return {std::clamp(alpha, 0.0, 1.0), std::clamp(beta, 0.0, 1.0)};
}

ErrorProbabilities neyman_pearson_errors(const FockState& rho,
                                         const FockState& sigma, double a,
                                         double scale) {
  require_compatible(rho, sigma);
  double alpha = 0.0, beta = 0.0;
  for (std::size_t k = 0; k < rho.density.blocks.size(); ++k) {
    const CMatrix& r = rho.density.blocks[k];
    const CMatrix& s = sigma.density.blocks[k];
    const auto eig = linalg::hermitian_eigen(
        linalg::hermitize(np_operator(r, s, a, scale)));
    const CMatrix rv = r * eig.vectors;
    const CMatrix sv = s * eig.vectors;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values[i] > kTieThreshold)
        beta += eig.vectors.col(i).dot(sv.col(i)).real();
      else
        alpha += eig.vectors.col(i).dot(rv.col(i)).real();
    }
  }
  return {std::clamp(alpha, 0.0, 1.0), std::clamp(beta, 0.0, 1.0)};
}

double trace_norm_difference(const FockState& rho, const FockState& sigma,
                             double a, double scale) {
  require_compatible(rho, sigma);
  const double f = std::exp(-scale * a);
  double norm = 0.0;
  for (std::size_t k = 0; k < rho.density.blocks.size(); ++k) {
    const RVector ev = linalg::hermitian_eigenvalues(linalg::hermitize(
        f * rho.density.blocks[k] - sigma.density.blocks[k]));
    norm += ev.cwiseAbs().sum();
  }
  return norm;
}

namespace {

CMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix g(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(d, d);
}

BinaryTest random_test(Eigen::Index d, bool projection, std::mt19937_64& rng) {
  const CMatrix u = random_unitary(d, rng);
  RVector diag(d);
  if (projection) {
    std::uniform_int_distribution<Eigen::Index> rank_dist(0, d);
    const Eigen::Index rank = rank_dist(rng);
    for (Eigen::Index i = 0; i < d; ++i) diag[i] = i < rank ? 1.0 : 0.0;
  } else {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < d; ++i) diag[i] = unit(rng);
  }
  return {linalg::hermitize(u * diag.asDiagonal() * u.adjoint())};
}

}  // namespace

NpOptimalityReport np_optimality_check(const FockState& rho,
                                       const FockState& sigma, double a,
                                       double scale, int trials,
                                       std::mt19937_64& rng) {
  require_compatible(rho, sigma);
  if (trials < 1) throw DomainError("need at least one trial");
  const double f = std::exp(-scale * a);
  const auto objective = [&](const BinaryTest& t) {
    const auto e = error_probabilities(rho, sigma, t);
    return f * e.alpha + e.beta;
  };

  NpOptimalityReport report;
  report.trials = trials;
  report.np_value = objective(neyman_pearson_test(rho, sigma, a, scale));
  report.closed_form =
      0.5 * (f + 1.0 - trace_norm_difference(rho, sigma, a, scale));
  report.closed_form_residual = std::abs(report.np_value - report.closed_form);
  report.worst_gap = -std::numeric_limits<double>::infinity();

  const auto d = static_cast<Eigen::Index>(std::size_t{1} << rho.modes);
  for (int i = 0; i < trials; ++i) {
    const double gap = report.np_value - objective(random_test(d, i % 2 == 0, rng));
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > kClosedFormTolerance) ++report.violations;
  }
  report.pass = report.violations == 0 &&
                report.closed_form_residual <= kClosedFormTolerance;
  return report;
}

double log_trace_power_product(const FockState& rho, const FockState& sigma,
                               double t) {
  require_compatible(rho, sigma);
  double total = 0.0;
  for (std::size_t k = 0; k < rho.density.blocks.size(); ++k) {
    const auto er = positive_eigen(rho.density.blocks[k], "rho");
    const auto es = positive_eigen(sigma.density.blocks[k], "sigma");
    const CMatrix x = er.vectors.adjoint() * es.vectors;
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
      const double sj = std::pow(es.values[j], 1.0 - t);
      for (Eigen::Index i = 0; i < er.values.size(); ++i)
        total += std::pow(er.values[i], t) * sj * std::norm(x(i, j));
    }
  }
  return std::log(total);
}

double relative_entropy(const FockState& rho, const FockState& sigma) {
  require_compatible(rho, sigma);
  double s = 0.0;
  for (std::size_t k = 0; k < rho.density.blocks.size(); ++k) {
    const auto er = positive_eigen(rho.density.blocks[k], "rho");
    const auto es = positive_eigen(sigma.density.blocks[k], "sigma");
    const CMatrix x = er.vectors.adjoint() * es.vectors;
    for (Eigen::Index i = 0; i < er.values.size(); ++i)
      s += er.values[i] * std::log(er.values[i]);
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
      const double log_s = std::log(es.values[j]);
      for (Eigen::Index i = 0; i < er.values.size(); ++i)
        s -= er.values[i] * std::norm(x(i, j)) * log_s;
    }
  }
  return s;
}

std::vector<ExponentStudyRow> exponent_convergence_study(
    const SymbolFunction& q, const SymbolFunction& r, double a,
    std::span<const int> n_list, int mode_cap,
    const QuadratureConfig& quadrature) {
  if (q.dimension() != 1 || r.dimension() != 1)
    throw DomainError("exponent convergence study is defined for nu = 1");
  for (int n : n_list) {
    if (n < 1) throw DomainError("study sizes must be positive");
    if (n > mode_cap)
      throw CapExceeded("study size " + std::to_string(n) +
                        " exceeds the mode cap " + std::to_string(mode_cap));
  }
  const double eta = std::min(q.eta(), r.eta());
  const SampledPair pair(q, r, quadrature);
  const double target_beta = polar(pair, a).value;
  const double target_alpha = polar_tilde(pair, -a).value;

  std::vector<ExponentStudyRow> rows;
  for (int n : n_list) {
    const FockState rho = quasifree_density(truncation(q, n).matrix, eta, mode_cap);
    const FockState sigma = quasifree_density(truncation(r, n).matrix, eta, mode_cap);
    const auto e = neyman_pearson_errors(rho, sigma, a, n);

    ExponentStudyRow row;
    row.n = n;
    row.alpha = e.alpha;
    row.beta = e.beta;
    row.target_alpha = target_alpha;
    row.target_beta = target_beta;
    const double inv = 1.0 / n;
    constexpr double kFloor = 1e-300;
    if (e.alpha >= kFloor) row.alpha_exponent = -inv * std::log(e.alpha);
    if (e.beta >= kFloor) row.beta_exponent = -inv * std::log(e.beta);
    const double combined = std::exp(-n * a) * e.alpha + e.beta;
    if (combined >= kFloor && std::isfinite(combined))
      row.combined_exponent = -inv * std::log(combined);
    row.saturated = e.alpha < kFloor || e.beta < kFloor;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fermitest
