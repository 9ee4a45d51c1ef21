#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "fermitest/error.hpp"
#include "fermitest/exponents.hpp"
#include "fermitest/fock.hpp"
#include "fermitest/quasifree.hpp"
#include "random_symbols.hpp"

using namespace fermitest;

namespace {

CMatrix random_matrix(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  return a;
}

CVector random_vector(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = Complex(g(rng), g(rng));
  return v;
}

CMatrix random_density_matrix(int m, std::mt19937_64& rng) {
  const CMatrix a = random_matrix(m, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  RVector v(m);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  for (int i = 0; i < m; ++i) v[i] = u(rng);
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("trace of second quantization is det(I + A)") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    const CMatrix a = random_matrix(m, rng);
    const Complex expected = (CMatrix::Identity(m, m) + a).determinant();
    CHECK(std::abs(second_quantization(a).trace() - expected) <= 1e-9 * std::abs(expected));
    CHECK(std::abs(second_quantization_blocks(a).trace() - expected) <= 1e-9 * std::abs(expected));
  }
}

TEST_CASE("second quantization is multiplicative and unital") {
  std::mt19937_64 rng(2);
  const CMatrix a = random_matrix(4, rng), b = random_matrix(4, rng);
  const CMatrix fab = second_quantization(a * b);
  CHECK((second_quantization(a) * second_quantization(b) - fab).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((second_quantization(CMatrix::Identity(4, 4)) - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
  const CMatrix zero = second_quantization(CMatrix::Zero(3, 3));
  CHECK(zero(0, 0) == Complex(1.0, 0.0));
  CHECK(zero.cwiseAbs().sum() == 1.0);
  CHECK((second_quantization_blocks(a).dense() - second_quantization(a)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sector layout") {
  const FockBasis basis(5);
  std::size_t total = 0;
  for (int k = 0; k <= 5; ++k) {
    for (auto mask : basis.sector(k)) CHECK(std::popcount(mask) == k);
    total += basis.sector(k).size();
  }
  CHECK(total == 32);
  CHECK(basis.sector(2).size() == 10);
  CHECK_THROWS_AS(FockBasis(15), CapExceeded);
  CHECK_THROWS_AS(FockBasis(7, 6), CapExceeded);
}

TEST_CASE("canonical anticommutation relations") {
  const int m = 4;
  const CMatrix id = CMatrix::Identity(16, 16);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const CMatrix ci = annihilation_operator(m, i), cj = annihilation_operator(m, j);
      const CMatrix cdj = creation_operator(m, j);
      CHECK((ci * cdj + cdj * ci - (i == j ? id : CMatrix::Zero(16, 16))).cwiseAbs().maxCoeff() == 0.0);
      CHECK((ci * cj + cj * ci).cwiseAbs().maxCoeff() == 0.0);
    }
  // one occupied mode below mode 2 flips the sign
  const CMatrix c2 = creation_operator(3, 2);
  CHECK(c2(0b101, 0b001) == Complex(-1.0, 0.0));
  CHECK(c2(0b100, 0b000) == Complex(1.0, 0.0));
  std::mt19937_64 rng(3);
  const CVector x = random_vector(m, rng), y = random_vector(m, rng);
  const CMatrix anti = annihilation_operator(y) * creation_operator(x) + creation_operator(x) * annihilation_operator(y);
  CHECK((anti - y.dot(x) * id).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("quasi-free densities") {
  RVector d(3);
  d << 0.2, 0.5, 0.7;
  const FockState diag = quasifree_density(d.cast<Complex>().asDiagonal(), 0.1);
  diag.validate();
  const CMatrix dense = diag.density.dense();
  for (std::uint32_t s = 0; s < 8; ++s) {
    double p = 1.0;
    for (int i = 0; i < 3; ++i) p *= (s >> i & 1u) ? d[i] : 1 - d[i];
    CHECK(dense(s, s).real() == doctest::Approx(p).epsilon(1e-14));
  }

  std::mt19937_64 rng(4);
  const int m = 5;
  const CMatrix q = random_density_matrix(m, rng);
  const FockState state = quasifree_density(q, 0.1);
  state.validate();
  CHECK(std::abs(state.density.trace() - 1.0) < 1e-12);
  // two-point function ω(c*(e_j) c(e_i)) = Q_ij
  const CMatrix rho = state.density.dense();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Complex v = (rho * creation_operator(m, j) * annihilation_operator(m, i)).trace();
      CHECK(std::abs(v - q(i, j)) < 1e-12);
    }
  CHECK_THROWS_AS(quasifree_density(CMatrix::Identity(2, 2) * 0.99, 0.1), NumericalError);
  CHECK_THROWS_AS(quasifree_density(CMatrix::Identity(9, 9) * 0.5, 0.1, 8), CapExceeded);
}

TEST_CASE("Wick rule") {
  std::mt19937_64 rng(5);
  const int m = 4;
  const CMatrix q = random_density_matrix(m, rng);
  const FockState state = quasifree_density(q, 0.1);
  for (auto [nc, na] : {std::pair{0, 0}, {1, 1}, {2, 2}, {3, 3}, {1, 0}, {2, 1}}) {
    Monomial mono;
    for (int i = 0; i < nc; ++i) mono.creations.push_back(random_vector(m, rng));
    for (int i = 0; i < na; ++i) mono.annihilations.push_back(random_vector(m, rng));
    const auto w = wick_check(state, q, mono);
    CHECK(w.residual < 1e-12);
    if (nc != na) CHECK(std::abs(w.value) < 1e-12);
  }
}

TEST_CASE("determinant formulas agree with the Fock space") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 8; ++trial) {
    const auto qs = testing::random_faithful_symbol(rng), rs = testing::random_faithful_symbol(rng);
    const int n = 1 + trial % 7;
    const auto pair = FiniteStatePair::from_symbols(qs, rs, n);
    const auto rho = quasifree_density(pair.q(), pair.eta());
    const auto sigma = quasifree_density(pair.r(), pair.eta());
    for (double t : {-0.5, 0.25, 0.5, 0.75, 1.5})
      CHECK(std::abs(psi_n(pair, t) - log_trace_power_product(rho, sigma, t)) < 1e-9);
    CHECK(std::abs(relative_entropy_n(pair) - relative_entropy(rho, sigma)) < 1e-9);
  }
}

TEST_CASE("Neyman-Pearson tests") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = quasifree_density(random_density_matrix(3, rng), 0.1);
    const auto sigma = quasifree_density(random_density_matrix(3, rng), 0.1);
    const double a = 0.1 * (trial - 5);
    const auto report = np_optimality_check(rho, sigma, a, 3.0, 40, rng);
    CHECK(report.pass);
    CHECK(report.worst_gap <= 1e-10);
    CHECK(report.closed_form_residual <= 1e-10);
    const auto direct = error_probabilities(rho, sigma, neyman_pearson_test(rho, sigma, a, 3.0));
    const auto blockwise = neyman_pearson_errors(rho, sigma, a, 3.0);
    CHECK(direct.alpha == doctest::Approx(blockwise.alpha).epsilon(1e-12));
    CHECK(direct.beta == doctest::Approx(blockwise.beta).epsilon(1e-12));
  }

  const auto same = quasifree_density(random_density_matrix(3, rng), 0.1);
  const auto tied = np_optimality_check(same, same, 0.0, 1.0, 10, rng);
  CHECK(tied.np_value == doctest::Approx(1.0).epsilon(1e-12));
  const auto trivial = error_probabilities(same, same, BinaryTest{CMatrix::Identity(8, 8)});
  CHECK(trivial.alpha == doctest::Approx(0.0));
  CHECK(trivial.beta == doctest::Approx(1.0));
}

TEST_CASE("exponent study for equal symbols") {
  const auto s = SymbolFunction::from_text("0.5+0.2*cos(x)", 1, 0.2);
  const int ns[] = {2, 4};
  for (const auto& row : exponent_convergence_study(s, s, 0.0, ns)) {
    CHECK(row.alpha + row.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.combined_exponent.has_value());
    CHECK(std::abs(*row.combined_exponent) < 1e-12);
    CHECK(std::abs(row.target_beta) < 1e-12);
  }
  const int too_big[] = {15};
  CHECK_THROWS_AS(exponent_convergence_study(s, s, 0.0, too_big), CapExceeded);
}

TEST_CASE("finite-size error exponents stay above the Chernoff bound") {
  // α + β ≤ e^{n ψ(t)} for every t, so -(1/n) log(α + β) ≥ C at each n.
  const auto q = SymbolFunction::constant(1, 0.5, 0.2);
  const auto r = SymbolFunction::constant(1, 0.25, 0.2);
  const double c = chernoff_bound(SampledPair(q, r)).value;
  const int ns[] = {2, 4, 6, 8};
  for (const auto& row : exponent_convergence_study(q, r, 0.0, ns)) {
    REQUIRE(row.combined_exponent.has_value());
    CHECK(*row.combined_exponent >= c - 1e-12);
  }
}

TEST_CASE("trace-scaled densities fail validation") {
  const auto state = quasifree_density(CMatrix::Identity(2, 2) * 0.3, 0.1);
  FockState bad = state;
  bad.density = state.density.scaled(0.99);
  CHECK_THROWS_AS(bad.validate(), NumericalError);
}
