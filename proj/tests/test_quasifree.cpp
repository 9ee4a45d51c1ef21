#include <doctest.h>

#include <cmath>
#include <random>

#include "fermitest/error.hpp"
#include "fermitest/quasifree.hpp"
#include "random_symbols.hpp"

using namespace fermitest;

namespace {

/// log Tr ρ^t σ^{1-t} = t log det(I-Q) + (1-t) log det(I-R)
///                      + log det(I + K^t L^{1-t}), K = Q/(I-Q), L = R/(I-R),
/// evaluated with general (non-Hermitian) determinants.
double psi_by_determinants(const CMatrix& q, const CMatrix& r, double t) {
  const auto n = q.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const auto power = [](const CMatrix& m, double s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    RVector v = es.eigenvalues();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::pow(v[i] / (1 - v[i]), s);
    return CMatrix(es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const Complex d = (id + power(q, t) * power(r, 1 - t)).determinant();
  return t * std::log((id - q).determinant().real()) + (1 - t) * std::log((id - r).determinant().real()) +
         std::log(d.real());
}

double classical_psi(double q, double r, double t) {
  return std::log(std::pow(q, t) * std::pow(r, 1 - t) + std::pow(1 - q, t) * std::pow(1 - r, 1 - t));
}

FiniteStatePair constants(double q, double r, int n) {
  return FiniteStatePair::from_symbols(SymbolFunction::constant(1, q, 0.1),
                                       SymbolFunction::constant(1, r, 0.1), n);
}

}  // namespace

TEST_CASE("equal states") {
  const auto s = SymbolFunction::from_text("0.5+0.25*cos(x)", 1, 0.2);
  const auto pair = FiniteStatePair::from_symbols(s, s, 6);
  CHECK(std::abs(psi_n(pair, 0.37)) < 1e-10);
  CHECK(std::abs(relative_entropy_n(pair)) < 1e-10);
  CHECK(std::abs(psi_n_derivative(pair, 0.3)) < 1e-6);
}

TEST_CASE("commuting constant symbols reduce to the classical formula") {
  const auto pair = constants(0.5, 0.25, 4);
  const double expected = 4 * std::log(std::sqrt(0.125) + std::sqrt(0.375));
  CHECK(expected == doctest::Approx(-0.13867292839014816).epsilon(1e-15));
  CHECK(psi_n(pair, 0.5) == doctest::Approx(expected).epsilon(1e-13));
  for (double t : {-0.5, 0.2, 0.9, 1.7})
    CHECK(psi_n(pair, t) == doctest::Approx(4 * classical_psi(0.5, 0.25, t)).epsilon(1e-12));
  const auto one = constants(0.5, 0.25, 1);
  const double kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(relative_entropy_n(one) == doctest::Approx(kl).epsilon(1e-14));
  CHECK(kl == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(psi_n_derivative(one, 1.0) == doctest::Approx(kl).epsilon(1e-6));
}

TEST_CASE("matches the general determinant identity for non-commuting pairs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = testing::random_faithful_symbol(rng);
    const auto r = testing::random_faithful_symbol(rng);
    const auto pair = FiniteStatePair::from_symbols(q, r, 5 + trial);
    for (double t : {-0.5, 0.25, 0.5, 0.75, 1.5})
      CHECK(psi_n(pair, t) == doctest::Approx(psi_by_determinants(pair.q(), pair.r(), t)).epsilon(1e-11));
  }
}

TEST_CASE("endpoint, derivative and convexity properties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int nu = 1 + trial % 2;
    const auto q = testing::random_faithful_symbol(rng, nu);
    const auto r = testing::random_faithful_symbol(rng, nu);
    const auto pair = FiniteStatePair::from_symbols(q, r, nu == 1 ? 12 : 4);
    CHECK(std::abs(psi_n(pair, 1.0)) < 1e-10);
    CHECK(std::abs(psi_n(pair, 0.0)) < 1e-10);
    const double s = relative_entropy_n(pair);
    CHECK(s > 0.0);
    CHECK(std::abs(psi_n_derivative(pair, 1.0) - s) < 1e-6);
    std::vector<double> psi;
    for (int i = 0; i <= 60; ++i) psi.push_back(psi_n(pair, -1.0 + 0.05 * i));
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) CHECK(psi[i + 1] - 2 * psi[i] + psi[i - 1] >= -1e-9);
  }
}

TEST_CASE("relative entropy vanishes only for equal matrices") {
  const auto q = SymbolFunction::from_text("0.5+0.2*cos(x)", 1, 0.2);
  const auto r = SymbolFunction::from_text("0.5+0.2*cos(x)+0.001*sin(x)", 1, 0.2);
  const auto pair = FiniteStatePair::from_symbols(q, r, 10);
  CHECK(relative_entropy_n(pair) > 1e-8);
  CHECK((pair.q() - pair.r()).norm() > 1e-8);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(FiniteStatePair(CMatrix::Identity(2, 2) * 0.5, CMatrix::Identity(3, 3) * 0.5, 0.1),
                  DomainError);
  CHECK_THROWS_AS(FiniteStatePair(CMatrix::Identity(2, 2) * 0.95, CMatrix::Identity(2, 2) * 0.5, 0.1),
                  NumericalError);
  CHECK_THROWS_AS(psi_n_derivative(constants(0.5, 0.25, 2), 1.0, 1e-2), DomainError);
  CHECK_THROWS_AS(FiniteStatePair::from_symbols(SymbolFunction::constant(1, 0.5, 0.1),
                                                SymbolFunction::constant(2, 0.5, 0.1), 2),
                  DomainError);
}
