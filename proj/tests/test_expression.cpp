#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fermitest/error.hpp"
#include "fermitest/expression.hpp"

using fermitest::DomainError;
using fermitest::Expression;
using fermitest::ParseError;

namespace {

double eval1(const std::string& text, double x) {
  const double p[] = {x};
  return Expression::parse(text, 1).evaluate(p);
}

/// Random well-formed expression text in ν variables.
std::string random_text(std::mt19937_64& rng, int nu, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  switch (pick(rng)) {
    case 0: return std::to_string(value(rng));
    case 1: return "x" + std::to_string(1 + rng() % nu);
    case 2: return "pi";
    case 3: return "-(" + random_text(rng, nu, depth - 1) + ")";
    case 4: return "(" + random_text(rng, nu, depth - 1) + " + " + random_text(rng, nu, depth - 1) + ")";
    case 5: return random_text(rng, nu, depth - 1) + " - " + random_text(rng, nu, depth - 1);
    case 6: return random_text(rng, nu, depth - 1) + "*" + random_text(rng, nu, depth - 1);
    case 7: return "cos(" + random_text(rng, nu, depth - 1) + ")";
    case 8: return "sin(" + random_text(rng, nu, depth - 1) + ")";
    default: return "exp(0.1*" + random_text(rng, nu, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("literal and substitution examples") {
  CHECK(eval1("0.5", 2.0) == 0.5);
  CHECK(eval1("0.5 + 0.25*cos(x)", 0.0) == 0.75);
  CHECK(eval1("0.5+0.25*cos(x1)", std::numbers::pi) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval1("pi", 0.0) == std::numbers::pi);
  CHECK(eval1("exp(0)", 0.0) == 1.0);
  CHECK(eval1("sin(x)", std::numbers::pi / 2) == 1.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(eval1("1+2*3", 0) == 7);
  CHECK(eval1("(1+2)*3", 0) == 9);
  CHECK(eval1("8/4/2", 0) == 1);
  CHECK(eval1("8-4-2", 0) == 2);
  CHECK(eval1("-2*3", 0) == -6);
  CHECK(eval1("2*-3", 0) == -6);
  CHECK(eval1(" 1 +\t2 ", 0) == 3);
  CHECK(eval1("1e-1*10", 0) == doctest::Approx(1.0));
}

TEST_CASE("multi-dimensional variables") {
  const auto e = Expression::parse("x1 - 2*x2 + x3", 3);
  const double p[] = {1.0, 2.0, 5.0};
  CHECK(e.evaluate(p) == 2.0);
  CHECK(e.dimension() == 3);
  CHECK_THROWS_AS(Expression::parse("x", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("x3", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("x0", 2), ParseError);
}

TEST_CASE("syntax errors carry offsets") {
  try {
    Expression::parse("cos(", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    Expression::parse("1 + tan(x)", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(Expression::parse("", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("1 2", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("(1", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("1)", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("--1", 1), ParseError);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(eval1("1/x", 0.0), DomainError);
  CHECK_THROWS_AS(eval1("exp(1000)", 0.0), DomainError);
}

TEST_CASE("printing and re-parsing preserves values") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> point(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const int nu = 1 + trial % 3;
    const auto text = random_text(rng, nu, 4);
    const auto e = Expression::parse(text, nu);
    const auto again = Expression::parse(e.to_string(), nu);
    CHECK(again.to_string() == e.to_string());
    for (int i = 0; i < 100; ++i) {
      double x[3] = {point(rng), point(rng), point(rng)};
      const std::span<const double> p(x, nu);
      CHECK(again.evaluate(p) == doctest::Approx(e.evaluate(p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("arbitrary bytes parse or fail cleanly") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "0123456789.e+-*/() xpicosinexp\t\n\x01\xff,;^";
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 24);
  int parsed = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) s += alphabet[ch(rng)];
    try {
      Expression::parse(s, 1);
      ++parsed;
    } catch (const ParseError& e) {
      CHECK(e.offset() <= s.size());
    }
  }
  CHECK(parsed > 0);
}
