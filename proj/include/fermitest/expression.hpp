#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace fermitest {

/// Immutable expression tree over the torus variables x1..xν.
///
/// Grammar (whitespace insignificant, left associative):
///
///     expr   := term (('+' | '-') term)*
///     term   := factor (('*' | '/') factor)*
///     factor := ['-'] atom
///     atom   := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
///     func   := 'cos' | 'sin' | 'exp'
///
/// Variables are `x1`..`xν`; for ν = 1 the bare `x` is accepted as `x1`.
class Expression {
 public:
  /// Throws ParseError carrying the byte offset of the first problem.
  static Expression parse(std::string_view text, int nu);

  /// Constant tree.
  static Expression constant(double value, int nu);

  /// Value at x (size ν). Throws DomainError on division by zero or a
  /// non-finite intermediate.
  double evaluate(std::span<const double> x) const;

  /// Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  int dimension() const noexcept { return nu_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, int nu)
      : root_(std::move(root)), nu_(nu) {}

  std::shared_ptr<const Node> root_;
  int nu_;
};

}  // namespace fermitest
