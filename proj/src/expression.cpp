#include "fermitest/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "fermitest/error.hpp"

namespace fermitest {

struct Expression::Node {
  enum class Kind { number, variable, negate, add, subtract, multiply, divide,
                    cos, sin, exp };
  Kind kind;
  double value = 0.0;  // number
  int variable = 0;    // zero-based
  std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(Node::Kind kind, double value, int variable = 0) {
  return std::make_shared<const Node>(Node{kind, value, variable, {}});
}

NodePtr make_node(Node::Kind kind, std::vector<NodePtr> children) {
  return std::make_shared<const Node>(Node{kind, 0.0, 0, std::move(children)});
}

class Parser {
 public:
  Parser(std::string_view text, int nu) : text_(text), nu_(nu) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size())
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_node(Node::Kind::add, {lhs, term()});
      else if (accept('-'))
        lhs = make_node(Node::Kind::subtract, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = make_node(Node::Kind::multiply, {lhs, factor()});
      else if (accept('/'))
        lhs = make_node(Node::Kind::divide, {lhs, factor()});
      else
        return lhs;
    }
  }

  NodePtr factor() {
    if (accept('-')) return make_node(Node::Kind::negate, {atom()});
    return atom();
  }

  NodePtr atom() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || !std::isfinite(value))
      throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_leaf(Node::Kind::number, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name == "pi") return make_leaf(Node::Kind::number, std::numbers::pi);
    if (name == "cos" || name == "sin" || name == "exp") {
      if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      const auto kind = name == "cos"   ? Node::Kind::cos
                        : name == "sin" ? Node::Kind::sin
                                        : Node::Kind::exp;
      return make_node(kind, {arg});
    }
    if (name == "x") {
      if (nu_ != 1)
        throw ParseError("bare 'x' is only valid for dimension 1", start);
      return make_leaf(Node::Kind::variable, 0.0, 0);
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || ptr != name.data() + name.size() || index < 1 ||
          index > nu_)
        throw ParseError("variable " + std::string(name) +
                             " out of range for dimension " + std::to_string(nu_),
                         start);
      return make_leaf(Node::Kind::variable, 0.0, index - 1);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int nu_;
  std::size_t pos_ = 0;
};

double checked(double v) {
  if (!std::isfinite(v)) throw DomainError("expression produced a non-finite value");
  return v;
}

double eval(const Node& node, std::span<const double> x) {
  using K = Node::Kind;
  switch (node.kind) {
    case K::number:
      return node.value;
    case K::variable:
      return x[static_cast<std::size_t>(node.variable)];
    case K::negate:
      return -eval(*node.children[0], x);
    case K::add:
      return checked(eval(*node.children[0], x) + eval(*node.children[1], x));
    case K::subtract:
      return checked(eval(*node.children[0], x) - eval(*node.children[1], x));
    case K::multiply:
      return checked(eval(*node.children[0], x) * eval(*node.children[1], x));
    case K::divide: {
      const double num = eval(*node.children[0], x);
      const double den = eval(*node.children[1], x);
      if (den == 0.0) throw DomainError("division by zero in expression");
      return checked(num / den);
    }
    case K::cos:
      return std::cos(eval(*node.children[0], x));
    case K::sin:
      return std::sin(eval(*node.children[0], x));
    case K::exp:
      return checked(std::exp(eval(*node.children[0], x)));
  }
  return 0.0;
}

void print(const Node& node, std::string& out) {
  using K = Node::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    print(*node.children[0], out);
    out += op;
    print(*node.children[1], out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print(*node.children[0], out);
    out += ')';
  };
  switch (node.kind) {
    case K::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", node.value);
      out += buf;
      break;
    }
    case K::variable:
      out += 'x';
      out += std::to_string(node.variable + 1);
      break;
    case K::negate:
      out += "(-(";
      print(*node.children[0], out);
      out += "))";
      break;
    case K::add: binary("+"); break;
    case K::subtract: binary("-"); break;
    case K::multiply: binary("*"); break;
    case K::divide: binary("/"); break;
    case K::cos: call("cos"); break;
    case K::sin: call("sin"); break;
    case K::exp: call("exp"); break;
  }
}

}  // namespace

Expression Expression::parse(std::string_view text, int nu) {
  if (nu < 1) throw DomainError("dimension must be a positive integer");
  return Expression(Parser(text, nu).parse(), nu);
}

Expression Expression::constant(double value, int nu) {
  if (nu < 1) throw DomainError("dimension must be a positive integer");
  return Expression(make_leaf(Node::Kind::number, value), nu);
}

double Expression::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != nu_)
    throw DomainError("point dimension does not match expression dimension");
  return eval(*root_, x);
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

}  // namespace fermitest
