#pragma once

// Real-valued expressions in one or two variables: recursive-descent parser,
// tree-walking evaluator, and symbolic differentiation with constant folding.
//
// Grammar:
//   expr   := term (("+"|"-") term)* ;
//   term   := factor (("*"|"/") factor)* ;
//   factor := "-" factor | power ;
//   power  := atom ("^" factor)? ;
//   atom   := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")" ;
//
// `pi` and `e` are reserved constant names.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "invint/error.hpp"
#include "invint/format.hpp"

namespace invint {

enum class BinaryOp { add, sub, mul, div, pow };

enum class Func { exp, log, sqrt, sin, cos, tan, atan, sinh, cosh, tanh, abs };

namespace detail {

inline constexpr std::array<std::pair<std::string_view, Func>, 11> kFuncNames{{
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"atan", Func::atan},
    {"sinh", Func::sinh},
    {"cosh", Func::cosh},
    {"tanh", Func::tanh},
    {"abs", Func::abs},
}};

inline std::optional<Func> lookup_func(std::string_view name) {
  for (const auto& [n, f] : kFuncNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

inline std::optional<double> lookup_constant(std::string_view name) {
  if (name == "pi") return std::numbers::pi;
  if (name == "e") return std::numbers::e;
  return std::nullopt;
}

}  // namespace detail

inline std::string_view func_name(Func f) {
  for (const auto& [n, g] : detail::kFuncNames) {
    if (g == f) return n;
  }
  return "?";
}

inline char op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value;
};

// `index` is the position of `name` in the owning expression's variable list.
struct Variable {
  std::size_t index;
  std::string name;
};

struct Negate {
  NodePtr operand;
};

struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Apply {
  Func fn;
  NodePtr arg;
};

struct Node {
  std::variant<Constant, Variable, Negate, Binary, Apply> v;
};

namespace detail {

inline double checked(double value, std::string_view what) {
  if (!std::isfinite(value)) {
    throw DomainError("non-finite result in " + std::string(what));
  }
  return value;
}

inline double integer_power(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) throw DomainError("zero raised to a negative power");
  auto n = static_cast<unsigned long long>(std::fabs(exponent));
  double result = 1.0;
  double b = base;
  while (n != 0) {
    if (n & 1ULL) result *= b;
    b *= b;
    n >>= 1U;
  }
  return exponent < 0.0 ? 1.0 / result : result;
}

inline double power(double base, double exponent) {
  if (exponent == std::trunc(exponent) && std::fabs(exponent) < 0x1p53) {
    return checked(integer_power(base, exponent), "^");
  }
  if (base > 0.0) return checked(std::pow(base, exponent), "^");
  if (base == 0.0 && exponent > 0.0) return 0.0;
  throw DomainError("non-integer power of non-positive base " + format_real(base));
}

inline double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return checked(a + b, "+");
    case BinaryOp::sub: return checked(a - b, "-");
    case BinaryOp::mul: return checked(a * b, "*");
    case BinaryOp::div:
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "/");
    case BinaryOp::pow: return power(a, b);
  }
  throw DomainError("unknown operator");
}

inline double apply_func(Func f, double a) {
  switch (f) {
    case Func::exp: return checked(std::exp(a), "exp");
    case Func::log:
      if (a <= 0.0) throw DomainError("log of non-positive value " + format_real(a));
      return checked(std::log(a), "log");
    case Func::sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value " + format_real(a));
      return std::sqrt(a);
    case Func::sin: return checked(std::sin(a), "sin");
    case Func::cos: return checked(std::cos(a), "cos");
    case Func::tan: return checked(std::tan(a), "tan");
    case Func::atan: return checked(std::atan(a), "atan");
    case Func::sinh: return checked(std::sinh(a), "sinh");
    case Func::cosh: return checked(std::cosh(a), "cosh");
    case Func::tanh: return checked(std::tanh(a), "tanh");
    case Func::abs: return std::fabs(a);
  }
  throw DomainError("unknown function");
}

inline double eval_node(const Node& node, std::span<const double> values) {
  struct Visitor {
    std::span<const double> values;
    double operator()(const Constant& c) const { return c.value; }
    double operator()(const Variable& v) const {
      if (v.index >= values.size()) throw UnboundVariable(v.name);
      return values[v.index];
    }
    double operator()(const Negate& n) const { return -eval_node(*n.operand, values); }
    double operator()(const Binary& b) const {
      return apply_binary(b.op, eval_node(*b.lhs, values), eval_node(*b.rhs, values));
    }
    double operator()(const Apply& a) const {
      return apply_func(a.fn, eval_node(*a.arg, values));
    }
  };
  return std::visit(Visitor{values}, node.v);
}

inline void print_node(const Node& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (n.value < 0.0 || std::signbit(n.value)) {
            out += "(" + format_real(n.value) + ")";
          } else {
            out += format_real(n.value);
          }
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(-";
          print_node(*n.operand, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          out += "(";
          print_node(*n.lhs, out);
          out += ' ';
          out += op_symbol(n.op);
          out += ' ';
          print_node(*n.rhs, out);
          out += ")";
        } else {
          out += func_name(n.fn);
          out += "(";
          print_node(*n.arg, out);
          out += ")";
        }
      },
      node.v);
}

}  // namespace detail

// Immutable parsed expression together with its declared variable list.
// Copies share the tree.
class Expression {
 public:
  Expression(NodePtr root, std::vector<std::string> variables)
      : root_(std::move(root)), variables_(std::move(variables)) {}

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

  double evaluate(std::span<const double> values) const {
    if (values.size() < variables_.size()) throw UnboundVariable(variables_[values.size()]);
    return detail::eval_node(*root_, values);
  }

  double operator()(double x) const {
    const std::array<double, 1> v{x};
    return evaluate(std::span<const double>(v.data(), std::min<std::size_t>(1, variables_.size())));
  }

  double operator()(double a, double b) const {
    const std::array<double, 2> v{a, b};
    return evaluate(std::span<const double>(v.data(), std::min<std::size_t>(2, variables_.size())));
  }

  std::string to_string() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i] == name) return i;
    }
    return std::nullopt;
  }

 private:
  NodePtr root_;
  std::vector<std::string> variables_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  NodePtr parse() {
    NodePtr result = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw ParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "', expected operator or end of input");
    }
    return result;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        NodePtr rhs = term();
        lhs = make(Binary{BinaryOp::add, lhs, std::move(rhs)});
      } else if (accept('-')) {
        NodePtr rhs = term();
        lhs = make(Binary{BinaryOp::sub, lhs, std::move(rhs)});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        NodePtr rhs = factor();
        lhs = make(Binary{BinaryOp::mul, lhs, std::move(rhs)});
      } else if (accept('/')) {
        NodePtr rhs = factor();
        lhs = make(Binary{BinaryOp::div, lhs, std::move(rhs)});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return make(Negate{factor()});
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) {
      NodePtr exponent = factor();
      return make(Binary{BinaryOp::pow, base, std::move(exponent)});
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input, expected number, name or '('");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) throw ParseError(position(), "expected ')'");
      return inner;
    }
    throw ParseError(pos_, "unexpected '" + std::string(1, c) + "', expected number, name or '('");
  }

  std::size_t position() {
    skip_ws();
    return pos_;
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    }
    if (end == start + 1 && text_[start] == '.') throw ParseError(start, "malformed number");
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        while (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) ++exp_end;
        end = exp_end;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) throw ParseError(start, "malformed number");
    pos_ = end;
    return make(Constant{value});
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = text_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      auto fn = lookup_func(id);
      if (!fn) throw ParseError(start, "unknown function '" + std::string(id) + "'");
      ++pos_;
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError(position(), "expected ')' to close call of " + std::string(id));
      return make(Apply{*fn, arg});
    }
    if (auto c = lookup_constant(id)) return make(Constant{*c});
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i] == id) return make(Variable{i, std::string(id)});
    }
    if (lookup_func(id)) throw ParseError(pos_, "expected '(' after function name '" + std::string(id) + "'");
    throw UnknownVariable(start, std::string(id));
  }

  template <class T>
  static NodePtr make(T node) {
    return std::make_shared<const Node>(Node{std::move(node)});
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses `text` with the given variable set. Throws ParseError on malformed
// input and UnknownVariable for names outside `variables`.
inline Expression parse(std::string_view text, std::vector<std::string> variables) {
  for (const auto& v : variables) {
    if (detail::lookup_constant(v) || detail::lookup_func(v)) {
      throw ParseError(0, "'" + v + "' is reserved and cannot be a variable");
    }
  }
  NodePtr root = detail::Parser(text, variables).parse();
  return Expression(std::move(root), std::move(variables));
}

inline double evaluate(const Expression& e, const std::map<std::string, double, std::less<>>& bindings) {
  std::vector<double> values;
  values.reserve(e.variables().size());
  for (const auto& name : e.variables()) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw UnboundVariable(name);
    values.push_back(it->second);
  }
  return e.evaluate(values);
}

inline std::string print(const Expression& e) { return e.to_string(); }

namespace detail {

inline const Constant* as_constant(const NodePtr& n) { return std::get_if<Constant>(&n->v); }

inline bool is_value(const NodePtr& n, double v) {
  const Constant* c = as_constant(n);
  return c != nullptr && c->value == v;
}

inline NodePtr constant(double v) { return std::make_shared<const Node>(Node{Constant{v}}); }

inline NodePtr negate(NodePtr a) {
  if (const Constant* c = as_constant(a)) return constant(-c->value);
  if (const Negate* n = std::get_if<Negate>(&a->v)) return n->operand;
  return std::make_shared<const Node>(Node{Negate{std::move(a)}});
}

// Builds a binary node, folding constant operands and dropping neutral
// elements (0 for +/-, 1 for * and /, exponents 0 and 1).
inline NodePtr binary(BinaryOp op, NodePtr a, NodePtr b) {
  const Constant* ca = as_constant(a);
  const Constant* cb = as_constant(b);
  if (ca != nullptr && cb != nullptr) {
    try {
      return constant(apply_binary(op, ca->value, cb->value));
    } catch (const DomainError&) {
      // leave unfolded; the error resurfaces at evaluation time
    }
  }
  switch (op) {
    case BinaryOp::add:
      if (is_value(a, 0.0)) return b;
      if (is_value(b, 0.0)) return a;
      break;
    case BinaryOp::sub:
      if (is_value(b, 0.0)) return a;
      if (is_value(a, 0.0)) return negate(std::move(b));
      break;
    case BinaryOp::mul:
      if (is_value(a, 0.0) || is_value(b, 0.0)) return constant(0.0);
      if (is_value(a, 1.0)) return b;
      if (is_value(b, 1.0)) return a;
      break;
    case BinaryOp::div:
      if (is_value(a, 0.0) && !is_value(b, 0.0)) return constant(0.0);
      if (is_value(b, 1.0)) return a;
      break;
    case BinaryOp::pow:
      if (is_value(b, 0.0)) return constant(1.0);
      if (is_value(b, 1.0)) return a;
      break;
  }
  return std::make_shared<const Node>(Node{Binary{op, std::move(a), std::move(b)}});
}

inline NodePtr apply(Func fn, NodePtr a) {
  if (const Constant* c = as_constant(a)) {
    try {
      return constant(apply_func(fn, c->value));
    } catch (const DomainError&) {
    }
  }
  return std::make_shared<const Node>(Node{Apply{fn, std::move(a)}});
}

inline NodePtr add(NodePtr a, NodePtr b) { return binary(BinaryOp::add, std::move(a), std::move(b)); }
inline NodePtr sub(NodePtr a, NodePtr b) { return binary(BinaryOp::sub, std::move(a), std::move(b)); }
inline NodePtr mul(NodePtr a, NodePtr b) { return binary(BinaryOp::mul, std::move(a), std::move(b)); }
inline NodePtr div(NodePtr a, NodePtr b) { return binary(BinaryOp::div, std::move(a), std::move(b)); }
inline NodePtr pow(NodePtr a, NodePtr b) { return binary(BinaryOp::pow, std::move(a), std::move(b)); }

inline NodePtr derive(const NodePtr& node, std::size_t var) {
  struct Visitor {
    const NodePtr& self;
    std::size_t var;

    NodePtr operator()(const Constant&) const { return constant(0.0); }
    NodePtr operator()(const Variable& v) const { return constant(v.index == var ? 1.0 : 0.0); }
    NodePtr operator()(const Negate& n) const { return negate(derive(n.operand, var)); }

    NodePtr operator()(const Binary& b) const {
      NodePtr du = derive(b.lhs, var);
      NodePtr dv = derive(b.rhs, var);
      switch (b.op) {
        case BinaryOp::add: return add(du, dv);
        case BinaryOp::sub: return sub(du, dv);
        case BinaryOp::mul: return add(mul(du, b.rhs), mul(b.lhs, dv));
        case BinaryOp::div: return div(sub(mul(du, b.rhs), mul(b.lhs, dv)), pow(b.rhs, constant(2.0)));
        case BinaryOp::pow:
          if (is_value(dv, 0.0)) {
            // d(u^k) = k u^(k-1) du
            return mul(mul(b.rhs, pow(b.lhs, sub(b.rhs, constant(1.0)))), du);
          }
          // d(u^v) = u^v (v' log u + v u'/u)
          return mul(self, add(mul(dv, apply(Func::log, b.lhs)), div(mul(b.rhs, du), b.lhs)));
      }
      return constant(0.0);
    }

    NodePtr operator()(const Apply& a) const {
      NodePtr du = derive(a.arg, var);
      if (is_value(du, 0.0)) return constant(0.0);
      const NodePtr& u = a.arg;
      NodePtr outer;
      switch (a.fn) {
        case Func::exp: outer = self; break;
        case Func::log: return div(du, u);
        case Func::sqrt: return div(du, mul(constant(2.0), self));
        case Func::sin: outer = apply(Func::cos, u); break;
        case Func::cos: outer = negate(apply(Func::sin, u)); break;
        case Func::tan: return div(du, pow(apply(Func::cos, u), constant(2.0)));
        case Func::atan: return div(du, add(constant(1.0), pow(u, constant(2.0))));
        case Func::sinh: outer = apply(Func::cosh, u); break;
        case Func::cosh: outer = apply(Func::sinh, u); break;
        case Func::tanh: outer = sub(constant(1.0), pow(self, constant(2.0))); break;
        case Func::abs: outer = div(u, self); break;
      }
      return mul(outer, du);
    }
  };
  return std::visit(Visitor{node, var}, node->v);
}

}  // namespace detail

// Symbolic derivative with respect to `var`. Differentiating with respect to a
// name outside the expression's variable list yields the constant 0.
inline Expression differentiate(const Expression& e, std::string_view var) {
  auto index = e.index_of(var);
  if (!index) return Expression(detail::constant(0.0), e.variables());
  return Expression(detail::derive(e.root_ptr(), *index), e.variables());
}

}  // namespace invint
