#include "sve/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "sve/error.hpp"

namespace sve {

struct Expression::Node {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call1, Call2 };
  Op op = Op::Const;
  double value = 0.0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x;
      case Op::Neg: return -args[0]->eval(x);
      case Op::Add: return args[0]->eval(x) + args[1]->eval(x);
      case Op::Sub: return args[0]->eval(x) - args[1]->eval(x);
      case Op::Mul: return args[0]->eval(x) * args[1]->eval(x);
      case Op::Div: return args[0]->eval(x) / args[1]->eval(x);
      case Op::Pow: return std::pow(args[0]->eval(x), args[1]->eval(x));
      case Op::Call1: return fn1(args[0]->eval(x));
      case Op::Call2: return fn2(args[0]->eval(x), args[1]->eval(x));
    }
    return std::nan("");
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr constant(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

double fmin2(double a, double b) { return std::fmin(a, b); }
double fmax2(double a, double b) { return std::fmax(a, b); }
double fpow2(double a, double b) { return std::pow(a, b); }

struct Unary {
  std::string_view name;
  double (*fn)(double);
};

const Unary kUnary[] = {
    {"exp", [](double v) { return std::exp(v); }},
    {"log", [](double v) { return std::log(v); }},
    {"sqrt", [](double v) { return std::sqrt(v); }},
    {"abs", [](double v) { return std::abs(v); }},
    {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},
    {"tan", [](double v) { return std::tan(v); }},
    {"sinh", [](double v) { return std::sinh(v); }},
    {"cosh", [](double v) { return std::cosh(v); }},
    {"tanh", [](double v) { return std::tanh(v); }},
};

class Parser {
 public:
  Parser(std::string_view text, std::string_view var) : s_(text), var_(var) {}

  NodePtr parse() {
    auto root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::Configuration, "cannot parse expression '" + std::string(s_) +
                                              "' at offset " + std::to_string(pos_) + ": " +
                                              why);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Op::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Op::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == var_) return make(Op::Var);
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);
    for (const auto& u : kUnary) {
      if (u.name == name) {
        expect('(');
        auto arg = expr();
        expect(')');
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Call1;
        n->fn1 = u.fn;
        n->args = {arg};
        return n;
      }
    }
    double (*fn2)(double, double) = nullptr;
    if (name == "min") fn2 = fmin2;
    if (name == "max") fn2 = fmax2;
    if (name == "pow") fn2 = fpow2;
    if (fn2) {
      expect('(');
      auto a = expr();
      expect(',');
      auto b = expr();
      expect(')');
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call2;
      n->fn2 = fn2;
      n->args = {a, b};
      return n;
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view s_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, std::string_view variable) {
  Parser p(text, variable);
  return Expression(p.parse(), std::string(text));
}

double Expression::operator()(double x) const { return root_->eval(x); }

}  // namespace sve
