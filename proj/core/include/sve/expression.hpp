#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace sve {

/// A parsed arithmetic expression in one variable, used for user-supplied
/// coefficient functions.
///
/// Grammar: numbers, the variable, `pi`, `e`, binary `+ - * / ^` (with `^`
/// right-associative), unary minus, parentheses, and the functions exp, log,
/// sqrt, abs, sin, cos, tan, sinh, cosh, tanh, plus two-argument min, max and
/// pow. Parse failures throw `Error` of kind Configuration.
class Expression {
 public:
  static Expression parse(std::string_view text, std::string_view variable = "x");

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace sve
