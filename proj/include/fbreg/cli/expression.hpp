#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "fbreg/error.hpp"

namespace fbreg::cli {

/// E_SYNTAX with the 1-based column of the offending character.
class ExpressionError : public Error {
 public:
  ExpressionError(std::size_t column, const std::string& message);
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t column_;
  std::string detail_;
};

/// Compiled arithmetic expression over x, y (spatial) and t.
///
/// Grammar: numbers, the variables x y t, the constants pi and e, binary
/// + - * / ^ (^ binds tightest and groups to the right), unary minus,
/// parentheses, and the functions pos abs exp log sqrt sin cos of one
/// argument. Anything else is a syntax error carrying its column.
class Expression {
 public:
  Expression() = default;
  static Expression parse(std::string_view text);

  double operator()(double x, double y, double t) const;
  const std::string& text() const noexcept { return text_; }
  bool empty() const noexcept { return root_ == nullptr; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fbreg::cli
