#pragma once

// Closed-form scalar fields for scenario files. Grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'x' | 'y' | 'r' | 'r2' | func '(' expr ')' | '(' expr ')'
//   func   := 'exp' | 'sqrt'
//
// x, y are the coordinates (y = 0 in one dimension), r = ||x||, r2 = ||x||^2.

#include <functional>
#include <span>
#include <string>

namespace sginf {

class FieldExpr {
 public:
  /// Throws InputError with the offending column on a syntax error.
  static FieldExpr parse(const std::string& source);
  static FieldExpr constant(double c);

  double operator()(std::span<const double> point) const { return eval_(point); }
  const std::string& source() const { return source_; }

 private:
  FieldExpr(std::string source, std::function<double(std::span<const double>)> eval)
      : source_(std::move(source)), eval_(std::move(eval)) {}

  std::string source_;
  std::function<double(std::span<const double>)> eval_;
};

}  // namespace sginf
