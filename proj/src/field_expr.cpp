#include "sginf/field_expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>

#include "sginf/errors.hpp"

namespace sginf {

namespace {

using Eval = std::function<double(std::span<const double>)>;

double coord(std::span<const double> p, std::size_t i) { return i < p.size() ? p[i] : 0.0; }

double radius2(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return s;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  Eval parse() {
    Eval e = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "field expression \"" << src_ << "\": " << msg << " at column " << pos_ + 1;
    throw InputError(os.str());
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Eval expr() {
    Eval lhs = term();
    while (true) {
      if (accept('+')) {
        Eval rhs = term();
        lhs = [lhs, rhs](std::span<const double> p) { return lhs(p) + rhs(p); };
      } else if (accept('-')) {
        Eval rhs = term();
        lhs = [lhs, rhs](std::span<const double> p) { return lhs(p) - rhs(p); };
      } else {
        return lhs;
      }
    }
  }

  Eval term() {
    Eval lhs = unary();
    while (true) {
      if (accept('*')) {
        Eval rhs = unary();
        lhs = [lhs, rhs](std::span<const double> p) { return lhs(p) * rhs(p); };
      } else if (accept('/')) {
        Eval rhs = unary();
        lhs = [lhs, rhs](std::span<const double> p) { return lhs(p) / rhs(p); };
      } else {
        return lhs;
      }
    }
  }

  Eval unary() {
    if (accept('-')) {
      Eval inner = unary();
      return [inner](std::span<const double> p) { return -inner(p); };
    }
    return power();
  }

  Eval power() {
    Eval base = atom();
    if (accept('^')) {
      Eval exponent = unary();
      return [base, exponent](std::span<const double> p) { return std::pow(base(p), exponent(p)); };
    }
    return base;
  }

  Eval atom() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      Eval inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(src_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return [v](std::span<const double>) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "x") return [](std::span<const double> p) { return coord(p, 0); };
      if (name == "y") return [](std::span<const double> p) { return coord(p, 1); };
      if (name == "r2") return [](std::span<const double> p) { return radius2(p); };
      if (name == "r") return [](std::span<const double> p) { return std::sqrt(radius2(p)); };
      if (name == "exp" || name == "sqrt") {
        if (!accept('(')) fail("expected '(' after " + name);
        Eval inner = expr();
        if (!accept(')')) fail("expected ')'");
        if (name == "exp") return [inner](std::span<const double> p) { return std::exp(inner(p)); };
        return [inner](std::span<const double> p) { return std::sqrt(inner(p)); };
      }
      pos_ = start;
      fail("unknown identifier \"" + name + "\"");
    }
    fail("unexpected character");
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

}  // namespace

FieldExpr FieldExpr::parse(const std::string& source) {
  Parser parser(source);
  return FieldExpr(source, parser.parse());
}

FieldExpr FieldExpr::constant(double c) {
  std::ostringstream os;
  os.precision(17);
  os << c;
  return FieldExpr(os.str(), [c](std::span<const double>) { return c; });
}

}  // namespace sginf
