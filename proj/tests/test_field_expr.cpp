#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sginf/errors.hpp"
#include "sginf/field_expr.hpp"

using namespace sginf;

namespace {

double at(const FieldExpr& f, std::vector<double> x) { return f(x); }

}  // namespace

TEST(FieldExpr, ExamplePotentials) {
  const auto v = FieldExpr::parse("0.5+1/(1+x^2)");
  EXPECT_DOUBLE_EQ(at(v, {0.0}), 1.5);
  EXPECT_DOUBLE_EQ(at(v, {2.0}), 0.5 + 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("0.3"), {4.0}), 0.3);
}

TEST(FieldExpr, Precedence) {
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("1+2*3"), {0}), 7.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("(1+2)*3"), {0}), 9.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("-2^2"), {0}), -4.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("2^3^2"), {0}), 512.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("8/4/2"), {0}), 1.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("1 - 2 - 3"), {0}), -4.0);
}

TEST(FieldExpr, VariablesAndFunctions) {
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("r2"), {3.0, 4.0}), 25.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("r"), {3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("y"), {3.0}), 0.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("exp(-x)*sqrt(4)"), {0.0}), 2.0);
  EXPECT_DOUBLE_EQ(at(FieldExpr::parse("1e-1*x"), {5.0}), 0.5);
}

TEST(FieldExpr, ErrorsReportColumn) {
  for (const char* bad : {"", "1+", "(1", "sin(x)", "2 3", "x^", "exp x"}) {
    try {
      FieldExpr::parse(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
    }
  }
}

TEST(FieldExpr, ConstantKeepsValue) {
  const auto c = FieldExpr::constant(0.1);
  EXPECT_EQ(at(c, {1.0}), 0.1);
  EXPECT_EQ(at(FieldExpr::parse(c.source()), {1.0}), 0.1);
}
