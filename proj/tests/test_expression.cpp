#include <doctest.h>

#include "starnet/expression.hpp"

#include <cmath>
#include <numbers>

using namespace starnet;

TEST_CASE("arithmetic and precedence") {
  CHECK(Expression("1 + 2 * 3")(0, 0, 0) == 7.0);
  CHECK(Expression("(1 + 2) * 3")(0, 0, 0) == 9.0);
  CHECK(Expression("2 ^ 3 ^ 2")(0, 0, 0) == 512.0);
  CHECK(Expression("-2 ^ 2")(0, 0, 0) == -4.0);
  CHECK(Expression("8 / 4 / 2")(0, 0, 0) == 1.0);
  CHECK(Expression("1 - 2 - 3")(0, 0, 0) == -4.0);
  CHECK(Expression("1.5e-1 * 2")(0, 0, 0) == doctest::Approx(0.3));
}

TEST_CASE("variables, constants and functions") {
  CHECK(Expression("t + x + l")(0.5, 0.5, 0.5) == 1.5);
  CHECK(Expression("sin(x)")(0, std::numbers::pi / 2, 0) == doctest::Approx(1.0));
  CHECK(Expression("cos(pi * x)")(0, 1.0, 0) == doctest::Approx(-1.0));
  CHECK(Expression("exp(1) - e")(0, 0, 0) == doctest::Approx(0.0));
  CHECK(Expression("cosh(x)^2 - sinh(x)^2")(0, 0.7, 0) == doctest::Approx(1.0));
  CHECK(Expression("sqrt(abs(-4)) + log(e)")(0, 0, 0) == doctest::Approx(3.0));
  CHECK(Expression("tanh(0) + tan(0)")(0, 0, 0) == 0.0);
}

TEST_CASE("variable dependence") {
  const Expression e("t * l + 2");
  CHECK(e.independent_of('x'));
  CHECK_FALSE(e.independent_of('t'));
  CHECK_FALSE(e.independent_of('l'));
}

TEST_CASE("malformed expressions are rejected") {
  CHECK_THROWS_AS(Expression("1 +"), ExpressionError);
  CHECK_THROWS_AS(Expression("foo(x)"), ExpressionError);
  CHECK_THROWS_AS(Expression("(1 + 2"), ExpressionError);
  CHECK_THROWS_AS(Expression("y"), ExpressionError);
  CHECK_THROWS_AS(Expression("1 2"), ExpressionError);
  CHECK_THROWS_AS(Expression(""), ExpressionError);
}

TEST_CASE("copies evaluate identically") {
  const Expression a("exp(-t) * cos(pi * x) * l^2");
  const Expression b = a;
  CHECK(a(0.3, 0.2, 0.9) == b(0.3, 0.2, 0.9));
  CHECK(a.source() == "exp(-t) * cos(pi * x) * l^2");
}
