#include "doctest.h"

#include "maslov/errors.hpp"
#include "maslov/expr.hpp"
#include "maslov/field.hpp"

using namespace maslov;

TEST_SUITE("expr") {

TEST_CASE("precedence and associativity") {
  const PhasePoint z{2.0, 3.0};
  CHECK(eval_field(parse_field("q1 + p1 * 2", 1), z) == doctest::Approx(8.0));
  CHECK(eval_field(parse_field("-q1^2", 1), z) == doctest::Approx(-4.0));
  CHECK(eval_field(parse_field("q1^p1^0", 1), z) == doctest::Approx(2.0));  // 2^(3^0)
  CHECK(eval_field(parse_field("2^3^2", 1), z) == doctest::Approx(512.0));
  CHECK(eval_field(parse_field("q1 - p1 - 1", 1), z) == doctest::Approx(-2.0));
  CHECK(eval_field(parse_field("q1 / p1 / 2", 1), z) == doctest::Approx(1.0 / 3.0));
  CHECK(eval_field(parse_field("q1^-1", 1), z) == doctest::Approx(0.5));
}

TEST_CASE("functions and parameters") {
  const PhasePoint z{0.5, 0.25};
  const ParameterMap k{{"k", 3.0}};
  CHECK(eval_field(parse_field("sin(q1) + cos(p1) + exp(q1) + log(p1) + sqrt(p1)", 1), z) ==
        doctest::Approx(std::sin(0.5) + std::cos(0.25) + std::exp(0.5) + std::log(0.25) + 0.5));
  CHECK(eval_field(parse_field("k*q1", 1, k), z) == doctest::Approx(1.5));
}

TEST_CASE("coordinates follow the freedom count") {
  const PhasePoint z{1.0, 2.0, 3.0, 4.0};
  CHECK(eval_field(parse_field("q2 * p1", 2), z) == doctest::Approx(6.0));
  CHECK_THROWS_AS(parse_field("q3", 2), ParseError);
  CHECK_THROWS_AS(parse_field("q0", 2), ParseError);
}

TEST_CASE("malformed input reports a position") {
  try {
    parse_field("q1 + * p1", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_field("(q1 + p1", 1), ParseError);
  CHECK_THROWS_AS(parse_field("sin(q1, p1)", 1), ParseError);
  CHECK_THROWS_AS(parse_field("foo(q1)", 1), ParseError);
  CHECK_THROWS_AS(parse_field("x + q1", 1), ParseError);
  CHECK_THROWS_AS(parse_field("", 1), ParseError);
  CHECK_THROWS_AS(parse_field("q1 p1", 1), ParseError);
}

TEST_CASE("printing round-trips") {
  const char* sources[] = {"p1^2/2 + p2*q1^2/2 - 0.1*q1", "-(q1 - p2)^3", "sin(q1)*exp(-p1^2)", "q1^p1^2",
                           "1e-3*q2 - -p1"};
  for (const char* s : sources) {
    const Expr e = parse_expression(s, 2);
    const Expr back = parse_expression(to_string(e), 2);
    CHECK(structurally_equal(e, back));
    CHECK(to_string(back) == to_string(e));
  }
}

TEST_CASE("constant folding helpers") {
  const Expr c = parse_expression("2*3 + 1", 1);
  CHECK(is_constant(c));
  CHECK(constant_value(c) == doctest::Approx(7.0));
  CHECK_FALSE(is_constant(parse_expression("q1 + 1", 1)));
}

TEST_CASE("macros shadow coordinates") {
  const MacroMap m{{"q1", make_constant(5.0)}};
  CHECK(constant_value(parse_expression("q1 + 1", 1, {}, m)) == doctest::Approx(6.0));
}

}
