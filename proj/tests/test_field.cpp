#include "doctest.h"

#include "maslov/errors.hpp"
#include "maslov/field.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace maslov;

TEST_SUITE("field") {

TEST_CASE("forward derivatives match difference oracle") {
  std::mt19937_64 rng(7);
  const char* sources[] = {"p1^2/2 + p2*q1^2/2 - 0.1*q1", "(q1^2 + q2^2)*(p1^2 + p2^2) - (q1*p1 + q2*p2)^2",
                           "sin(q1*p2) + exp(0.3*q2) - log(2 + p1^2)", "sqrt(1 + q1^2 + p2^2)*cos(p1)",
                           "(q1 - q2)^4/(3 + p1^2)"};
  for (const char* s : sources) {
    const ScalarField f = parse_field(s, 2);
    for (int k = 0; k < 10; ++k) {
      const Vector z = oracle::random_point(rng, 4);
      const Vector g = grad_field(f, PhasePoint(z));
      const Matrix H = hess_field(f, PhasePoint(z));
      const Vector g0 = oracle::gradient(oracle::values_of(f), z);
      const Matrix H0 = oracle::hessian(oracle::values_of(f), z);
      CHECK((g - g0).norm() <= 1e-6 * std::max(1.0, g0.norm()));
      CHECK((H - H0).norm() <= 1e-4 * std::max(1.0, H0.norm()));
      CHECK((H - H.transpose()).norm() == 0.0);
    }
  }
}

TEST_CASE("finite-difference fields agree with forward mode") {
  const ScalarField f = parse_field("q1^3*p1 - sin(q1 + p1)", 1);
  const ScalarField g = ScalarField::from_expression(f.expression(), 1, Differentiation::FiniteDifference);
  const PhasePoint z{0.4, -0.7};
  CHECK((g.grad(z) - f.grad(z)).norm() <= 1e-6);
  CHECK((g.hess(z) - f.hess(z)).norm() <= 1e-4);
}

TEST_CASE("black-box fields") {
  const ScalarField f = ScalarField::from_function(
      [](std::span<const double> z) { return z[0] * z[0] * z[1]; }, 1, "q^2 p");
  const PhasePoint z{1.5, 2.0};
  CHECK(f.eval(z) == doctest::Approx(4.5));
  CHECK(f.grad(z)[0] == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(f.grad(z)[1] == doctest::Approx(2.25).epsilon(1e-6));
  CHECK(f.hess(z)(0, 1) == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("domain errors name the offending node") {
  const ScalarField f = parse_field("log(q1) + 1", 1);
  CHECK_THROWS_AS(f.eval(PhasePoint{-1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(parse_field("1/q1", 1).eval(PhasePoint{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(parse_field("sqrt(q1)", 1).grad(PhasePoint{0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(parse_field("q1^0.5", 1).eval(PhasePoint{-2.0, 1.0}), DomainError);
  try {
    f.eval(PhasePoint{-1.0, 0.0});
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("dimension checks") {
  const ScalarField f = parse_field("q1*p1", 1);
  CHECK_THROWS_AS(f.eval(PhasePoint{1.0, 2.0, 3.0, 4.0}), DimensionError);
}

}
