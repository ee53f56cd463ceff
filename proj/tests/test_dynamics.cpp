#include "doctest.h"

#include "maslov/dynamics.hpp"
#include "maslov/errors.hpp"
#include "maslov/gallery.hpp"
#include "support/oracles.hpp"

#include <numbers>
#include <random>

using namespace maslov;

namespace {

FlowSpec along(int n, int alpha, double t) {
  FlowSpec f;
  f.weights = Vector::Unit(n, alpha);
  f.t_end = t;
  return f;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("harmonic period") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  FlowSpec f;
  f.t_end = 2 * std::numbers::pi;
  const PhasePoint z = flow_point(sys, PhasePoint{0.4, -0.3}, f);
  CHECK((z.z() - Vector(Eigen::Vector2d(0.4, -0.3))).norm() <= 1e-9);
  f.t_end = std::numbers::pi / 2;
  const PhasePoint w = flow_point(sys, PhasePoint{1, 0}, f);
  CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(-1.0));
}

TEST_CASE("flow matches the fixed-step oracle") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  const auto F = oracle::fields_of(sys);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    const Vector z0 = oracle::random_point(rng, 4);
    for (int alpha = 0; alpha < 2; ++alpha) {
      const FlowSpec f = along(2, alpha, 1.3);
      const Vector z = flow_point(sys, PhasePoint(z0), f).z();
      CHECK((z - oracle::rk4_flow(F, f.weights, z0, 1.3, 2000)).norm() <= 1e-6);
    }
  }
}

TEST_CASE("integrals are conserved and trajectories recorded") {
  const RotationalSystem rot = make_rotational(3, "(p2 + r2)/2");
  FlowSpec f;
  f.t_end = 30;
  std::mt19937_64 rng(2);
  const Trajectory tr = integrate_flow(rot.system, PhasePoint(oracle::random_point(rng, 6)), f);
  CHECK(tr.t.front() == 0.0);
  CHECK(tr.t.back() == doctest::Approx(30.0));
  CHECK(tr.z.size() == tr.t.size());
  CHECK(tr.drift.maxCoeff() <= 1e-8 * tr.drift_scale);
}

TEST_CASE("flows of different integrals commute") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const PhasePoint z0(oracle::random_point(rng, 4));
    const PhasePoint a = flow_point(sys, flow_point(sys, z0, along(2, 0, 0.7)), along(2, 1, 0.9));
    const PhasePoint b = flow_point(sys, flow_point(sys, z0, along(2, 1, 0.9)), along(2, 0, 0.7));
    CHECK((a.z() - b.z()).norm() <= 1e-8);
  }
}

TEST_CASE("linearized flow is symplectic and matches differences of the flow") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  const PhasePoint z0{0.3, -0.2, 0.4, 0.5};
  FlowSpec f;
  f.t_end = 2.0;
  const LinearizedFlow lin = linearized_flow(sys, z0, f);
  CHECK(lin.symplectic_defect <= 1e-9);
  CHECK(symplectic_defect(lin.S) == doctest::Approx(lin.symplectic_defect));
  const auto F = oracle::fields_of(sys);
  Matrix D(4, 4);
  const double h = 1e-5;
  for (int j = 0; j < 4; ++j) {
    Vector e = Vector::Zero(4);
    e[j] = h;
    D.col(j) = (oracle::rk4_flow(F, sys.weights(), z0.z() + e, 2.0, 4000) -
                oracle::rk4_flow(F, sys.weights(), z0.z() - e, 2.0, 4000)) / (2 * h);
  }
  CHECK((lin.S - D).norm() <= 1e-4 * (1 + D.norm()));
}

TEST_CASE("long linearized flow stays symplectic") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  FlowSpec f;
  f.t_end = 50.0;
  const LinearizedFlow lin = linearized_flow(sys, PhasePoint{1.2, 0.0, 0.3, 0.1}, f);
  CHECK(lin.symplectic_defect <= 1e-6);
}

TEST_CASE("escape from the safety ball is an error") {
  const IntegrableSystem sys = make_product_system(true);
  FlowSpec f;
  f.t_end = 40.0;
  CHECK_THROWS_AS(flow_point(sys, PhasePoint{0.1, 0.5, 0.3, 0.0}, f), NumericalError);
}

TEST_CASE("projector eigenstructure at a hyperbolic point") {
  const IntegrableSystem sys = make_bifurcation_family(0.0);
  const PhasePoint x{0, 0.3, 0, -1.44};
  const SingularityData d = tau_and_classify(sys, x);
  REQUIRE(d.kind == SingularityKind::Hyperbolic);
  const double root = std::sqrt(d.tau);
  CHECK(root == doctest::Approx(1.2));
  const Matrix P = projector_P(sys, x, d.c, root);
  CHECK((P - P.transpose()).norm() <= 1e-14);
  CHECK(P.trace() == doctest::Approx(1.0));
  CHECK((P * P - P).norm() <= 1e-12);
  CHECK((d.K * P - root * P).norm() <= 1e-12);
  const Eigen::EigenSolver<Matrix> es(d.K);
  double largest = 0;
  for (int i = 0; i < 4; ++i) largest = std::max(largest, es.eigenvalues()[i].real());
  CHECK(largest == doctest::Approx(root));
}

TEST_CASE("transport of c and K along the flows") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  const PhasePoint x{1, 0.3, 0, 0.1};
  for (int alpha = 0; alpha < 2; ++alpha) {
    const TransportCheck t = transport_check(sys, x, along(2, alpha, 5.0));
    CHECK(t.c_alignment >= 1 - 1e-6);
    CHECK(t.K_alignment >= 1 - 1e-6);
    CHECK(corank_at(sys, t.end) == 1);
  }
}

TEST_CASE("product system exponents") {
  const IntegrableSystem hyp = make_product_system(true);
  const PhasePoint x{0, 1, 0, 0};
  const LiapunovEstimate e = direct_liapunov(hyp, x, 50, 1.0);
  CHECK(e.exponent == doctest::Approx(1.0).epsilon(0.03));
  CHECK(e.half_exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(e.transient == doctest::Approx(5.0));
  const LiapunovReport r = kappa_H_and_sum_rule(hyp, x);
  CHECK(r.kind == SingularityKind::Hyperbolic);
  CHECK(r.kappa_H == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.sum_rule_residual <= 1e-6);
  CHECK(r.cross_ok);
  REQUIRE(r.kappa_alpha.size() == 2);
  CHECK(r.kappa_alpha[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.kappa_alpha[1] == doctest::Approx(0.0).epsilon(1e-6));

  const IntegrableSystem doubled = make_product_system(true, 2.0, 1.0);
  CHECK(kappa_H_and_sum_rule(doubled, x).kappa_H == doctest::Approx(2.0).epsilon(1e-3));

  const IntegrableSystem ell = make_product_system(false);
  const LiapunovReport re = kappa_H_and_sum_rule(ell, x);
  CHECK(re.kind == SingularityKind::Elliptic);
  CHECK(re.kappa_H == 0.0);
  CHECK(re.kappa_direct <= 0.02);
  CHECK(re.cross_ok);
}

TEST_CASE("sum rule on the bifurcation family") {
  const IntegrableSystem sys = make_bifurcation_family(0.0);
  const PhasePoint x{0, 0.3, 0, -1};
  const LiapunovReport r = kappa_H_and_sum_rule(sys, x);
  CHECK(r.kind == SingularityKind::Hyperbolic);
  CHECK(r.tau_root == doctest::Approx(1.0));
  CHECK(r.sum_rule_residual <= 1e-3);
  CHECK(r.kappa_H == doctest::Approx(r.kappa_direct).epsilon(0.03));
}

TEST_CASE("ergodic weights") {
  const Vector w = default_ergodic_weights(3);
  CHECK(w.norm() == doctest::Approx(1.0));
  CHECK(w[1] / w[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(w[2] / w[0] == doctest::Approx(std::sqrt(3.0)));
}

}
