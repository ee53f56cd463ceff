#include "doctest.h"

#include "maslov/errors.hpp"
#include "maslov/gallery.hpp"
#include "support/oracles.hpp"

#include <numbers>
#include <random>

using namespace maslov;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ClosedCurve circle(const Vector& c, const Vector& u, const Vector& v, double r) {
  return ClosedCurve([=](double s) {
    return PhasePoint(Vector(c + r * (std::cos(kTwoPi * s) * u + std::sin(kTwoPi * s) * v)));
  });
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

IntegrableSystem wide(const char* name, double a = 0.0) {
  SystemOptions o;
  o.box_half_width = 2.0;
  return make_one_freedom(name, {{"a", a}}, o);
}

}  // namespace

TEST_SUITE("maslov") {

TEST_CASE("harmonic circles against the dense-winding oracle") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  const auto F = oracle::fields_of(sys);
  // Clockwise in the (q, p) plane is the direction of the flow.
  const ClosedCurve flow = circle(vec({0, 0}), vec({1, 0}), vec({0, -1}), 0.7);
  const MaslovResult r = maslov_index(sys, flow);
  CHECK(r.index == 2);
  CHECK(r.residual <= 1e-8);
  CHECK(r.index == std::lround(oracle::dense_winding(F, [&](double s) { return flow(s).z(); })));
  CHECK(maslov_index(sys, flow.reversed()).index == -2);
  CHECK(maslov_index(sys, circle(vec({2, 0}), vec({1, 0}), vec({0, 1}), 0.5)).index == 0);
}

TEST_CASE("one-freedom circles") {
  struct Case {
    const char* name;
    double a, x0, r;
  };
  const Case cases[] = {{"double_well", 0, -1.0, 0.5}, {"double_well", 0, 0.0, 0.5}, {"double_well", 0, -0.5, 0.8},
                        {"double_well", 0, 0.0, 3.0},  {"cubic", 0.04, -0.2, 0.1},  {"cubic", 0.04, 0.2, 0.1},
                        {"cubic", 0.04, 0.0, 1.0},     {"cubic", 0.0, 0.0, 0.3}};
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CAPTURE(c.x0);
    CAPTURE(c.r);
    const IntegrableSystem sys = wide(c.name, c.a);
    const ClosedCurve g = circle(vec({c.x0, 0}), vec({1, 0}), vec({0, 1}), c.r);
    const double dense = oracle::dense_winding(oracle::fields_of(sys), [&](double s) { return g(s).z(); }, 20000);
    CHECK(maslov_index(sys, g).index == std::lround(dense));
  }
}

TEST_CASE("trace is consistent") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  const MaslovResult r = maslov_index(sys, circle(vec({0, 0}), vec({1, 0}), vec({0, -1}), 1.0));
  REQUIRE(r.trace.size() >= 257);
  CHECK(r.trace.front().s == 0.0);
  CHECK(r.trace.back().s == 1.0);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].s > r.trace[k - 1].s);
    CHECK(std::abs(r.trace[k].unwrapped_arg - r.trace[k - 1].unwrapped_arg) < std::numbers::pi / 2);
  }
  CHECK((r.trace.back().unwrapped_arg - r.trace.front().unwrapped_arg) / std::numbers::pi ==
        doctest::Approx(r.raw));
}

TEST_CASE("parity and antisymmetry on random circles") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  std::mt19937_64 rng(21);
  int nonzero = 0, done = 0;
  for (int k = 0; k < 40; ++k) {
    const Vector c = oracle::random_point(rng, 4, 1.5);
    const Vector u = oracle::random_point(rng, 4).normalized(), v = oracle::random_point(rng, 4).normalized();
    const ClosedCurve g = circle(c, u, v, 0.8);
    try {
      const MaslovResult r = maslov_index(sys, g);
      CHECK(r.index % 2 == 0);
      CHECK(maslov_index(sys, g.reversed()).index == -r.index);
      nonzero += r.index != 0;
      ++done;
    } catch (const NumericalError& e) {
      // a random circle may pass through the singular set; that is the only allowed failure
      CHECK(e.kind() == NumericalErrorKind::CurveHitsSingularSet);
    }
  }
  CHECK(done >= 30);
  CHECK(nonzero >= 1);
}

TEST_CASE("small deformations keep the index") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  const Vector c = vec({1, 0, 0, 0}), u = vec({0, 0, 1, 0}), v = vec({0, 0, 0, 1});
  const int base = maslov_index(sys, circle(c, u, v, 0.5)).index;
  CHECK(base == 2);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const Vector d1 = oracle::random_point(rng, 4, 0.05), d2 = oracle::random_point(rng, 4, 0.05);
    const ClosedCurve g([=](double s) {
      const double t = kTwoPi * s;
      return PhasePoint(Vector(c + 0.5 * (std::cos(t) * u + std::sin(t) * v) + std::sin(t) * d1 +
                               std::sin(2 * t) * d2));
    });
    CHECK(maslov_index(sys, g).index == base);
  }
}

TEST_CASE("phase increments add along subdivisions") {
  const IntegrableSystem sys = make_bifurcation_family(0.1);
  const ClosedCurve g = circle(vec({1, 0, 0, 0}), vec({0, 0, 1, 0}), vec({0, 0, 0, 1}), 0.5);
  const double whole = maslov_index(sys, g).raw;
  const double a = phase_increment(sys, g, 0.0, 0.3), b = phase_increment(sys, g, 0.3, 0.77),
               c = phase_increment(sys, g, 0.77, 1.0);
  CHECK(a + b + c == doctest::Approx(whole).epsilon(1e-9));
  CHECK(phase_increment(sys, g, 0.77, 0.3) == doctest::Approx(-b).epsilon(1e-9));
}

TEST_CASE("concatenated loops add") {
  const IntegrableSystem sys = wide("double_well");
  // Two circles around the left well sharing the base point (-0.5, 0).
  auto loop = [](double cx) {
    return [=](double t) { return vec({cx + (-0.5 - cx) * std::cos(t), (-0.5 - cx) * std::sin(t)}); };
  };
  const auto outer = loop(-1.0), inner = loop(-0.8);
  const ClosedCurve first([=](double s) { return PhasePoint(outer(kTwoPi * s)); });
  const ClosedCurve second([=](double s) { return PhasePoint(inner(kTwoPi * s)); });
  const ClosedCurve both([=](double s) {
    return PhasePoint(s < 0.5 ? outer(kTwoPi * 2 * s) : inner(kTwoPi * (2 * s - 1)));
  });
  const int a = maslov_index(sys, first).index, b = maslov_index(sys, second).index;
  CHECK(a != 0);
  CHECK(a == b);
  CHECK(maslov_index(sys, both).index == a + b);
}

TEST_CASE("curves through the singular set are rejected") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  try {
    maslov_index(sys, circle(vec({1, 0}), vec({1, 0}), vec({0, 1}), 1.0));
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalErrorKind::CurveHitsSingularSet);
  }
  const ClosedCurve open([](double s) { return PhasePoint{1.0 + s, 0.0}; });
  CHECK_THROWS_AS(maslov_index(sys, open), Error);
}

TEST_CASE("from_samples polygon") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  std::vector<PhasePoint> pts;
  for (int k = 0; k <= 6; ++k) pts.push_back(PhasePoint{std::cos(kTwoPi * k / 6), -std::sin(kTwoPi * k / 6)});
  CHECK(maslov_index(sys, ClosedCurve::from_samples(pts)).index == 2);
}

TEST_CASE("local index: harmonic origin") {
  const IntegrableSystem sys = make_one_freedom("harmonic");
  const Vector u = vec({1, 0}), v = vec({0, 1});
  CHECK(local_maslov_index(sys, PhasePoint{0, 0}, u, v) == -2);
  CHECK(local_maslov_index(sys, PhasePoint{0, 0}, v, u) == 2);
  const LocalIndexCheck chk = verify_local_index(sys, PhasePoint{0, 0}, u, v);
  CHECK(chk.agree);
  CHECK(chk.winding == -2);
}

TEST_CASE("local index agrees with the winding for random transverse pairs") {
  std::mt19937_64 rng(99);
  const IntegrableSystem hyp = make_bifurcation_family(0.0);
  const IntegrableSystem ell = make_bifurcation_family(0.1);
  const PhasePoint xs[] = {PhasePoint{0, 0.3, 0, -1}, PhasePoint{1, 0, 0, 0.1}};
  const IntegrableSystem* systems[] = {&hyp, &ell};
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 10; ++k) {
      const Vector u = oracle::random_point(rng, 4), v = oracle::random_point(rng, 4);
      const LocalIndexCheck chk = verify_local_index(*systems[j], xs[j], u, v);
      CHECK(chk.agree);
      CHECK(std::abs(chk.formula) == 2);
    }
  }
}

TEST_CASE("projection bracket flips with orientation") {
  const IntegrableSystem sys = make_bifurcation_family(0.0);
  const PhasePoint x{0, 0.3, 0, -1};
  const SingularityData d = tau_and_classify(sys, x);
  const TransverseSplit split = transverse_split(d);
  const Vector u = vec({1, 0.2, 0.1, 0}), v = vec({0.3, 0, 1, 0.5});
  const ProjectedPair a = project_onto_image(d, split, u, v), b = project_onto_image(d, split, v, u);
  CHECK(a.bracket == doctest::Approx(-b.bracket));
  CHECK(a.bracket != doctest::Approx(0.0));
  // the kernel direction drops out
  const ProjectedPair c = project_onto_image(d, split, Vector(u + 3.0 * split.kernel.col(0)), v);
  CHECK(c.bracket == doctest::Approx(a.bracket));
}

TEST_CASE("disk formula agrees with the boundary winding") {
  {
    const IntegrableSystem sys = make_bifurcation_family(0.1);
    TransverseDisk disk = planar_disk(PhasePoint{1, 0, 0, 0}, vec({0, 0, 1, 0}), vec({0, 0, 0, 1}), 0.5);
    disk.preimages = find_disk_preimages(sys, disk.map);
    const DiskFormulaResult f = disk_index_formula(sys, disk);
    CHECK(f.terms.size() == 1);
    CHECK(f.index == maslov_index(sys, disk_boundary(disk)).index);
    CHECK(f.index == 2);
  }
  {
    const IntegrableSystem sys = wide("double_well");
    TransverseDisk disk = planar_disk(PhasePoint{0, 0}, vec({1, 0}), vec({0, 1}), 3.0);
    disk.preimages = find_disk_preimages(sys, disk.map);
    const DiskFormulaResult f = disk_index_formula(sys, disk);
    CHECK(f.terms.size() == 3);
    for (const auto& t : f.terms) CHECK(t.sigma == t.sigma_alt);
    CHECK(f.index == maslov_index(sys, disk_boundary(disk)).index);
  }
  for (double a : {0.01, 0.04, 0.2}) {
    const IntegrableSystem sys = wide("cubic", a);
    TransverseDisk disk = planar_disk(PhasePoint{0, 0}, vec({1, 0}), vec({0, 1}), 1.0);
    disk.preimages = find_disk_preimages(sys, disk.map);
    const DiskFormulaResult f = disk_index_formula(sys, disk);
    CHECK(f.terms.size() == 2);
    CHECK(f.index == 0);
    CHECK(f.index == maslov_index(sys, disk_boundary(disk)).index);
  }
}

TEST_CASE("disk preimages match the known singular points") {
  const IntegrableSystem sys = wide("double_well");
  const TransverseDisk disk = planar_disk(PhasePoint{0, 0}, vec({1, 0}), vec({0, 1}), 2.0);
  auto pre = find_disk_preimages(sys, disk.map);
  REQUIRE(pre.size() == 3);
  std::sort(pre.begin(), pre.end(), [](const auto& a, const auto& b) { return a.x() < b.x(); });
  CHECK(pre[0].x() == doctest::Approx(-0.5));
  CHECK(pre[1].x() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pre[2].x() == doctest::Approx(0.5));
  for (const auto& p : pre) CHECK(std::abs(p.y()) <= 1e-9);
}

}
