#include "maslov/gallery.hpp"

#include "maslov/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace maslov {

namespace {

Expr mul(Expr a, Expr b) { return make_binary(NodeKind::Multiply, std::move(a), std::move(b)); }
Expr add(Expr a, Expr b) { return make_binary(NodeKind::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return make_binary(NodeKind::Subtract, std::move(a), std::move(b)); }
Expr square(Expr a) { return make_binary(NodeKind::Power, std::move(a), make_constant(2.0)); }

Expr q(int i, int n) { return make_coordinate(i - 1, n); }
Expr p(int i, int n) { return make_coordinate(n + i - 1, n); }

// sum_{i <= j} x_i y_i for x, y in {q, p}.
Expr partial_dot(int j, int n, bool first_q, bool second_q) {
  Expr sum;
  for (int i = 1; i <= j; ++i) {
    Expr term = mul(first_q ? q(i, n) : p(i, n), second_q ? q(i, n) : p(i, n));
    sum = sum ? add(sum, term) : term;
  }
  return sum;
}

ScalarField field_of(Expr e, int n) { return ScalarField::from_expression(std::move(e), n); }

bool mentions_coordinates(const Expr& e) {
  if (!e) return false;
  if (e->kind == NodeKind::Coordinate) return true;
  return mentions_coordinates(e->lhs) || mentions_coordinates(e->rhs);
}

}  // namespace

IntegrableSystem make_one_freedom(std::string_view source, const ParameterMap& params, const SystemOptions& options) {
  std::string text;
  std::string label(source);
  if (source == "harmonic") {
    text = "(q1^2 + p1^2)/2";
  } else if (source == "saddle") {
    text = "(p1^2 - q1^2)/2";
  } else if (source == "cubic") {
    const auto it = params.find("a");
    const double a = it == params.end() ? 0.0 : it->second;
    std::ostringstream os;
    os << "cubic(a=" << a << ")";
    label = os.str();
    text = "p1^2/2 - q1^3/3 + a*q1";
  } else if (source == "double_well") {
    text = "p1^2/2 + (q1^2 - 1)^2/4";
  } else {
    text = std::string(source);
  }
  ParameterMap all = params;
  if (source == "cubic" && !all.count("a")) all["a"] = 0.0;
  const MacroMap aliases{{"q", make_coordinate(0, 1)}, {"p", make_coordinate(1, 1)}};
  const Expr e = parse_expression(text, 1, all, aliases);
  return IntegrableSystem::first_is_hamiltonian({field_of(e, 1)}, label, options);
}

IntegrableSystem make_bifurcation_family(double eps, const SystemOptions& options) {
  const ParameterMap params{{"eps", eps}};
  std::ostringstream label;
  label << "bifurcation(eps=" << eps << ")";
  return IntegrableSystem::first_is_hamiltonian(
      {parse_field("p1^2/2 + p2*q1^2/2 - eps*q1", 2, params), parse_field("p2", 2)}, label.str(), options);
}

IntegrableSystem make_product_system(bool hyperbolic, double w1, double w2, const SystemOptions& options) {
  Vector w(2);
  w << w1, w2;
  std::ostringstream label;
  label << (hyperbolic ? "product_hyperbolic" : "product_elliptic") << "(w=" << w1 << "," << w2 << ")";
  return IntegrableSystem({parse_field(hyperbolic ? "(p1^2 - q1^2)/2" : "(p1^2 + q1^2)/2", 2),
                           parse_field("(p2^2 + q2^2)/2", 2)},
                          w, label.str(), options);
}

Expr angular_momentum(int a, int b, int n) {
  if (a < 1 || b < 1 || a > n || b > n) throw DimensionError("angular momentum index out of range");
  return sub(mul(q(a, n), p(b, n)), mul(q(b, n), p(a, n)));
}

Expr squared_momentum(int j, int n) {
  if (j < 2 || j > n) throw DimensionError("squared angular momentum index out of range");
  return sub(mul(partial_dot(j, n, true, true), partial_dot(j, n, false, false)), square(partial_dot(j, n, true, false)));
}

double angular_momentum_value(const PhasePoint& z, int a, int b) {
  return z.q()[a - 1] * z.p()[b - 1] - z.q()[b - 1] * z.p()[a - 1];
}

double squared_momentum_value(const PhasePoint& z, int j) {
  const Vector r = z.q().head(j), pp = z.p().head(j);
  const double rp = r.dot(pp);
  return r.squaredNorm() * pp.squaredNorm() - rp * rp;
}

RotationalSystem make_rotational(int n, std::string_view h_source, const ParameterMap& params,
                                 const SystemOptions& options) {
  if (n < 3) throw DimensionError("rotational systems need n >= 3");
  const MacroMap invariants{{"r2", partial_dot(n, n, true, true)},
                            {"p2", partial_dot(n, n, false, false)},
                            {"rp", partial_dot(n, n, true, false)}};
  const Expr h = parse_expression(h_source, n, params, invariants);

  // The same source with the invariants replaced by placeholders shows whether h is a
  // function of them alone.
  const MacroMap placeholders{
      {"r2", make_constant(1.0)}, {"p2", make_constant(1.0)}, {"rp", make_constant(0.0)}};
  const bool chart = !mentions_coordinates(parse_expression(h_source, n, params, placeholders));

  std::vector<ScalarField> fields{field_of(h, n), field_of(angular_momentum(1, 2, n), n)};
  for (int j = 3; j <= n; ++j) fields.push_back(field_of(squared_momentum(j, n), n));
  std::ostringstream label;
  label << "rotational(n=" << n << ", h=" << h_source << ")";
  return RotationalSystem{IntegrableSystem::first_is_hamiltonian(std::move(fields), label.str(), options), n,
                          std::string(h_source), params, chart};
}

ClosedCurve rotational_action_curve(const RotationalSystem& sys, const PhasePoint& z, RotationalAction which, int m) {
  const int n = sys.n;
  if (z.freedoms() != n) throw DimensionError("point and rotational system differ in dimension");
  const Vector base = z.z();
  if (which == RotationalAction::L12) {
    if (angular_momentum_value(z, 1, 2) == 0.0 && base.head(2).norm() + base.segment(n, 2).norm() == 0.0)
      throw DomainError("L12 rotation through a point with r_(2) = p_(2) = 0 is constant");
    return ClosedCurve(
        [base, n](double s) {
          const double c = std::cos(2 * std::numbers::pi * s), si = std::sin(2 * std::numbers::pi * s);
          Vector out = base;
          for (int off : {0, n}) {
            out[off] = c * base[off] - si * base[off + 1];
            out[off + 1] = si * base[off] + c * base[off + 1];
          }
          return PhasePoint(out);
        },
        "L12 orbit");
  }
  if (m < 3 || m > n) throw DimensionError("L_(m) orbit needs 3 <= m <= n");
  const double L2 = squared_momentum_value(z, m);
  if (!(L2 > 0.0)) throw DomainError("L_(m) vanishes at the base point, so its flow has no orbit");
  const double L = std::sqrt(L2);
  const Vector r = base.head(m), pv = base.segment(n, m);
  const double rr = r.squaredNorm(), pp = pv.squaredNorm(), rp = r.dot(pv);
  const Vector r_dir = (rr * pv - rp * r) / L;
  const Vector p_dir = (pp * r - rp * pv) / L;
  std::ostringstream label;
  label << "L(" << m << ") orbit";
  return ClosedCurve(
      [base, r, pv, r_dir, p_dir, n, m](double s) {
        const double c = std::cos(2 * std::numbers::pi * s), si = std::sin(2 * std::numbers::pi * s);
        Vector out = base;
        out.head(m) = c * r + si * r_dir;
        out.segment(n, m) = c * pv - si * p_dir;
        return PhasePoint(out);
      },
      label.str());
}

const char* to_string(RotationalKind kind) noexcept {
  switch (kind) {
    case RotationalKind::Spherical: return "spherical";
    case RotationalKind::Axial: return "axial";
    case RotationalKind::Radial: return "radial";
    case RotationalKind::TwelveAxial: return "12-axial";
    case RotationalKind::None: return "none";
  }
  return "?";
}

namespace {

constexpr double kVanish = 1e-9;

// -(h_rr h_pp - h_rp^2) in the radial chart (r, p_r) with L^2 frozen; mirror chart when r = 0.
double spherical_half_trace(const RotationalSystem& sys, const PhasePoint& z, bool& degenerate) {
  const Vector r = z.q(), pv = z.p();
  const double L2 = std::max(0.0, squared_momentum_value(z, sys.n));
  const Expr x = make_coordinate(0, 1), y = make_coordinate(1, 1);
  const Expr lsq_over = make_binary(NodeKind::Divide, make_constant(L2), square(x));
  MacroMap chart;
  PhasePoint at;
  if (r.norm() > 0) {
    chart = {{"r2", square(x)}, {"p2", add(square(y), lsq_over)}, {"rp", mul(x, y)}};
    at = PhasePoint{r.norm(), r.dot(pv) / r.norm()};
  } else {
    chart = {{"r2", add(square(y), lsq_over)}, {"p2", square(x)}, {"rp", make_unary(NodeKind::Negate, mul(x, y))}};
    at = PhasePoint{pv.norm(), -r.dot(pv) / pv.norm()};
  }
  const ScalarField h = field_of(parse_expression(sys.h_source, 1, sys.params, chart), 1);
  const Matrix H = h.hess(at);
  const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
  degenerate = std::abs(det) <= 1e-8 * H.squaredNorm();
  return -det;
}

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

RotationalVerdict classify_rotational_singularity(const RotationalSystem& sys, const PhasePoint& z) {
  const int n = sys.n;
  if (z.freedoms() != n) throw DimensionError("point and rotational system differ in dimension");
  RotationalVerdict v;
  const Vector r = z.q(), pv = z.p();
  const double zscale = std::max(1.0, z.z().norm());
  auto vanishes = [&](double value, double scale) { return std::abs(value) <= kVanish * std::max(1.0, scale); };
  auto L_small = [&](int j) {
    const double rj = r.head(j).norm(), pj = pv.head(j).norm();
    return vanishes(std::sqrt(std::max(0.0, squared_momentum_value(z, j))), rj * pj);
  };

  struct Match {
    RotationalKind kind;
    int m;
  };
  std::vector<Match> matches;

  const bool twelve = vanishes(r[0], zscale) && vanishes(r[1], zscale) && vanishes(pv[0], zscale) &&
                      vanishes(pv[1], zscale);
  if (twelve) {
    matches.push_back({RotationalKind::TwelveAxial, 0});
  } else {
    for (int m = 3; m <= n; ++m) {
      const bool zm = vanishes(r[m - 1], zscale) && vanishes(pv[m - 1], zscale);
      if (zm && !L_small(m - 1)) matches.push_back({RotationalKind::Axial, m});
    }
    int radial = 0;
    for (int j = 3; j <= n; ++j)
      if (L_small(j)) radial = j;
    if (radial) matches.push_back({RotationalKind::Radial, radial});

    if (r.norm() + pv.norm() > 0) {
      const TangentVector g = sys.system.field(0).grad(z);
      const Vector Hr = g.head(n), Hp = g.tail(n);
      const bool spherical = vanishes(r.dot(Hp), r.norm() * Hp.norm()) && vanishes(pv.dot(Hr), pv.norm() * Hr.norm()) &&
                             vanishes(r.dot(Hr) - pv.dot(Hp), r.norm() * Hr.norm() + pv.norm() * Hp.norm());
      if (spherical) matches.push_back({RotationalKind::Spherical, 0});
    }
  }

  for (const auto& m : matches) {
    std::ostringstream os;
    os << to_string(m.kind);
    if (m.m) os << "(" << m.m << ")";
    v.matches.push_back(os.str());
  }

  SingularityData data;
  bool generic_ok = true;
  try {
    data = tau_and_classify(sys.system, z);
    v.corank = data.corank;
    v.generic_kind = data.kind;
  } catch (const NumericalError&) {
    generic_ok = false;
    v.corank = -1;
  }

  if (matches.size() > 1) {
    v.ambiguous = true;
    v.kind = RotationalKind::None;
    v.consistent = generic_ok && v.corank >= 2;
    return v;
  }
  if (matches.empty()) {
    v.kind = RotationalKind::None;
    v.consistent = generic_ok && v.corank == 0;
    return v;
  }

  v.kind = matches.front().kind;
  v.m = matches.front().m;
  switch (v.kind) {
    case RotationalKind::Spherical: {
      if (sys.radial_chart) {
        bool degenerate = false;
        v.half_trK2 = spherical_half_trace(sys, z, degenerate);
        v.nondegenerate = !degenerate;
      } else if (generic_ok && v.corank == 1 && data.c[0] != 0.0) {
        // Without a chart, rescale the generic tau to c_H = 1.
        v.half_trK2 = data.tau / (data.c[0] * data.c[0]);
        v.nondegenerate = data.kind != SingularityKind::DegenerateCorank1;
      }
      v.consistent = generic_ok && v.corank == 1 &&
                     (v.nondegenerate ? sgn(data.tau) == sgn(v.half_trK2) && data.kind != SingularityKind::DegenerateCorank1
                                      : data.kind == SingularityKind::DegenerateCorank1);
      break;
    }
    case RotationalKind::Axial: {
      v.half_trK2 = -squared_momentum_value(z, v.m);
      v.nondegenerate = true;
      v.consistent = generic_ok && v.corank == 1 && sgn(data.tau) == sgn(v.half_trK2) &&
                     data.kind != SingularityKind::DegenerateCorank1;
      break;
    }
    case RotationalKind::Radial: {
      v.half_trK2 = 0.0;
      v.nondegenerate = false;
      v.consistent = generic_ok && (v.m == 3 ? v.corank == 1 && data.kind == SingularityKind::DegenerateCorank1
                                             : v.corank >= 2);
      break;
    }
    case RotationalKind::TwelveAxial:
    case RotationalKind::None: {
      v.half_trK2 = 0.0;
      v.nondegenerate = false;
      v.consistent = generic_ok && v.corank >= 2;
      break;
    }
  }
  return v;
}

IntegrableSystem make_builtin(std::string_view name, const ParameterMap& params, std::string_view h_source,
                              const SystemOptions& options) {
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "harmonic" || name == "saddle" || name == "cubic" || name == "double_well")
    return make_one_freedom(name, params, options);
  if (name == "bifurcation") return make_bifurcation_family(get("eps", 0.0), options);
  if (name == "product_hyperbolic") return make_product_system(true, get("w1", 1.0), get("w2", 1.0), options);
  if (name == "product_elliptic") return make_product_system(false, get("w1", 1.0), get("w2", 1.0), options);
  if (name == "rotational") {
    const double n = get("n", 3.0);
    if (n != std::floor(n)) throw DomainError("rotational dimension n must be an integer");
    ParameterMap rest = params;
    rest.erase("n");
    return make_rotational(static_cast<int>(n), h_source.empty() ? "(p2 + r2)/2" : h_source, rest, options).system;
  }
  throw DomainError("unknown builtin system '" + std::string(name) + "'");
}

}  // namespace maslov
