#include "maslov/run.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

namespace maslov {

using json = nlohmann::ordered_json;

BuiltSystem build_system(const SystemSpec& spec) {
  if (spec.builtin == "rotational") {
    const int n = static_cast<int>(spec.builtin_params.at("n"));
    RotationalSystem rot = make_rotational(n, spec.h_source, spec.params, spec.options);
    return BuiltSystem{rot.system, rot};
  }
  if (!spec.builtin.empty()) return BuiltSystem{make_builtin(spec.builtin, spec.builtin_params, {}, spec.options), {}};
  if (spec.fields.empty()) throw ConfigError("no system given", "system", 0);
  std::vector<ScalarField> fields;
  for (std::size_t k = 0; k < spec.fields.size(); ++k) {
    try {
      fields.push_back(ScalarField::from_expression(parse_expression(spec.fields[k], spec.freedoms, spec.params),
                                                    spec.freedoms, spec.differentiation));
    } catch (const ParseError& e) {
      throw ConfigError(std::string("field") + std::to_string(k + 1) + ": " + e.what(),
                        "system.field" + std::to_string(k + 1), 0);
    }
  }
  std::ostringstream label;
  label << "dsl(n=" << spec.freedoms << ")";
  if (spec.weights.size() == 0)
    return BuiltSystem{IntegrableSystem::first_is_hamiltonian(std::move(fields), label.str(), spec.options), {}};
  return BuiltSystem{IntegrableSystem(std::move(fields), spec.weights, label.str(), spec.options), {}};
}

namespace {

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

Vector unit(int d, int i) {
  Vector e = Vector::Zero(d);
  e[i] = 1.0;
  return e;
}

double param(const SystemSpec& s, const char* key, double fallback) {
  const auto it = s.builtin_params.find(key);
  return it == s.builtin_params.end() ? fallback : it->second;
}

Vector default_rotational_point(int n) {
  Vector z(2 * n);
  for (int i = 0; i < 2 * n; ++i) z[i] = 0.3 + 0.17 * i * ((i % 3) ? 1.0 : -1.0) + 0.05 * i * i / 7.0;
  return z;
}

CurveSpec default_curve(const SystemSpec& s) {
  CurveSpec c;
  const std::string& b = s.builtin;
  if (b == "bifurcation") {
    c.center = Vector::Zero(4);
    c.center[0] = 1.0;
    c.u = unit(4, 2);
    c.v = unit(4, 3);
    c.radius = 0.5;
  } else if (b == "harmonic" || b == "saddle" || b == "cubic" || b == "double_well") {
    c.center = Vector::Zero(2);
    c.u = unit(2, 0);
    c.v = unit(2, 1);
    c.radius = b == "double_well" ? 1.5 : 1.0;
  } else if (b == "product_hyperbolic" || b == "product_elliptic") {
    c.center = Vector::Zero(4);
    c.center[1] = 1.0;
    c.u = unit(4, 0);
    c.v = unit(4, 2);
    c.radius = 0.5;
  } else if (b == "rotational") {
    const int n = static_cast<int>(param(s, "n", 3));
    c.kind = CurveSpec::Kind::Action;
    c.action = RotationalAction::Lm;
    c.m = n;
  } else {
    throw ConfigError("this system has no default curve; add a [curve] section", "curve", 0);
  }
  return c;
}

std::vector<Vector> default_seeds(const SystemSpec& s) {
  const std::string& b = s.builtin;
  auto pt = [](std::initializer_list<double> v) { return Vector(PhasePoint(v).z()); };
  if (b == "harmonic" || b == "saddle") return {pt({0, 0})};
  if (b == "double_well") return {pt({-1, 0}), pt({0, 0}), pt({1, 0})};
  if (b == "cubic") {
    const double a = param(s, "a", 0.0);
    if (a == 0.0) return {pt({0, 0})};
    if (a > 0.0) return {pt({-std::sqrt(a), 0}), pt({std::sqrt(a), 0})};
  }
  if (b == "bifurcation") {
    const double eps = param(s, "eps", 0.0);
    if (eps == 0.0) return {pt({0, 0, 0, 1}), pt({0, 0, 0, -1})};
    return {pt({1, 0, 0, eps}), pt({-1, 0, 0, -eps})};
  }
  if (b == "product_hyperbolic" || b == "product_elliptic") return {pt({0, 1, 0, 0})};
  throw ConfigError("this system has no default seeds; set singularities.seeds", "singularities.seeds", 0);
}

// Rows shown in the table; the same values go into the JSON record.
class Table {
 public:
  void add(const std::string& name, json value) { rows_.push_back(json{{"name", name}, {"value", std::move(value)}}); }

  void check(const std::string& name, json value, json expected, bool pass) {
    rows_.push_back(json{{"name", name}, {"value", std::move(value)}, {"expected", std::move(expected)}, {"pass", pass}});
    if (!pass) ++failures_;
  }

  int failures() const { return failures_; }
  const json& rows() const { return rows_; }

  void print(std::ostream& os) const {
    std::size_t width = 0;
    for (const auto& r : rows_) width = std::max(width, r["name"].get<std::string>().size());
    for (const auto& r : rows_) {
      os << "  " << std::left << std::setw(static_cast<int>(width)) << r["name"].get<std::string>() << "  "
         << show(r["value"]);
      if (r.contains("expected")) os << "  (expected " << show(r["expected"]) << ")  " << (r["pass"].get<bool>() ? "PASS" : "FAIL");
      os << "\n";
    }
  }

 private:
  static std::string show(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  json rows_ = json::array();
  int failures_ = 0;
};

struct Context {
  const RunConfig& cfg;
  BuiltSystem built;
  Table table;
  json details = json::object();
  std::filesystem::path out_dir;
  bool verbose;
  std::ostream& err;
  int failures = 0;  // per-item numerical failures that did not abort the run

  const IntegrableSystem& sys() const { return built.system; }
};

ClosedCurve make_curve(Context& ctx, const CurveSpec& c) {
  const int d = ctx.sys().dimension();
  if (c.kind == CurveSpec::Kind::Action) {
    if (!ctx.built.rotational) throw ConfigError("action curves need the rotational builtin", "curve.kind", 0);
    const RotationalSystem& rot = *ctx.built.rotational;
    const Vector point = c.point.size() ? c.point : default_rotational_point(rot.n);
    if (point.size() != d) throw ConfigError("curve.point has the wrong dimension", "curve.point", 0);
    if (c.action == RotationalAction::Lm && c.m > rot.n) throw ConfigError("action index exceeds n", "curve.action", 0);
    ClosedCurve curve = rotational_action_curve(rot, PhasePoint(point), c.action, c.m);
    return c.reverse ? curve.reversed() : curve;
  }
  if (c.center.size() != d) throw ConfigError("curve.center has the wrong dimension", "curve.center", 0);
  const Vector center = c.center, u = c.u, v = c.v;
  const double r = c.radius;
  ClosedCurve curve([center, u, v, r](double s) {
    const double t = 2.0 * std::numbers::pi * s;
    return PhasePoint(Vector(center + r * (std::cos(t) * u + std::sin(t) * v)));
  }, "circle");
  return c.reverse ? curve.reversed() : curve;
}

json curve_json(const CurveSpec& c) {
  if (c.kind == CurveSpec::Kind::Action) {
    json j{{"kind", "action"}, {"action", c.action == RotationalAction::L12 ? std::string("L12") : "L" + std::to_string(c.m)}};
    if (c.point.size()) j["point"] = vec(c.point);
    j["reverse"] = c.reverse;
    return j;
  }
  return json{{"kind", "circle"}, {"center", vec(c.center)}, {"u", vec(c.u)}, {"v", vec(c.v)}, {"radius", c.radius},
              {"reverse", c.reverse}};
}

void write_trace(const std::filesystem::path& path, const MaslovResult& r) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << "s,re_detM,im_detM,unwrapped_arg\n";
  f << std::setprecision(17);
  for (const auto& t : r.trace) f << t.s << "," << t.det.real() << "," << t.det.imag() << "," << t.unwrapped_arg << "\n";
}

std::string csv_name(const RunConfig& cfg) {
  return cfg.csv_name.empty() ? std::string(to_string(cfg.scenario)) + "_trace.csv" : cfg.csv_name;
}

void run_index(Context& ctx) {
  const CurveSpec spec = ctx.cfg.curve ? *ctx.cfg.curve : default_curve(ctx.cfg.system);
  const ClosedCurve curve = make_curve(ctx, spec);
  ctx.details["curve"] = curve_json(spec);
  const MaslovResult r = maslov_index(ctx.sys(), curve, ctx.cfg.maslov);
  ctx.table.add("maslov_index", r.index);
  ctx.table.add("raw", r.raw);
  ctx.table.add("residual", r.residual);
  ctx.table.add("refinement_depth", r.refinement_depth);
  ctx.table.add("trace_points", static_cast<long>(r.trace.size()));
  ctx.table.add("min_abs_detM", r.min_abs_det);
  ctx.details["proximity_threshold"] = r.proximity_threshold;
  const std::string csv = csv_name(ctx.cfg);
  write_trace(ctx.out_dir / csv, r);
  ctx.details["trace_csv"] = csv;

  if (ctx.cfg.disk) {
    if (spec.kind != CurveSpec::Kind::Circle) throw ConfigError("disk sums need a circle curve", "disk.enabled", 0);
    TransverseDisk disk = planar_disk(PhasePoint(spec.center), spec.reverse ? spec.v : spec.u,
                                      spec.reverse ? spec.u : spec.v, spec.radius);
    disk.preimages = find_disk_preimages(ctx.sys(), disk.map, ctx.cfg.disk_grid);
    const DiskFormulaResult d = disk_index_formula(ctx.sys(), disk);
    ctx.table.add("disk_preimages", static_cast<long>(d.terms.size()));
    ctx.table.check("disk_index", d.index, r.index, d.index == r.index);
    json terms = json::array();
    for (const auto& t : d.terms)
      terms.push_back(json{{"preimage", vec(t.preimage)}, {"point", vec(t.point.z())}, {"kind", to_string(t.kind)},
                           {"sigma", t.sigma}, {"tau_sign", t.tau_sign}, {"contribution", t.contribution}});
    ctx.details["disk_terms"] = terms;
  }
}

json singular_point(Context& ctx, const Vector& seed, int index) {
  const std::string tag = "singularity[" + std::to_string(index) + "]";
  json j{{"seed", vec(seed)}};
  if (seed.size() != ctx.sys().dimension()) throw ConfigError("seed has the wrong dimension", "singularities.seeds", 0);
  PhasePoint x(seed);
  if (ctx.cfg.singularities.locate) {
    const LocateResult loc = locate_singularity(ctx.sys(), x, ctx.cfg.locate);
    x = loc.point;
    j["newton_iterations"] = loc.iterations;
    j["residual_detM"] = loc.residual;
  }
  j["point"] = vec(x.z());
  const SingularityData d = tau_and_classify(ctx.sys(), x);
  j["corank"] = d.corank;
  j["kind"] = to_string(d.kind);
  ctx.table.add(tag + ".point", vec(x.z()));
  ctx.table.add(tag + ".kind", to_string(d.kind));
  if (d.corank == 1) {
    j["c"] = vec(d.c);
    j["tau"] = d.tau;
    j["tau_tol"] = d.tau_tol;
    j["eta"] = vec(d.eta);
    j["theta"] = vec(d.theta);
    ctx.table.add(tag + ".tau", d.tau);
    if (d.kind != SingularityKind::DegenerateCorank1) {
      const TransverseSplit split = transverse_split(d);
      const double bracket = symplectic_product(d.eta, d.theta);
      j["eta_theta_bracket"] = bracket;
      j["image_dim"] = split.image_dim;
      j["skew_residual"] = split.skew_residual;
      j["image_residual"] = split.image_residual;
      ctx.table.add(tag + ".skew_residual", split.skew_residual);
      const bool own = ctx.cfg.singularities.u.size() > 0;
      const Vector u = own ? ctx.cfg.singularities.u : d.eta;
      const Vector v = own ? ctx.cfg.singularities.v : d.theta;
      if (u.size() != x.size()) throw ConfigError("singularities.u has the wrong dimension", "singularities.u", 0);
      const LocalIndexCheck chk = verify_local_index(ctx.sys(), x, u, v, ctx.cfg.singularities.epsilon, ctx.cfg.maslov);
      j["local_index"] = chk.formula;
      j["local_index_winding"] = chk.winding;
      ctx.table.check(tag + ".local_index", chk.formula, chk.winding, chk.agree);
    }
  }
  if (ctx.built.rotational) {
    const RotationalVerdict v = classify_rotational_singularity(*ctx.built.rotational, x);
    json r{{"kind", to_string(v.kind)}, {"m", v.m}, {"nondegenerate", v.nondegenerate}, {"half_trK2", v.half_trK2},
           {"ambiguous", v.ambiguous}, {"matches", v.matches}, {"consistent", v.consistent}};
    j["rotational"] = r;
    std::string label = to_string(v.kind);
    if (v.m) label += "(" + std::to_string(v.m) + ")";
    ctx.table.check(tag + ".rotational", label, "consistent with tau", v.consistent);
  }
  return j;
}

void run_singularities(Context& ctx) {
  const std::vector<Vector> seeds =
      ctx.cfg.singularities.seeds.empty() ? default_seeds(ctx.cfg.system) : ctx.cfg.singularities.seeds;
  json all = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      all.push_back(singular_point(ctx, seeds[i], static_cast<int>(i)));
    } catch (const NumericalError& e) {
      ++ctx.failures;
      const std::string tag = "singularity[" + std::to_string(i) + "]";
      ctx.table.add(tag + ".error", e.what());
      all.push_back(json{{"seed", vec(seeds[i])}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}});
    }
  }
  ctx.details["singularities"] = all;
}

void report_liapunov(Context& ctx, const LiapunovReport& r, const std::string& prefix) {
  ctx.table.add(prefix + "kind", to_string(r.kind));
  ctx.table.add(prefix + "tau", r.tau);
  ctx.table.add(prefix + "kappa_direct", r.kappa_direct);
  ctx.table.add(prefix + "kappa_direct_half", r.kappa_direct_half);
  ctx.table.add(prefix + "kappa_H", r.kappa_H);
  if (r.kind == SingularityKind::Hyperbolic) {
    ctx.table.add(prefix + "tau_root", r.tau_root);
    ctx.table.add(prefix + "kappa_alpha", vec(r.kappa_alpha));
    ctx.table.add(prefix + "sum_rule", r.sum_rule);
    ctx.table.add(prefix + "sum_rule_residual", r.sum_rule_residual);
    ctx.table.add(prefix + "windows", r.average.windows);
  }
  ctx.table.add(prefix + "cross_difference", r.cross_difference);
  ctx.table.add(prefix + "cross_ok", r.cross_ok);
  json d{{"c", vec(r.c)}};
  if (r.kind == SingularityKind::Hyperbolic) {
    d["window_means"] = mat(r.average.window_means);
    d["last_change"] = r.average.last_change;
  }
  ctx.details[prefix + "diagnostics"] = d;
}

void run_liapunov(Context& ctx) {
  Vector x;
  if (ctx.cfg.liapunov_point) x = *ctx.cfg.liapunov_point;
  else if (ctx.cfg.system.builtin.rfind("product_", 0) == 0) x = default_seeds(ctx.cfg.system).front();
  else throw ConfigError("set liapunov.point for this system", "liapunov.point", 0);
  if (x.size() != ctx.sys().dimension()) throw ConfigError("liapunov.point has the wrong dimension", "liapunov.point", 0);
  ctx.details["point"] = vec(x);
  report_liapunov(ctx, kappa_H_and_sum_rule(ctx.sys(), PhasePoint(x), ctx.cfg.liapunov), "");
}

// Checks on whatever system the config names.
void verify_system(Context& ctx) {
  const IntegrableSystem& sys = ctx.sys();
  const InvolutionReport& inv = sys.involution();
  ctx.table.check("involution_max", inv.max_abs, inv.tol, inv.max_abs <= inv.tol);

  if (ctx.built.rotational) {
    const RotationalSystem& rot = *ctx.built.rotational;
    const Vector point = ctx.cfg.curve && ctx.cfg.curve->point.size() ? ctx.cfg.curve->point : default_rotational_point(rot.n);
    const PhasePoint z(point);
    ctx.details["point"] = vec(point);
    const int mu12 = maslov_index(sys, rotational_action_curve(rot, z, RotationalAction::L12), ctx.cfg.maslov).index;
    ctx.table.check("mu_12", mu12, 0, mu12 == 0);
    for (int m = 3; m <= rot.n; ++m) {
      const int mu = maslov_index(sys, rotational_action_curve(rot, z, RotationalAction::Lm, m), ctx.cfg.maslov).index;
      ctx.table.check("mu_(" + std::to_string(m) + ")", mu, 2 * (m - 2), mu == 2 * (m - 2));
    }
    return;
  }
  const std::string& b = ctx.cfg.system.builtin;
  if (b == "product_hyperbolic" || b == "product_elliptic") {
    const Vector x = ctx.cfg.liapunov_point ? *ctx.cfg.liapunov_point : default_seeds(ctx.cfg.system).front();
    const LiapunovReport r = kappa_H_and_sum_rule(sys, PhasePoint(x), ctx.cfg.liapunov);
    if (r.kind == SingularityKind::Hyperbolic) {
      ctx.table.check("sum_rule_residual", r.sum_rule_residual, "<= 0.02", r.sum_rule_residual <= 0.02);
      ctx.table.check("kappa_H_vs_direct", r.cross_difference, "<= " + json(ctx.cfg.liapunov.cross_tol).dump(), r.cross_ok);
    } else {
      ctx.table.check("kappa_direct", r.kappa_direct, "<= " + json(ctx.cfg.liapunov.elliptic_tol).dump(), r.cross_ok);
    }
    return;
  }
  // Circle curve: winding against the disk sum over singular preimages.
  const CurveSpec spec = ctx.cfg.curve ? *ctx.cfg.curve : default_curve(ctx.cfg.system);
  if (spec.kind != CurveSpec::Kind::Circle) return;
  ctx.details["curve"] = curve_json(spec);
  const MaslovResult r = maslov_index(sys, make_curve(ctx, spec), ctx.cfg.maslov);
  if (b == "bifurcation") ctx.table.check("maslov_index", r.index, 2, r.index == 2);
  else ctx.table.add("maslov_index", r.index);
  ctx.table.check("parity", r.index % 2 == 0 ? "even" : "odd", "even", r.index % 2 == 0);
  TransverseDisk disk = planar_disk(PhasePoint(spec.center), spec.reverse ? spec.v : spec.u,
                                    spec.reverse ? spec.u : spec.v, spec.radius);
  disk.preimages = find_disk_preimages(sys, disk.map, ctx.cfg.disk_grid);
  try {
    const DiskFormulaResult d = disk_index_formula(sys, disk);
    ctx.table.check("disk_index", d.index, r.index, d.index == r.index);
  } catch (const NumericalError& e) {
    // Degenerate preimages put the disk outside the formula; the winding still stands.
    ctx.table.add("disk_index", std::string("n/a: ") + e.what());
  }
}

// Known indices and exponents on the builtin gallery, independent of the configured system.
void verify_reference(Context& ctx) {
  const MaslovOptions& mo = ctx.cfg.maslov;
  for (double eps : {-0.1, 0.0, 0.1}) {
    const IntegrableSystem sys = make_bifurcation_family(eps);
    SystemSpec spec;
    spec.builtin = "bifurcation";
    const CurveSpec c = default_curve(spec);
    const Vector center = c.center, u = c.u, v = c.v;
    TransverseDisk disk = planar_disk(PhasePoint(center), u, v, c.radius);
    const MaslovResult r = maslov_index(sys, disk_boundary(disk), mo);
    std::ostringstream name;
    name << "bifurcation eps=" << eps;
    ctx.table.check(name.str() + " mu", r.index, 2, r.index == 2 && r.residual < 0.01);
    if (eps != 0.0) {
      disk.preimages = find_disk_preimages(sys, disk.map, ctx.cfg.disk_grid);
      const int sum = disk_index_formula(sys, disk).index;
      ctx.table.check(name.str() + " disk sum", sum, r.index, sum == r.index);
    }
  }
  for (int n : {3, 4, 5}) {
    const RotationalSystem rot = make_rotational(n, "(p2 + r2)/2");
    const PhasePoint z(default_rotational_point(n));
    const int mu12 = maslov_index(rot.system, rotational_action_curve(rot, z, RotationalAction::L12), mo).index;
    ctx.table.check("n=" + std::to_string(n) + " mu_12", mu12, 0, mu12 == 0);
    for (int m = 3; m <= n; ++m) {
      const int mu = maslov_index(rot.system, rotational_action_curve(rot, z, RotationalAction::Lm, m), mo).index;
      ctx.table.check("n=" + std::to_string(n) + " mu_(" + std::to_string(m) + ")", mu, 2 * (m - 2), mu == 2 * (m - 2));
    }
  }
  struct Circle {
    const char* system;
    double a;
    double center;
    double radius;
    int expected;
  };
  const Circle circles[] = {{"double_well", 0, -1.0, 0.5, -2}, {"double_well", 0, 0.0, 0.5, 2},
                            {"double_well", 0, -0.5, 0.8, 0},  {"double_well", 0, 0.0, 3.0, -2},
                            {"cubic", 0.04, -0.2, 0.1, -2},    {"cubic", 0.04, 0.2, 0.1, 2},
                            {"cubic", 0.04, 0.0, 1.0, 0},      {"cubic", 0.0, 0.0, 0.3, 0}};
  for (const auto& c : circles) {
    SystemOptions opts;
    opts.box_half_width = 2.0;
    const IntegrableSystem sys = make_one_freedom(c.system, {{"a", c.a}}, opts);
    const double x0 = c.center, r0 = c.radius;
    const ClosedCurve curve([x0, r0](double s) {
      const double t = 2.0 * std::numbers::pi * s;
      return PhasePoint{x0 + r0 * std::cos(t), r0 * std::sin(t)};
    });
    const int mu = maslov_index(sys, curve, mo).index;
    std::ostringstream name;
    name << sys.label() << " circle(" << c.center << ", " << c.radius << ")";
    ctx.table.check(name.str(), mu, c.expected, mu == c.expected);
  }
  {
    const RotationalSystem rot = make_rotational(3, "(p2 + r2)/2");
    const Eigen::Vector3d nh = Eigen::Vector3d(1, 1, 1).normalized();
    const Eigen::Vector3d vh = Eigen::Vector3d(1, -1, 0).normalized();
    const Eigen::Vector3d wh = nh.cross(vh);
    const double a = 0.8, b = 0.5, eps = 1e-2;
    const ClosedCurve loop([=](double s) {
      const double t = 2.0 * std::numbers::pi * s;
      Vector z(6);
      z << a * nh, b * nh + eps * (std::cos(t) * vh + std::sin(t) * wh);
      return PhasePoint(z);
    });
    const int mu = maslov_index(rot.system, loop, mo).index;
    ctx.table.check("3-radial loop", mu, 0, mu == 0);
  }
  {
    const IntegrableSystem sys = make_product_system(true);
    const LiapunovReport r = kappa_H_and_sum_rule(sys, PhasePoint{0, 1, 0, 0}, ctx.cfg.liapunov);
    ctx.table.check("product kappa_H", r.kappa_H, 1.0, std::abs(r.kappa_H - 1.0) <= 0.03);
    ctx.table.check("product sum rule residual", r.sum_rule_residual, "<= 0.02", r.sum_rule_residual <= 0.02);
    const IntegrableSystem ell = make_product_system(false);
    const LiapunovEstimate e = direct_liapunov(ell, PhasePoint{0, 1, 0, 0}, 50.0, 1.0);
    ctx.table.check("elliptic direct exponent", e.exponent, "<= 0.02", e.exponent <= 0.02);
  }
}

void run_verify(Context& ctx) {
  ctx.details["suite"] = ctx.cfg.verify_suite;
  if (ctx.cfg.verify_suite == "reference") verify_reference(ctx);
  else verify_system(ctx);
}

json error_json(const char* type, const std::string& message) { return json{{"type", type}, {"message", message}}; }

}  // namespace

int run_scenario(const RunConfig& cfg, const std::string& out_dir, bool verbose, std::ostream& out, std::ostream& err) {
  json record;
  record["tool"] = "maslov";
  record["scenario"] = to_string(cfg.scenario);
  record["config"] = cfg.path;

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  const std::string json_name = cfg.json_name.empty() ? std::string(to_string(cfg.scenario)) + ".json" : cfg.json_name;
  int code = kExitOk;

  std::optional<Context> ctx;
  try {
    std::filesystem::create_directories(dir);
    const bool needs_system = !(cfg.scenario == Scenario::Verify && cfg.verify_suite == "reference");
    if (needs_system && cfg.system.builtin.empty() && cfg.system.fields.empty())
      throw ConfigError("missing [system] section", "system", 0);
    BuiltSystem built = needs_system ? build_system(cfg.system) : BuiltSystem{make_one_freedom("harmonic"), {}};
    ctx.emplace(Context{cfg, std::move(built), {}, json::object(), dir, verbose, err});
    if (needs_system) {
      const IntegrableSystem& s = ctx->sys();
      const InvolutionReport& inv = s.involution();
      record["system"] = json{{"label", s.label()},
                              {"freedoms", s.freedoms()},
                              {"weights", vec(s.weights())},
                              {"involution", {{"max_abs", inv.max_abs}, {"samples", inv.samples}, {"tol", inv.tol}}}};
    }
    if (verbose) err << "running " << to_string(cfg.scenario) << " from " << cfg.path << "\n";
    switch (cfg.scenario) {
      case Scenario::Index: run_index(*ctx); break;
      case Scenario::Singularities: run_singularities(*ctx); break;
      case Scenario::Liapunov: run_liapunov(*ctx); break;
      case Scenario::Verify: run_verify(*ctx); break;
    }
    if (ctx->table.failures() > 0 || ctx->failures > 0) code = kExitNumerical;
    record["status"] = code == kExitOk ? "ok" : "failed";
  } catch (const NumericalError& e) {
    code = kExitNumerical;
    record["status"] = "error";
    record["error"] = error_json("numerical", e.what());
    record["error"]["kind"] = to_string(e.kind());
  } catch (const ConfigError& e) {
    code = kExitConfig;
    record["status"] = "error";
    record["error"] = error_json("config", e.what());
  } catch (const BuildError& e) {
    code = kExitConfig;
    record["status"] = "error";
    record["error"] = error_json("build", e.what());
  } catch (const ParseError& e) {
    code = kExitConfig;
    record["status"] = "error";
    record["error"] = error_json("parse", e.what());
  } catch (const DimensionError& e) {
    code = kExitConfig;
    record["status"] = "error";
    record["error"] = error_json("dimension", e.what());
  } catch (const DomainError& e) {
    // Domain errors here come from evaluating the system along the run.
    code = kExitNumerical;
    record["status"] = "error";
    record["error"] = error_json("domain", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    code = kExitConfig;
    record["status"] = "error";
    record["error"] = error_json("io", e.what());
  }

  if (ctx) {
    record["table"] = ctx->table.rows();
    record["details"] = ctx->details;
  }
  record["exit_code"] = code;

  out << "maslov " << to_string(cfg.scenario);
  if (record.contains("system")) out << "  " << record["system"]["label"].get<std::string>();
  out << "\n";
  if (ctx) ctx->table.print(out);
  if (record.contains("error")) {
    out << "  error: " << record["error"]["message"].get<std::string>() << "\n";
    err << "error: " << record["error"]["message"].get<std::string>() << "\n";
  }

  std::ofstream f(dir / json_name);
  if (f) {
    f << record.dump(2) << "\n";
  } else {
    err << "error: cannot write " << (dir / json_name).string() << "\n";
    if (code == kExitOk) code = kExitConfig;
  }
  return code;
}

void write_config_failure(const std::string& out_dir, const std::string& scenario, const std::string& config_path,
                          const std::string& message) {
  json record;
  record["tool"] = "maslov";
  record["scenario"] = scenario;
  record["config"] = config_path;
  record["status"] = "error";
  record["error"] = error_json("config", message);
  record["exit_code"] = static_cast<int>(kExitConfig);
  std::error_code ec;
  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(dir / (scenario + ".json"));
  if (f) f << record.dump(2) << "\n";
}

}  // namespace maslov
