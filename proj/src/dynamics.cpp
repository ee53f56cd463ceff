#include "maslov/dynamics.hpp"

#include "maslov/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace maslov {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

Vector resolve_weights(const IntegrableSystem& sys, const Vector& w) {
  if (w.size() == 0) return sys.weights();
  if (w.size() != sys.freedoms()) throw DimensionError("flow weights need one entry per integral");
  if (!w.allFinite()) throw DomainError("flow weights must be finite");
  return w;
}

// Watches every accepted step: invariant drift, escape from the safety ball, step budget.
class Monitor {
 public:
  Monitor(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec)
      : sys_(sys), spec_(spec), f0_(sys.values(z0)), drift_(Vector::Zero(sys.freedoms())) {
    scale_ = std::max(1.0, f0_.cwiseAbs().maxCoeff());
    radius_ = spec.safety_radius > 0 ? spec.safety_radius : 1e3 * std::max(1.0, z0.z().norm());
  }

  void check(const double* z, double t) {
    const int d = sys_.dimension();
    Eigen::Map<const Vector> zm(z, d);
    if (!zm.allFinite()) fail(NumericalErrorKind::IntegrationQuality, "state is no longer finite", t);
    if (zm.norm() > radius_) fail(NumericalErrorKind::CompactnessViolation, "trajectory left the safety ball", t);
    const Vector f = sys_.values(PhasePoint(Vector(zm)));
    drift_ = drift_.cwiseMax((f - f0_).cwiseAbs());
    if (drift_.maxCoeff() > spec_.drift_tol * scale_) {
      std::ostringstream os;
      os << "invariant drift " << drift_.maxCoeff() << " exceeds " << spec_.drift_tol * scale_;
      fail(NumericalErrorKind::IntegrationQuality, os.str(), t);
    }
    if (++steps_ > spec_.max_steps) fail(NumericalErrorKind::IntegrationQuality, "step budget exhausted", t);
  }

  const Vector& drift() const { return drift_; }
  double scale() const { return scale_; }
  long steps() const { return steps_; }

 private:
  [[noreturn]] void fail(NumericalErrorKind kind, const std::string& what, double t) {
    std::ostringstream os;
    os << what << " at t = " << t;
    throw NumericalError(kind, os.str());
  }

  const IntegrableSystem& sys_;
  const FlowSpec& spec_;
  Vector f0_;
  Vector drift_;
  double scale_ = 1.0;
  double radius_ = 0.0;
  long steps_ = 0;
};

// Gradient and Hessian of sum_a w_a F_a.
struct Generator {
  const IntegrableSystem& sys;
  Vector w;

  void operator()(const PhasePoint& z, Vector& grad, Matrix* hess) const {
    const int d = sys.dimension();
    grad.setZero(d);
    if (hess) hess->setZero(d, d);
    for (int a = 0; a < sys.freedoms(); ++a) {
      if (w[a] == 0.0) continue;
      if (hess) {
        const FieldJet j = sys.field(a).jet(z);
        grad += w[a] * j.grad;
        *hess += w[a] * j.hess;
      } else {
        grad += w[a] * sys.field(a).grad(z);
      }
    }
  }
};

template <class Rhs, class Observer>
void run(Rhs&& rhs, State& x, double t0, double t1, const FlowSpec& spec, Observer&& obs) {
  if (!(t1 > t0)) {
    obs(x, t0);
    return;
  }
  auto stepper = odeint::make_controlled(spec.abs_tol, spec.rel_tol, spec.max_dt, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min({spec.max_dt, 1e-2, t1 - t0});
  try {
    odeint::integrate_adaptive(stepper, rhs, x, t0, t1, dt0, obs);
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(NumericalErrorKind::IntegrationQuality, std::string("integrator failed: ") + e.what());
  }
}

State to_state(const Vector& v) { return State(v.data(), v.data() + v.size()); }

PhasePoint head_point(const State& x, int d) { return PhasePoint(Vector(Eigen::Map<const Vector>(x.data(), d))); }

}  // namespace

Trajectory integrate_flow(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec) {
  if (z0.size() != sys.dimension()) throw DimensionError("initial point and system differ in dimension");
  if (!std::isfinite(spec.t_end) || spec.t_end < 0) throw DomainError("flow time must be finite and non-negative");
  const Generator gen{sys, resolve_weights(sys, spec.weights)};
  const int d = sys.dimension();
  Monitor mon(sys, z0, spec);
  Trajectory tr;
  State x = to_state(z0.z());
  auto rhs = [&](const State& s, State& dx, double) {
    Vector g;
    gen(head_point(s, d), g, nullptr);
    const Vector f = apply_J(g);
    std::copy(f.data(), f.data() + d, dx.begin());
  };
  run(rhs, x, 0.0, spec.t_end, spec, [&](const State& s, double t) {
    mon.check(s.data(), t);
    tr.t.push_back(t);
    tr.z.push_back(Eigen::Map<const Vector>(s.data(), d));
  });
  tr.drift = mon.drift();
  tr.drift_scale = mon.scale();
  tr.steps = mon.steps();
  return tr;
}

PhasePoint flow_point(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec) {
  return integrate_flow(sys, z0, spec).final_point();
}

double symplectic_defect(const Matrix& S) {
  const Matrix J = symplectic_J(static_cast<int>(S.rows() / 2));
  const double s2 = Eigen::JacobiSVD<Matrix>(S).singularValues()[0];
  return (S.transpose() * J * S - J).cwiseAbs().maxCoeff() / std::max(1.0, s2 * s2);
}

LinearizedFlow linearized_flow(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec) {
  if (z0.size() != sys.dimension()) throw DimensionError("initial point and system differ in dimension");
  const Generator gen{sys, resolve_weights(sys, spec.weights)};
  const int d = sys.dimension();
  const Matrix J = symplectic_J(sys.freedoms());
  Monitor mon(sys, z0, spec);
  State x(static_cast<std::size_t>(d + d * d));
  std::copy(z0.z().data(), z0.z().data() + d, x.begin());
  Eigen::Map<Matrix>(x.data() + d, d, d).setIdentity();
  auto rhs = [&](const State& s, State& dx, double) {
    Vector g;
    Matrix H;
    gen(head_point(s, d), g, &H);
    Eigen::Map<Vector>(dx.data(), d) = apply_J(g);
    Eigen::Map<Matrix>(dx.data() + d, d, d) = J * H * Eigen::Map<const Matrix>(s.data() + d, d, d);
  };
  run(rhs, x, 0.0, spec.t_end, spec, [&](const State& s, double t) { mon.check(s.data(), t); });
  LinearizedFlow out;
  out.final_point = head_point(x, d);
  out.S = Eigen::Map<const Matrix>(x.data() + d, d, d);
  out.symplectic_defect = symplectic_defect(out.S);
  out.drift = mon.drift();
  out.steps = mon.steps();
  if (out.symplectic_defect > spec.sympl_tol) {
    std::ostringstream os;
    os << "linearized flow lost symplecticity: defect " << out.symplectic_defect;
    throw NumericalError(NumericalErrorKind::IntegrationQuality, os.str());
  }
  return out;
}

namespace {

SingularityData require_nondegenerate(const IntegrableSystem& sys, const PhasePoint& x) {
  SingularityData data = tau_and_classify(sys, x);
  if (data.corank != 1) {
    std::ostringstream os;
    os << "expected a corank-one point, found corank " << data.corank;
    throw NumericalError(NumericalErrorKind::WrongCorank, os.str());
  }
  if (data.kind == SingularityKind::DegenerateCorank1)
    throw NumericalError(NumericalErrorKind::Degenerate, "point has tau = 0");
  return data;
}

}  // namespace

LiapunovEstimate direct_liapunov(const IntegrableSystem& sys, const PhasePoint& x, double T, double renorm_dt,
                                 double transient, const FlowSpec& base) {
  if (!(T > 0) || !(renorm_dt > 0)) throw DomainError("averaging time and renormalization step must be positive");
  const SingularityData data = require_nondegenerate(sys, x);
  LiapunovEstimate out;
  out.transient = transient < 0 ? 0.1 * T : std::min(transient, 0.5 * T);

  FlowSpec spec = base;
  const Generator gen{sys, resolve_weights(sys, spec.weights)};
  const int d = sys.dimension();
  Monitor mon(sys, x, spec);

  // eta + theta can be an exact stable direction, so the seed mixes them unevenly.
  Vector v = data.eta + 0.6180339887498949 * data.theta;
  v.normalize();
  State s(static_cast<std::size_t>(2 * d));
  std::copy(x.z().data(), x.z().data() + d, s.begin());
  std::copy(v.data(), v.data() + d, s.begin() + d);

  auto rhs = [&](const State& st, State& dx, double) {
    Vector g;
    Matrix H;
    gen(head_point(st, d), g, &H);
    Eigen::Map<Vector>(dx.data(), d) = apply_J(g);
    Eigen::Map<Vector>(dx.data() + d, d) = apply_J(H * Eigen::Map<const Vector>(st.data() + d, d));
  };

  const double half = out.transient + 0.5 * (T - out.transient);
  double sum = 0.0, half_sum = 0.0, half_time = 0.0, t = 0.0;
  while (t < T) {
    const double t1 = std::min(T, t + renorm_dt);
    run(rhs, s, t, t1, spec, [&](const State& st, double tt) { mon.check(st.data(), tt); });
    Eigen::Map<Vector> w(s.data() + d, d);
    const double norm = w.norm();
    if (!(norm > 0) || !std::isfinite(norm))
      throw NumericalError(NumericalErrorKind::IntegrationQuality, "tangent vector collapsed or overflowed");
    w /= norm;
    ++out.renormalizations;
    if (t1 > out.transient) {
      const double frac = (t1 - std::max(t, out.transient)) / (t1 - t);
      sum += frac * std::log(norm);
      if (t1 <= half + 1e-12) {
        half_sum += frac * std::log(norm);
        half_time += t1 - std::max(t, out.transient);
      }
    }
    t = t1;
  }
  out.exponent = sum / (T - out.transient);
  out.half_exponent = half_time > 0 ? half_sum / half_time : out.exponent;
  return out;
}

Matrix projector_P(const IntegrableSystem& sys, const PhasePoint& x_s, const Vector& c, double tau_root) {
  if (!(tau_root > 0)) throw NumericalError(NumericalErrorKind::Degenerate, "projector needs tau > 0");
  const Matrix K = K_matrix(sys, x_s, c);
  const Eigen::Index d = K.rows();
  const Matrix Q = (K + tau_root * Matrix::Identity(d, d)) * K * K;
  const double tr = (Q.transpose() * Q).trace();
  if (!(tr > 0)) throw NumericalError(NumericalErrorKind::Degenerate, "projector numerator vanishes");
  const Matrix P = Q * Q.transpose() / tr;
  Eigen::JacobiSVD<Matrix> svd(P);
  if (svd.singularValues().size() > 1 && svd.singularValues()[1] > 1e-8 * svd.singularValues()[0])
    throw NumericalError(NumericalErrorKind::Degenerate, "projector does not have rank one");
  return P;
}

Vector default_ergodic_weights(int n) {
  Vector w(n);
  for (int a = 0; a < n; ++a) w[a] = std::sqrt(static_cast<double>(a + 1));
  return w / w.norm();
}

AverageResult torus_average(const IntegrableSystem& sys, const PhasePoint& x, const AverageSpec& spec) {
  const SingularityData data = require_nondegenerate(sys, x);
  if (data.kind != SingularityKind::Hyperbolic)
    throw NumericalError(NumericalErrorKind::Degenerate, "torus averages of the projector need tau > 0");
  if (!(spec.window > 0) || spec.min_windows < 1 || spec.max_windows < spec.min_windows)
    throw DomainError("invalid averaging windows");
  const double tau_root = std::sqrt(data.tau);
  const int n = sys.freedoms();
  const int d = sys.dimension();
  const Matrix J = symplectic_J(n);

  FlowSpec flow = spec.flow;
  flow.weights = spec.weights.size() ? resolve_weights(sys, spec.weights) : default_ergodic_weights(n);
  const Generator gen{sys, flow.weights};
  Monitor mon(sys, x, flow);

  State s(static_cast<std::size_t>(d + n), 0.0);
  std::copy(x.z().data(), x.z().data() + d, s.begin());
  auto rhs = [&](const State& st, State& dx, double) {
    const PhasePoint z = head_point(st, d);
    std::vector<Matrix> hess(static_cast<std::size_t>(n));
    Vector g = Vector::Zero(d);
    Matrix Kbar = Matrix::Zero(d, d);
    for (int a = 0; a < n; ++a) {
      const FieldJet j = sys.field(a).jet(z);
      g += flow.weights[a] * j.grad;
      hess[static_cast<std::size_t>(a)] = j.hess;
      Kbar += data.c[a] * j.hess;
    }
    Kbar = J * Kbar;
    const Matrix Q = (Kbar + tau_root * Matrix::Identity(d, d)) * Kbar * Kbar;
    const Matrix P = Q * Q.transpose() / (Q.transpose() * Q).trace();
    Eigen::Map<Vector>(dx.data(), d) = apply_J(g);
    for (int a = 0; a < n; ++a) dx[static_cast<std::size_t>(d + a)] = (P * J * hess[static_cast<std::size_t>(a)]).trace();
  };

  AverageResult out;
  std::vector<Vector> means;
  Vector prev;
  for (int k = 0; k < spec.max_windows; ++k) {
    const double t0 = k * spec.window, t1 = (k + 1) * spec.window;
    run(rhs, s, t0, t1, flow, [&](const State& st, double tt) { mon.check(st.data(), tt); });
    const Vector mean = Eigen::Map<const Vector>(s.data() + d, n) / t1;
    means.push_back(mean);
    out.last_change = prev.size() ? (mean - prev).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    prev = mean;
    if (k + 1 >= spec.min_windows && out.last_change < spec.avg_tol) break;
  }
  out.windows = static_cast<int>(means.size());
  out.window_means.resize(out.windows, n);
  for (int k = 0; k < out.windows; ++k) out.window_means.row(k) = means[static_cast<std::size_t>(k)].transpose();
  out.mean = means.back();
  if (!(out.last_change < spec.avg_tol)) {
    std::ostringstream os;
    os << "torus average did not settle in " << out.windows << " windows (last change " << out.last_change << ")";
    throw NumericalError(NumericalErrorKind::NoConvergence, os.str());
  }
  return out;
}

double kappa_alpha(const IntegrableSystem& sys, const PhasePoint& x, int alpha, const AverageSpec& spec) {
  if (alpha < 0 || alpha >= sys.freedoms()) throw DimensionError("integral index out of range");
  return std::abs(torus_average(sys, x, spec).mean[alpha]);
}

LiapunovReport kappa_H_and_sum_rule(const IntegrableSystem& sys, const PhasePoint& x, const LiapunovSpec& spec) {
  const SingularityData data = require_nondegenerate(sys, x);
  LiapunovReport r;
  r.kind = data.kind;
  r.tau = data.tau;
  r.c = data.c;
  const LiapunovEstimate direct =
      direct_liapunov(sys, x, spec.direct_T, spec.renorm_dt, spec.transient, spec.average.flow);
  r.kappa_direct = direct.exponent;
  r.kappa_direct_half = direct.half_exponent;
  if (data.kind == SingularityKind::Elliptic) {
    r.kappa_H = 0.0;
    r.cross_difference = std::abs(r.kappa_direct);
    r.cross_ok = r.cross_difference <= spec.elliptic_tol;
    return r;
  }
  r.tau_root = std::sqrt(data.tau);
  r.average = torus_average(sys, x, spec.average);
  r.kappa_alpha = r.average.mean.cwiseAbs();
  r.kappa_H = sys.weights().dot(r.kappa_alpha);
  r.sum_rule = data.c.dot(r.kappa_alpha);
  r.sum_rule_residual = std::abs(r.sum_rule - r.tau_root);
  r.cross_difference = std::abs(r.kappa_H - r.kappa_direct);
  r.cross_ok = r.cross_difference <= spec.cross_tol;
  return r;
}

TransportCheck transport_check(const IntegrableSystem& sys, const PhasePoint& x, const FlowSpec& spec) {
  const SingularityData d0 = require_nondegenerate(sys, x);
  const LinearizedFlow lf = linearized_flow(sys, x, spec);
  TransportCheck out;
  out.end = lf.final_point;
  const Vector c1 = c_vector(sys, lf.final_point);
  out.c_alignment = std::abs(c1.dot(d0.c)) / (c1.norm() * d0.c.norm());
  const Matrix K1 = K_matrix(sys, lf.final_point, c1);
  const Matrix moved = lf.S * d0.K * lf.S.inverse();
  out.K_alignment = std::abs((K1.array() * moved.array()).sum()) / (K1.norm() * moved.norm());
  return out;
}

}  // namespace maslov
