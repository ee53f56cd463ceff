#include "maslov/maslov.hpp"

#include "maslov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace maslov {

ClosedCurve::ClosedCurve(Map map, std::string label) : map_(std::move(map)), label_(std::move(label)) {
  if (!map_) throw DomainError("closed curve needs a parameterization");
}

ClosedCurve ClosedCurve::from_samples(std::vector<PhasePoint> samples, std::string label) {
  if (samples.size() < 3) throw DomainError("a sampled closed curve needs at least three samples");
  const Eigen::Index d = samples.front().size();
  for (const auto& p : samples)
    if (p.size() != d) throw DimensionError("curve samples differ in dimension");
  auto shared = std::make_shared<const std::vector<PhasePoint>>(std::move(samples));
  return ClosedCurve(
      [shared](double s) {
        const auto& pts = *shared;
        const double segs = static_cast<double>(pts.size() - 1);
        const double t = std::clamp(s, 0.0, 1.0) * segs;
        const auto i = std::min(static_cast<std::size_t>(t), pts.size() - 2);
        const double f = t - static_cast<double>(i);
        return PhasePoint(Vector((1.0 - f) * pts[i].z() + f * pts[i + 1].z()));
      },
      std::move(label));
}

ClosedCurve ClosedCurve::reversed() const {
  Map m = map_;
  return ClosedCurve([m](double s) { return m(1.0 - s); }, label_.empty() ? label_ : label_ + " (reversed)");
}

namespace {

struct Sample {
  double s;
  std::complex<double> det;
};

class Walker {
 public:
  Walker(const IntegrableSystem& sys, const ClosedCurve& curve, const MaslovOptions& opts, double threshold,
         std::vector<TracePoint>* trace)
      : sys_(sys), curve_(curve), opts_(opts), threshold_(threshold), trace_(trace) {}

  Sample eval(double s) {
    const std::complex<double> d = det_M(sys_, curve_(s));
    const double a = std::abs(d);
    min_abs_ = std::min(min_abs_, a);
    if (!std::isfinite(a)) {
      std::ostringstream os;
      os << "det M is not finite at s = " << s;
      throw NumericalError(NumericalErrorKind::UnresolvablePhase, os.str());
    }
    if (a < threshold_) {
      std::ostringstream os;
      os << "curve meets the singular set near s = " << s << " (|det M| = " << a << ")";
      throw NumericalError(NumericalErrorKind::CurveHitsSingularSet, os.str());
    }
    return {s, d};
  }

  void start(const Sample& a) {
    total_ = 0.0;
    if (trace_) trace_->push_back({a.s, a.det, std::arg(a.det)});
  }

  void segment(const Sample& a, const Sample& b, int depth) {
    const double step = std::arg(b.det / a.det);
    if (std::abs(step) < opts_.max_phase_step) {
      total_ += step;
      max_depth_ = std::max(max_depth_, depth);
      if (trace_) trace_->push_back({b.s, b.det, trace_->front().unwrapped_arg + total_});
      return;
    }
    if (depth >= opts_.max_depth) {
      std::ostringstream os;
      os << "phase of det M jumps by " << step << " on [" << a.s << ", " << b.s << "] at refinement depth "
         << depth;
      throw NumericalError(NumericalErrorKind::UnresolvablePhase, os.str());
    }
    const Sample m = eval(0.5 * (a.s + b.s));
    segment(a, m, depth + 1);
    segment(m, b, depth + 1);
  }

  double total() const { return total_; }
  int max_depth() const { return max_depth_; }
  double min_abs() const { return min_abs_; }

 private:
  const IntegrableSystem& sys_;
  const ClosedCurve& curve_;
  const MaslovOptions& opts_;
  double threshold_;
  std::vector<TracePoint>* trace_;
  double total_ = 0.0;
  int max_depth_ = 0;
  double min_abs_ = std::numeric_limits<double>::infinity();
};

double median_abs(const std::vector<std::complex<double>>& dets) {
  std::vector<double> a;
  a.reserve(dets.size());
  for (const auto& d : dets) a.push_back(std::abs(d));
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid;
}

// Unwraps over [s0, s1] split into `segments` equal pieces.
double unwrap(const IntegrableSystem& sys, const ClosedCurve& curve, double s0, double s1, int segments,
              const MaslovOptions& opts, MaslovResult* result) {
  if (segments < 1) throw DomainError("initial sample count must be positive");
  std::vector<double> s(static_cast<std::size_t>(segments) + 1);
  std::vector<std::complex<double>> dets(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = s0 + (s1 - s0) * static_cast<double>(k) / segments;
    dets[k] = det_M(sys, curve(s[k]));
  }
  const double med = median_abs(dets);
  if (!(med > 0.0) || !std::isfinite(med))
    throw NumericalError(NumericalErrorKind::CurveHitsSingularSet, "det M vanishes on most of the curve");
  const double threshold = opts.proximity_rel * med;

  Walker w(sys, curve, opts, threshold, result ? &result->trace : nullptr);
  std::vector<Sample> samples;
  for (const double sk : s) samples.push_back(w.eval(sk));
  w.start(samples.front());
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) w.segment(samples[k], samples[k + 1], 0);
  if (result) {
    result->refinement_depth = w.max_depth();
    result->min_abs_det = w.min_abs();
    result->proximity_threshold = threshold;
  }
  return w.total() / std::numbers::pi;
}

}  // namespace

MaslovResult maslov_index(const IntegrableSystem& sys, const ClosedCurve& curve, const MaslovOptions& opts) {
  const PhasePoint z0 = curve(0.0);
  const PhasePoint z1 = curve(1.0);
  if (z0.size() != sys.dimension()) throw DimensionError("curve and system differ in dimension");
  const double gap = (z1.z() - z0.z()).norm();
  if (gap > opts.closure_rel * std::max(1.0, z0.z().norm())) {
    std::ostringstream os;
    os << "curve is not closed: |z(1) - z(0)| = " << gap;
    throw DomainError(os.str());
  }
  MaslovResult r;
  r.raw = unwrap(sys, curve, 0.0, 1.0, opts.initial_samples, opts, &r);
  const double idx = std::round(r.raw);
  r.index = static_cast<int>(idx);
  r.residual = std::abs(r.raw - idx);
  if (r.residual > opts.residual_tol) {
    std::ostringstream os;
    os << "phase change " << r.raw << " pi is not an integer multiple of pi";
    throw NumericalError(NumericalErrorKind::Inconsistency, os.str());
  }
  if (r.index % 2 != 0) {
    std::ostringstream os;
    os << "odd index " << r.index << " on a closed curve";
    throw NumericalError(NumericalErrorKind::Inconsistency, os.str());
  }
  return r;
}

double phase_increment(const IntegrableSystem& sys, const ClosedCurve& curve, double s0, double s1,
                       const MaslovOptions& opts) {
  if (s1 == s0) return 0.0;
  const int segs = std::max(1, static_cast<int>(std::ceil(opts.initial_samples * std::abs(s1 - s0))));
  return unwrap(sys, curve, s0, s1, segs, opts, nullptr);
}

ProjectedPair project_onto_image(const SingularityData& data, const TransverseSplit& split, const TangentVector& u,
                                 const TangentVector& v) {
  const Eigen::Index d = split.image.rows();
  if (u.size() != d || v.size() != d) throw DimensionError("tangent vectors must live in R^{2n}");
  Matrix frame(d, d);
  frame << split.image, split.kernel;
  Eigen::FullPivLU<Matrix> lu(frame);
  if (!lu.isInvertible()) throw NumericalError(NumericalErrorKind::Degenerate, "eta, theta and ker K^2 do not span");
  ProjectedPair out;
  out.u = lu.solve(u).head<2>();
  out.v = lu.solve(v).head<2>();
  const double cross = out.u[0] * out.v[1] - out.u[1] * out.v[0];
  out.bracket = cross * symplectic_product(data.eta, data.theta);
  return out;
}

namespace {

int sgn(double x) { return (x > 0) - (x < 0); }

void require_nondegenerate(const SingularityData& data) {
  if (data.corank != 1) {
    std::ostringstream os;
    os << "expected a corank-one singular point, found corank " << data.corank;
    throw NumericalError(NumericalErrorKind::WrongCorank, os.str());
  }
  if (data.kind == SingularityKind::DegenerateCorank1)
    throw NumericalError(NumericalErrorKind::Degenerate, "singular point has tau = 0");
}

// sigma from the projections; throws when they are dependent.
int projected_orientation(const ProjectedPair& pr) {
  const double cross = pr.u[0] * pr.v[1] - pr.u[1] * pr.v[0];
  if (std::abs(cross) <= 1e-8 * pr.u.norm() * pr.v.norm() || pr.u.norm() == 0.0 || pr.v.norm() == 0.0)
    throw NumericalError(NumericalErrorKind::NonTransverse, "projections of u and v onto im K^2 are dependent");
  return sgn(pr.bracket);
}

}  // namespace

int local_maslov_index(const IntegrableSystem& sys, const PhasePoint& x, const TangentVector& u,
                       const TangentVector& v) {
  const SingularityData data = tau_and_classify(sys, x);
  require_nondegenerate(data);
  const TransverseSplit split = transverse_split(data);
  return 2 * projected_orientation(project_onto_image(data, split, u, v)) * sgn(data.tau);
}

ClosedCurve epsilon_circle(const PhasePoint& x, const TangentVector& u, const TangentVector& v, double eps) {
  const Vector base = x.z();
  return ClosedCurve([base, u, v, eps](double s) {
    const double t = 2.0 * std::numbers::pi * s;
    return PhasePoint(Vector(base + eps * (std::cos(t) * u + std::sin(t) * v)));
  });
}

LocalIndexCheck verify_local_index(const IntegrableSystem& sys, const PhasePoint& x, const TangentVector& u,
                                   const TangentVector& v, double eps, const MaslovOptions& opts) {
  LocalIndexCheck out;
  out.eps = eps;
  out.formula = local_maslov_index(sys, x, u, v);
  out.winding = maslov_index(sys, epsilon_circle(x, u, v, eps), opts).index;
  out.agree = out.formula == out.winding;
  return out;
}

ClosedCurve disk_boundary(const TransverseDisk& disk) {
  auto map = disk.map;
  return ClosedCurve(
      [map](double s) {
        const double t = 2.0 * std::numbers::pi * s;
        return map(std::cos(t), std::sin(t));
      },
      disk.label);
}

namespace {

using DiskMap = std::function<PhasePoint(double, double)>;

Eigen::Vector2d disk_det(const IntegrableSystem& sys, const DiskMap& map, const Eigen::Vector2d& e) {
  const auto d = det_M(sys, map(e[0], e[1]));
  return {d.real(), d.imag()};
}

bool disk_newton(const IntegrableSystem& sys, const DiskMap& map, Eigen::Vector2d& e) {
  for (int iter = 0; iter < 60; ++iter) {
    const Eigen::Vector2d f = disk_det(sys, map, e);
    if (f.norm() == 0.0) return true;
    Eigen::Matrix2d J;
    for (int i = 0; i < 2; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(e[i]));
      Eigen::Vector2d ep = e, em = e;
      ep[i] += h;
      em[i] -= h;
      J.col(i) = (disk_det(sys, map, ep) - disk_det(sys, map, em)) / (2.0 * h);
    }
    if (f.norm() <= 1e-13 * J.norm() * std::max(1.0, e.norm())) return true;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[0] == 0.0) return false;
    Eigen::Vector2d w = svd.matrixU().transpose() * f;
    for (int i = 0; i < 2; ++i) w[i] = sv[i] > 1e-10 * sv[0] ? w[i] / sv[i] : 0.0;
    Eigen::Vector2d step = -(svd.matrixV() * w);
    if (step.norm() > 0.25) step *= 0.25 / step.norm();
    e += step;
    if (!e.allFinite() || e.norm() > 2.0) return false;
  }
  return false;
}

}  // namespace

DiskFormulaResult disk_index_formula(const IntegrableSystem& sys, const TransverseDisk& disk) {
  if (!disk.tangents.empty() && disk.tangents.size() != disk.preimages.size())
    throw DimensionError("disk tangents must be given for every preimage or for none");
  DiskFormulaResult out;
  for (std::size_t j = 0; j < disk.preimages.size(); ++j) {
    DiskTerm t;
    Eigen::Vector2d e = disk.preimages[j];
    if (corank_at(sys, disk.map(e[0], e[1])) != 1 && !disk_newton(sys, disk.map, e)) {
      std::ostringstream os;
      os << "disk point (" << e[0] << ", " << e[1] << ") is not on the singular set";
      throw NumericalError(NumericalErrorKind::NoConvergence, os.str());
    }
    t.preimage = e;
    t.point = disk.map(e[0], e[1]);
    const SingularityData data = tau_and_classify(sys, t.point);
    require_nondegenerate(data);
    t.kind = data.kind;
    TangentVector u, v;
    if (!disk.tangents.empty()) {
      u = disk.tangents[j].first;
      v = disk.tangents[j].second;
    } else {
      const double h = 1e-6;
      u = (disk.map(e[0] + h, e[1]).z() - disk.map(e[0] - h, e[1]).z()) / (2 * h);
      v = (disk.map(e[0], e[1] + h).z() - disk.map(e[0], e[1] - h).z()) / (2 * h);
    }
    const TransverseSplit split = transverse_split(data);
    t.sigma = projected_orientation(project_onto_image(data, split, u, v));
    t.tau_sign = sgn(data.tau);
    t.sigma_alt = t.tau_sign * sgn(symplectic_product(data.K * (data.K * u), v));
    if (t.sigma_alt != t.sigma)
      throw NumericalError(NumericalErrorKind::Inconsistency, "the two orientation formulas disagree");
    t.contribution = 2 * t.sigma * t.tau_sign;
    out.index += t.contribution;
    out.terms.push_back(t);
  }
  return out;
}

std::vector<Eigen::Vector2d> find_disk_preimages(const IntegrableSystem& sys, const DiskMap& map, int grid) {
  if (grid < 2) throw DomainError("disk search grid must have at least two cells per side");
  // The grid is offset so that lattice-symmetric zeros do not land on nodes.
  const double h = 2.2 / grid;
  const double x0 = -1.1 - 0.381966 * h;
  const int nodes = grid + 2;
  std::vector<std::complex<double>> det(static_cast<std::size_t>(nodes * nodes));
  auto at = [&](int i, int j) -> std::complex<double>& { return det[static_cast<std::size_t>(i * nodes + j)]; };
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) at(i, j) = det_M(sys, map(x0 + i * h, x0 + j * h));

  std::vector<Eigen::Vector2d> seeds;
  for (int i = 0; i + 1 < nodes; ++i) {
    for (int j = 0; j + 1 < nodes; ++j) {
      const std::complex<double> c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      bool zero = false;
      double wind = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (std::abs(c[k]) == 0.0) zero = true;
        else if (std::abs(c[(k + 1) % 4]) != 0.0) wind += std::arg(c[(k + 1) % 4] / c[k]);
      }
      if (zero || std::abs(wind) > std::numbers::pi) seeds.emplace_back(x0 + (i + 0.5) * h, x0 + (j + 0.5) * h);
    }
  }
  std::vector<Eigen::Vector2d> found;
  for (Eigen::Vector2d e : seeds) {
    if (!disk_newton(sys, map, e)) continue;
    if (e.norm() >= 1.0) continue;
    bool dup = false;
    for (const auto& f : found) dup = dup || (f - e).norm() < 1e-6;
    if (!dup) found.push_back(e);
  }
  std::sort(found.begin(), found.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1]; });
  return found;
}

TransverseDisk planar_disk(const PhasePoint& center, const TangentVector& a, const TangentVector& b, double r) {
  if (a.size() != center.size() || b.size() != center.size()) throw DimensionError("disk directions must match the center");
  TransverseDisk disk;
  const Vector c = center.z();
  disk.map = [c, a, b, r](double x, double y) { return PhasePoint(Vector(c + r * (x * a + y * b))); };
  return disk;
}

}  // namespace maslov
