#include "maslov/singularity.hpp"

#include "maslov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace maslov {

const char* to_string(SingularityKind kind) noexcept {
  switch (kind) {
    case SingularityKind::Regular: return "regular";
    case SingularityKind::Elliptic: return "elliptic";
    case SingularityKind::Hyperbolic: return "hyperbolic";
    case SingularityKind::DegenerateCorank1: return "degenerate";
    case SingularityKind::HigherCorank: return "higher_corank";
  }
  return "?";
}

namespace {

void require_dims(const IntegrableSystem& sys, const PhasePoint& z) {
  if (z.size() != sys.dimension()) {
    std::ostringstream os;
    os << "point has dimension " << z.size() << ", system has " << sys.dimension();
    throw DimensionError(os.str());
  }
}

void require_corank_one(const IntegrableSystem& sys, const PhasePoint& y) {
  const int k = corank_at(sys, y);
  if (k != 1) {
    std::ostringstream os;
    os << "expected a corank-one point, found corank " << k;
    throw NumericalError(NumericalErrorKind::WrongCorank, os.str());
  }
}

}  // namespace

int corank_at(const IntegrableSystem& sys, const PhasePoint& z, double rel_tol) {
  require_dims(sys, z);
  const Matrix G = sys.gradient_stack(z);
  const int n = sys.freedoms();
  Eigen::JacobiSVD<Matrix> svd_g(G);
  Eigen::JacobiSVD<ComplexMatrix> svd_m(build_M(G));
  // With a single gradient the largest singular value is no scale at all, so the second
  // derivatives times |z| also bound it from below.
  double scale = svd_g.singularValues().maxCoeff();
  double curvature = 0.0;
  for (int a = 0; a < n; ++a) curvature = std::max(curvature, sys.field(a).hess(z).norm());
  scale = std::max(scale, curvature * std::max(1.0, z.z().norm()));
  if (scale == 0.0) return n;
  auto corank = [&](const Vector& sv) {
    int k = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] < rel_tol * scale) ++k;
    return k;
  };
  const int kg = corank(svd_g.singularValues());
  const int km = corank(svd_m.singularValues());
  if (kg != km) {
    std::ostringstream os;
    os << "corank of the gradients (" << kg << ") and of M (" << km << ") disagree";
    throw NumericalError(NumericalErrorKind::Ambiguity, os.str());
  }
  return kg;
}

Vector c_vector(const IntegrableSystem& sys, const PhasePoint& y) {
  require_corank_one(sys, y);
  const Matrix G = sys.gradient_stack(y);
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullU);
  Vector c = svd.matrixU().col(G.rows() - 1);
  c /= c.norm();
  const double floor = 1e-10 * c.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) > floor) {
      if (c[i] < 0) c = -c;
      break;
    }
  }
  return c;
}

ComplexVector b_vector(const IntegrableSystem& sys, const PhasePoint& y) {
  require_corank_one(sys, y);
  const ComplexMatrix M = build_M(sys, y);
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullU);
  ComplexVector b = svd.matrixU().col(M.rows() - 1).conjugate();
  b /= b.norm();
  // Ties within rounding go to the lowest index.
  Eigen::Index imax = 0;
  const double top = b.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) >= top * (1.0 - 1e-12)) {
      imax = i;
      break;
    }
  }
  b *= std::conj(b[imax]) / std::abs(b[imax]);
  b[imax] = std::abs(b[imax]);
  return b;
}

Matrix K_matrix(const IntegrableSystem& sys, const PhasePoint& z, const Vector& c) {
  require_dims(sys, z);
  if (c.size() != sys.freedoms()) throw DimensionError("c must have one entry per integral");
  const int d = sys.dimension();
  Matrix H = Matrix::Zero(d, d);
  for (int a = 0; a < sys.freedoms(); ++a) H += c[a] * sys.field(a).hess(z);
  return symplectic_J(sys.freedoms()) * H;
}

Matrix K_matrix(const IntegrableSystem& sys, const PhasePoint& y) {
  return K_matrix(sys, y, c_vector(sys, y));
}

SingularityData tau_and_classify(const IntegrableSystem& sys, const PhasePoint& y) {
  SingularityData out;
  out.point = y;
  out.corank = corank_at(sys, y);
  if (out.corank == 0) {
    out.kind = SingularityKind::Regular;
    return out;
  }
  if (out.corank >= 2) {
    out.kind = SingularityKind::HigherCorank;
    return out;
  }
  out.c = c_vector(sys, y);
  out.b = b_vector(sys, y);
  out.K = K_matrix(sys, y, out.c);
  out.tau = 0.5 * (out.K * out.K).trace();
  out.tau_tol = kTauRelTol * out.K.squaredNorm();
  const int n = sys.freedoms();
  out.beta.resize(2 * n);
  out.beta << out.b.real(), out.b.imag();
  out.eta = out.K * out.beta;
  out.theta = out.K * apply_J(out.beta);
  if (out.tau < -out.tau_tol)
    out.kind = SingularityKind::Elliptic;
  else if (out.tau > out.tau_tol)
    out.kind = SingularityKind::Hyperbolic;
  else
    out.kind = SingularityKind::DegenerateCorank1;
  return out;
}

std::pair<TangentVector, TangentVector> eta_theta(const IntegrableSystem& sys, const PhasePoint& y) {
  const SingularityData d = tau_and_classify(sys, y);
  if (d.corank != 1) {
    std::ostringstream os;
    os << "expected a corank-one point, found corank " << d.corank;
    throw NumericalError(NumericalErrorKind::WrongCorank, os.str());
  }
  return {d.eta, d.theta};
}

TransverseSplit transverse_split(const SingularityData& data) {
  if (data.corank != 1) throw NumericalError(NumericalErrorKind::WrongCorank, "transverse split needs corank one");
  if (data.kind == SingularityKind::DegenerateCorank1)
    throw NumericalError(NumericalErrorKind::Degenerate, "transverse split needs tau != 0");
  const Matrix K2 = data.K * data.K;
  const Eigen::Index d = K2.rows();
  Eigen::JacobiSVD<Matrix> svd(K2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  TransverseSplit out;
  out.image_dim = static_cast<int>(d) - numerical_corank(svd.singularValues(), d, kRankRelTol);
  if (out.image_dim != 2) {
    std::ostringstream os;
    os << "K^2 has rank " << out.image_dim << ", expected 2";
    throw NumericalError(NumericalErrorKind::Degenerate, os.str());
  }
  out.kernel = svd.matrixV().rightCols(d - 2);
  out.image.resize(d, 2);
  out.image.col(0) = data.eta;
  out.image.col(1) = data.theta;

  Eigen::JacobiSVD<Matrix> svd_img(out.image);
  if (numerical_corank(svd_img.singularValues(), 2, kRankRelTol) != 0)
    throw NumericalError(NumericalErrorKind::Degenerate, "eta and theta are linearly dependent");

  double skew = 0.0;
  for (Eigen::Index k = 0; k < out.kernel.cols(); ++k) {
    for (int w = 0; w < 2; ++w) {
      const double s = std::abs(symplectic_product(out.kernel.col(k), out.image.col(w)));
      skew = std::max(skew, s / (out.kernel.col(k).norm() * out.image.col(w).norm()));
    }
  }
  out.skew_residual = skew;

  const Matrix Q = out.image.householderQr().householderQ() * Matrix::Identity(d, 2);
  const Matrix resid = K2 - Q * (Q.transpose() * K2);
  out.image_residual = resid.norm() / K2.norm();
  return out;
}

TransverseSplit transverse_split(const IntegrableSystem& sys, const PhasePoint& x) {
  return transverse_split(tau_and_classify(sys, x));
}

namespace {

Eigen::Vector2d det_pair(const IntegrableSystem& sys, const Vector& z) {
  const std::complex<double> d = det_M(sys, PhasePoint(z));
  return {d.real(), d.imag()};
}

Matrix det_jacobian(const IntegrableSystem& sys, const Vector& z) {
  const Eigen::Index d = z.size();
  Matrix J(2, d);
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  for (Eigen::Index i = 0; i < d; ++i) {
    const double h = base * std::max(1.0, std::abs(z[i]));
    Vector zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    J.col(i) = (det_pair(sys, zp) - det_pair(sys, zm)) / (zp[i] - zm[i]);
  }
  return J;
}

}  // namespace

LocateResult locate_singularity(const IntegrableSystem& sys, const PhasePoint& seed, const LocateOptions& opts) {
  require_dims(sys, seed);
  Vector z = seed.z();
  double last = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Eigen::Vector2d f = det_pair(sys, z);
    last = f.norm();
    if (last == 0.0) {
      if (corank_at(sys, PhasePoint(z)) == 1) return {PhasePoint(z), iter, 0.0};
    }
    const Matrix Jd = det_jacobian(sys, z);
    const double scale = Jd.norm();
    if (scale == 0.0) {
      if (last == 0.0) break;  // corank >= 2 with a flat determinant
      throw NumericalError(NumericalErrorKind::NoConvergence, "det M is stationary at a nonzero value");
    }
    const double zscale = std::max(1.0, z.norm());
    if (last <= opts.tol_det * scale * zscale) {
      const int k = corank_at(sys, PhasePoint(z));
      if (k == 1) return {PhasePoint(z), iter, last};
      if (k >= 2) break;
    }
    if (iter == opts.max_iter) break;
    Eigen::JacobiSVD<Matrix> svd(Jd, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::Vector2d w = svd.matrixU().transpose() * f;
    for (Eigen::Index i = 0; i < s.size(); ++i) w[i] = s[i] > 1e-10 * s[0] ? w[i] / s[i] : 0.0;
    Vector step = -(svd.matrixV() * w.head(s.size()));
    const double cap = opts.max_step * zscale;
    if (step.norm() > cap) step *= cap / step.norm();
    z += step;
    if (!z.allFinite()) throw NumericalError(NumericalErrorKind::NoConvergence, "Newton iterate left the finite range");
  }
  const int k = corank_at(sys, PhasePoint(z));
  std::ostringstream os;
  if (k >= 2)
    os << "Newton iteration reached a point of corank " << k;
  else
    os << "Newton iteration did not converge in " << opts.max_iter << " steps (|det M| = " << last << ")";
  throw NumericalError(k >= 2 ? NumericalErrorKind::WrongCorank : NumericalErrorKind::NoConvergence, os.str());
}

}  // namespace maslov
