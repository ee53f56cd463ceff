#include "maslov/symplectic.hpp"

#include "maslov/errors.hpp"

#include <cmath>
#include <string>

namespace maslov {

namespace {

void require_finite(const Vector& z) {
  if (!z.allFinite()) throw DimensionError("phase point has non-finite components");
}

void require_even(Eigen::Index size, const char* what) {
  if (size < 2 || size % 2 != 0)
    throw DimensionError(std::string(what) + " must have even length >= 2, got " + std::to_string(size));
}

}  // namespace

PhasePoint::PhasePoint(const Vector& q, const Vector& p) {
  if (q.size() != p.size() || q.size() < 1)
    throw DimensionError("q and p must have equal length n >= 1");
  z_.resize(2 * q.size());
  z_ << q, p;
  require_finite(z_);
}

PhasePoint::PhasePoint(const Vector& z) : z_(z) {
  require_even(z.size(), "phase point");
  require_finite(z_);
}

PhasePoint::PhasePoint(std::initializer_list<double> z) : z_(static_cast<Eigen::Index>(z.size())) {
  Eigen::Index i = 0;
  for (double v : z) z_[i++] = v;
  require_even(z_.size(), "phase point");
  require_finite(z_);
}

PhasePoint PhasePoint::operator+(const TangentVector& dz) const {
  if (dz.size() != z_.size()) throw DimensionError("tangent vector length does not match phase point");
  return PhasePoint(Vector(z_ + dz));
}

Matrix symplectic_J(int n) {
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return J;
}

TangentVector apply_J(const TangentVector& v) {
  require_even(v.size(), "tangent vector");
  const Eigen::Index n = v.size() / 2;
  TangentVector out(v.size());
  out.head(n) = v.tail(n);
  out.tail(n) = -v.head(n);
  return out;
}

double symplectic_product(const TangentVector& u, const TangentVector& v) {
  if (u.size() != v.size()) throw DimensionError("symplectic product of vectors of different length");
  require_even(u.size(), "tangent vector");
  const Eigen::Index n = u.size() / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

double infinitesimal_symplectic_defect(const Matrix& K) {
  if (K.rows() != K.cols()) throw DimensionError("matrix is not square");
  require_even(K.rows(), "matrix");
  const Eigen::Index m = K.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const TangentVector ei = TangentVector::Unit(m, i);
      const TangentVector ej = TangentVector::Unit(m, j);
      const double d = symplectic_product(K.col(i), ej) + symplectic_product(ei, K.col(j));
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

bool check_infinitesimal_symplectic(const Matrix& K, double tol) {
  return infinitesimal_symplectic_defect(K) <= tol;
}

int numerical_corank(const Eigen::VectorXd& singular_values, Eigen::Index expected, double rel_tol) {
  const double smax = singular_values.size() ? singular_values.maxCoeff() : 0.0;
  if (smax == 0.0) return static_cast<int>(expected);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values[i] >= rel_tol * smax) ++rank;
  return static_cast<int>(expected - rank);
}

}  // namespace maslov
