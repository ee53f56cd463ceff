#pragma once

// Reference computations for the tests. They share no code with the library beyond the
// point and matrix types: derivatives come from Richardson-extrapolated differences of
// plain values, determinants from cofactor expansion, windings from dense fixed sampling.

#include "maslov/system.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using maslov::ComplexMatrix;
using maslov::Matrix;
using maslov::PhasePoint;
using maslov::Vector;

using Scalar = std::function<double(const Vector&)>;

inline Scalar values_of(const maslov::ScalarField& f) {
  return [f](const Vector& z) { return f.eval(PhasePoint(z)); };
}

// Fourth-order central difference.
inline Vector gradient(const Scalar& f, const Vector& z, double h = 1e-3) {
  Vector g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    auto at = [&](double t) {
      Vector y = z;
      y[i] += t;
      return f(y);
    };
    g[i] = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
  }
  return g;
}

inline Matrix hessian(const Scalar& f, const Vector& z, double h = 1e-3) {
  Matrix H(z.size(), z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    auto gj = [&](double t) {
      Vector y = z;
      y[j] += t;
      return gradient(f, y, h);
    };
    H.col(j) = (8.0 * (gj(h) - gj(-h)) - (gj(2 * h) - gj(-2 * h))) / (12.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

inline std::complex<double> cofactor_det(const ComplexMatrix& A) {
  const Eigen::Index n = A.rows();
  if (n == 1) return A(0, 0);
  std::complex<double> sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, k = 0; c < n; ++c)
        if (c != j) minor(r - 1, k++) = A(r, c);
    sum += (j % 2 ? -1.0 : 1.0) * A(0, j) * cofactor_det(minor);
  }
  return sum;
}

// M_ab = dF_b/dp_a + i dF_b/dq_a from value-only differences.
inline ComplexMatrix M_matrix(const std::vector<Scalar>& F, const Vector& z) {
  const Eigen::Index n = z.size() / 2;
  ComplexMatrix M(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Vector g = gradient(F[static_cast<std::size_t>(b)], z);
    for (Eigen::Index a = 0; a < n; ++a) M(a, b) = {g[n + a], g[a]};
  }
  return M;
}

inline std::vector<Scalar> fields_of(const maslov::IntegrableSystem& sys) {
  std::vector<Scalar> out;
  for (const auto& f : sys.fields()) out.push_back(values_of(f));
  return out;
}

// Total phase change of det M / pi along z(s), from N equal steps with no adaptivity.
inline double dense_winding(const std::vector<Scalar>& F, const std::function<Vector(double)>& z, int N = 4000) {
  double total = 0.0;
  std::complex<double> prev = cofactor_det(M_matrix(F, z(0.0)));
  for (int k = 1; k <= N; ++k) {
    const std::complex<double> cur = cofactor_det(M_matrix(F, z(static_cast<double>(k) / N)));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / std::numbers::pi;
}

inline double bracket(const Vector& u, const Vector& v) {
  const Eigen::Index n = u.size() / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

inline Matrix J(Eigen::Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

// Fixed-step classical RK4 on zdot = J grad(sum w_a F_a), gradients by differences.
inline Vector rk4_flow(const std::vector<Scalar>& F, const Vector& w, const Vector& z0, double T, int steps) {
  const Matrix Jm = J(z0.size() / 2);
  auto rhs = [&](const Vector& z) {
    Vector g = Vector::Zero(z.size());
    for (std::size_t a = 0; a < F.size(); ++a)
      if (w[static_cast<Eigen::Index>(a)] != 0.0) g += w[static_cast<Eigen::Index>(a)] * gradient(F[a], z, 1e-4);
    return Vector(Jm * g);
  };
  Vector z = z0;
  const double h = T / steps;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = rhs(z), k2 = rhs(z + 0.5 * h * k1), k3 = rhs(z + 0.5 * h * k2), k4 = rhs(z + h * k3);
    z += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return z;
}

inline Vector random_point(std::mt19937_64& rng, Eigen::Index d, double half_width = 1.0) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = u(rng);
  return z;
}

}  // namespace oracle
