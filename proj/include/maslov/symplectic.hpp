#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace maslov {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Vector in R^{2n} read as an element of the tangent space, ordered (q_1..q_n, p_1..p_n).
using TangentVector = Vector;

/// A point z = (q, p) of R^{2n}. Both halves have the same length n >= 1 and are finite.
class PhasePoint {
 public:
  PhasePoint() = default;
  PhasePoint(const Vector& q, const Vector& p);
  explicit PhasePoint(const Vector& z);
  PhasePoint(std::initializer_list<double> z);

  int freedoms() const noexcept { return static_cast<int>(z_.size() / 2); }
  Eigen::Index size() const noexcept { return z_.size(); }

  const Vector& z() const noexcept { return z_; }
  auto q() const { return z_.head(freedoms()); }
  auto p() const { return z_.tail(freedoms()); }
  double operator[](Eigen::Index i) const { return z_[i]; }

  std::span<const double> span() const noexcept {
    return {z_.data(), static_cast<std::size_t>(z_.size())};
  }

  PhasePoint operator+(const TangentVector& dz) const;

 private:
  Vector z_;
};

/// The standard symplectic matrix J = [[0, I], [-I, 0]] of size 2n.
Matrix symplectic_J(int n);

/// J * v, i.e. (a_q, a_p) -> (a_p, -a_q).
TangentVector apply_J(const TangentVector& v);

/// [u, v] = q_u . p_v - p_u . q_v.
double symplectic_product(const TangentVector& u, const TangentVector& v);

/// max over canonical basis pairs of |[K e_i, e_j] + [e_i, K e_j]|.
double infinitesimal_symplectic_defect(const Matrix& K);

bool check_infinitesimal_symplectic(const Matrix& K, double tol);

/// Number of singular values of A below rel_tol * sigma_max (all of them when sigma_max == 0).
int numerical_corank(const Eigen::VectorXd& singular_values, Eigen::Index expected, double rel_tol);

}  // namespace maslov
