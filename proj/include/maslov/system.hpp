#pragma once

#include "maslov/field.hpp"
#include "maslov/symplectic.hpp"

#include <complex>
#include <string>
#include <vector>

namespace maslov {

struct InvolutionReport {
  double max_abs = 0.0;  // max |{F_a, F_b}| over pairs and samples
  int worst_alpha = -1;
  int worst_beta = -1;
  std::size_t worst_sample = 0;
  std::size_t samples = 0;
  double tol = 0.0;
  bool pass = false;
};

struct SystemOptions {
  bool verify_involution = true;
  std::size_t involution_samples = 64;
  double involution_tol = 1e-8;
  /// Samples are drawn from box_center + [-box_half_width, box_half_width]^{2n}; an empty
  /// center means the origin.
  Vector box_center;
  double box_half_width = 1.0;
};

/// n commuting integrals F_1..F_n with H = sum_a w_a F_a.
///
/// Construction samples the pairwise Poisson brackets on quasi-random points and throws
/// BuildError when they do not vanish; involution is checked, never assumed.
class IntegrableSystem {
 public:
  IntegrableSystem(std::vector<ScalarField> fields, Vector weights, std::string label,
                   const SystemOptions& options = {});

  /// H = F_1.
  static IntegrableSystem first_is_hamiltonian(std::vector<ScalarField> fields, std::string label,
                                               const SystemOptions& options = {});

  int freedoms() const noexcept { return n_; }
  int dimension() const noexcept { return 2 * n_; }
  const std::vector<ScalarField>& fields() const noexcept { return fields_; }
  const ScalarField& field(int alpha) const { return fields_.at(static_cast<std::size_t>(alpha)); }
  /// dh/dF_a.
  const Vector& weights() const noexcept { return weights_; }
  bool hamiltonian_is_first() const noexcept { return h_is_first_; }
  const std::string& label() const noexcept { return label_; }
  const InvolutionReport& involution() const noexcept { return involution_; }

  /// Rows are the gradients of F_1..F_n: an n x 2n matrix.
  Matrix gradient_stack(const PhasePoint& z) const;
  Vector values(const PhasePoint& z) const;

 private:
  int n_ = 0;
  std::vector<ScalarField> fields_;
  Vector weights_;
  bool h_is_first_ = false;
  std::string label_;
  InvolutionReport involution_;
};

double poisson_bracket(const ScalarField& f, const ScalarField& g, const PhasePoint& z);

/// Max |{F_a, F_b}| over all pairs and samples; pass iff <= tol.
InvolutionReport check_involution(const IntegrableSystem& sys, const std::vector<PhasePoint>& samples, double tol);

/// xi = J grad f = (df/dp, -df/dq).
TangentVector hamiltonian_vector_field(const ScalarField& f, const PhasePoint& z);

/// M_ab = dF_b/dp_a + i dF_b/dq_a.
ComplexMatrix build_M(const IntegrableSystem& sys, const PhasePoint& z);
ComplexMatrix build_M(const Matrix& gradient_stack);

/// det M by partially pivoted LU.
std::complex<double> det_M(const IntegrableSystem& sys, const PhasePoint& z);
std::complex<double> determinant(const ComplexMatrix& M);

}  // namespace maslov
