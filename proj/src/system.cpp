#include "maslov/system.hpp"

#include "maslov/errors.hpp"
#include "maslov/sampling.hpp"

#include <cmath>

namespace maslov {

IntegrableSystem::IntegrableSystem(std::vector<ScalarField> fields, Vector weights, std::string label,
                                   const SystemOptions& options)
    : fields_(std::move(fields)), weights_(std::move(weights)), label_(std::move(label)) {
  if (fields_.empty()) throw BuildError("an integrable system needs at least one field");
  n_ = static_cast<int>(fields_.size());
  for (std::size_t a = 0; a < fields_.size(); ++a)
    if (fields_[a].freedoms() != n_)
      throw BuildError("field " + std::to_string(a + 1) + " is defined on R^" +
                       std::to_string(fields_[a].dimension()) + ", expected R^" + std::to_string(2 * n_));
  if (weights_.size() != n_) throw BuildError("Hamiltonian weights must have length n");
  if (!weights_.allFinite()) throw BuildError("Hamiltonian weights must be finite");

  if (!options.verify_involution) return;
  const Vector center = options.box_center.size() ? options.box_center : Vector(Vector::Zero(2 * n_));
  if (center.size() != 2 * n_) throw BuildError("involution box center has wrong dimension");
  const auto samples = halton_points(2 * n_, options.involution_samples, center, options.box_half_width);
  try {
    involution_ = check_involution(*this, samples, options.involution_tol);
  } catch (const DomainError& e) {
    throw BuildError(label_ + ": involution check failed to evaluate: " + e.what());
  }
  if (!involution_.pass)
    throw BuildError(label_ + ": integrals are not in involution: |{F" + std::to_string(involution_.worst_alpha + 1) +
                     ", F" + std::to_string(involution_.worst_beta + 1) + "}| = " +
                     std::to_string(involution_.max_abs) + " at sample " + std::to_string(involution_.worst_sample));
}

IntegrableSystem IntegrableSystem::first_is_hamiltonian(std::vector<ScalarField> fields, std::string label,
                                                        const SystemOptions& options) {
  const auto n = static_cast<Eigen::Index>(fields.size());
  IntegrableSystem sys(std::move(fields), Vector::Unit(std::max<Eigen::Index>(n, 1), 0), std::move(label), options);
  sys.h_is_first_ = true;
  return sys;
}

Matrix IntegrableSystem::gradient_stack(const PhasePoint& z) const {
  Matrix G(n_, 2 * n_);
  for (int a = 0; a < n_; ++a) G.row(a) = fields_[static_cast<std::size_t>(a)].grad(z).transpose();
  return G;
}

Vector IntegrableSystem::values(const PhasePoint& z) const {
  Vector v(n_);
  for (int a = 0; a < n_; ++a) v[a] = fields_[static_cast<std::size_t>(a)].eval(z);
  return v;
}

double poisson_bracket(const ScalarField& f, const ScalarField& g, const PhasePoint& z) {
  if (f.dimension() != g.dimension()) throw DimensionError("Poisson bracket of fields on different spaces");
  return f.grad(z).dot(apply_J(g.grad(z)));
}

InvolutionReport check_involution(const IntegrableSystem& sys, const std::vector<PhasePoint>& samples, double tol) {
  if (samples.empty()) throw Error("check_involution needs at least one sample");
  InvolutionReport rep;
  rep.tol = tol;
  rep.samples = samples.size();
  const int n = sys.freedoms();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    Matrix G;
    try {
      G = sys.gradient_stack(samples[s]);
    } catch (const DomainError& e) {
      throw DomainError("sample " + std::to_string(s) + ": " + e.what());
    }
    for (int a = 0; a < n; ++a) {
      const TangentVector Jga = apply_J(G.row(a).transpose());
      for (int b = a + 1; b < n; ++b) {
        const double v = std::abs(G.row(b).dot(Jga));
        if (v > rep.max_abs || rep.worst_alpha < 0) {
          rep.max_abs = v;
          rep.worst_alpha = a;
          rep.worst_beta = b;
          rep.worst_sample = s;
        }
      }
    }
  }
  rep.pass = rep.max_abs <= tol;
  return rep;
}

TangentVector hamiltonian_vector_field(const ScalarField& f, const PhasePoint& z) { return apply_J(f.grad(z)); }

ComplexMatrix build_M(const Matrix& G) {
  const Eigen::Index n = G.rows();
  if (G.cols() != 2 * n) throw DimensionError("gradient stack must be n x 2n");
  ComplexMatrix M(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) M(a, b) = {G(b, n + a), G(b, a)};
  return M;
}

ComplexMatrix build_M(const IntegrableSystem& sys, const PhasePoint& z) { return build_M(sys.gradient_stack(z)); }

std::complex<double> determinant(const ComplexMatrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("determinant of a non-square matrix");
  if (M.rows() == 1) return M(0, 0);
  return Eigen::PartialPivLU<ComplexMatrix>(M).determinant();
}

std::complex<double> det_M(const IntegrableSystem& sys, const PhasePoint& z) { return determinant(build_M(sys, z)); }

}  // namespace maslov
