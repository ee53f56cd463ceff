#pragma once

#include "maslov/system.hpp"

#include <utility>

namespace maslov {

enum class SingularityKind { Regular, Elliptic, Hyperbolic, DegenerateCorank1, HigherCorank };

const char* to_string(SingularityKind kind) noexcept;

/// Singular values below rank_rel_tol * sigma_max count as zero.
inline constexpr double kRankRelTol = 1e-8;
/// |tau| <= kTauRelTol * |K|_F^2 is treated as degenerate.
inline constexpr double kTauRelTol = 1e-8;

/// Everything known about a point of phase space with respect to the singular set.
///
/// For corank one: c is the unit null relation among the gradients (first nonzero entry
/// positive), b the unit left null vector of M (largest entry real-positive), K = sum c_a J F_a'',
/// tau = Tr(K^2)/2, beta = (Re b, Im b), eta = K beta, theta = K J beta. Only sgn(tau) is
/// intrinsic; its magnitude depends on the normalisation of c.
struct SingularityData {
  PhasePoint point;
  int corank = 0;
  Vector c;
  ComplexVector b;
  Matrix K;
  double tau = 0.0;
  double tau_tol = 0.0;
  TangentVector beta;
  TangentVector eta;
  TangentVector theta;
  SingularityKind kind = SingularityKind::Regular;
};

/// Corank of the gradient stack, cross-checked against the corank of M. Singular values count
/// as zero below rel_tol * max(sigma_max, max_a |F_a''| max(1, |z|)). Throws
/// NumericalError(Ambiguity) when the two coranks disagree.
int corank_at(const IntegrableSystem& sys, const PhasePoint& z, double rel_tol = kRankRelTol);

Vector c_vector(const IntegrableSystem& sys, const PhasePoint& y);
ComplexVector b_vector(const IntegrableSystem& sys, const PhasePoint& y);

/// K built with the normalised c at y.
Matrix K_matrix(const IntegrableSystem& sys, const PhasePoint& y);
/// sum_a c_a J F_a''(z) for a caller-supplied c (used with c frozen at a base point).
Matrix K_matrix(const IntegrableSystem& sys, const PhasePoint& z, const Vector& c);

SingularityData tau_and_classify(const IntegrableSystem& sys, const PhasePoint& y);

std::pair<TangentVector, TangentVector> eta_theta(const IntegrableSystem& sys, const PhasePoint& y);

/// R^{2n} = ker K^2 (+) im K^2 at a nondegenerate corank-one point.
struct TransverseSplit {
  Matrix kernel;            // 2n x (2n-2), orthonormal columns
  Matrix image;             // 2n x 2, columns eta and theta
  int image_dim = 0;        // numerical rank of K^2
  double skew_residual = 0; // max |[k, w]| / (|k||w|) over kernel columns k and w in {eta, theta}
  double image_residual = 0;// distance of the columns of K^2 from span{eta, theta}, relative to |K^2|
};

TransverseSplit transverse_split(const IntegrableSystem& sys, const PhasePoint& x);
TransverseSplit transverse_split(const SingularityData& data);

struct LocateOptions {
  int max_iter = 60;
  /// Converged when |det M| <= tol_det * |d det M| * max(1, |z|).
  double tol_det = 1e-13;
  /// Longest Newton step, relative to max(1, |z|).
  double max_step = 0.5;
};

struct LocateResult {
  PhasePoint point;
  int iterations = 0;
  double residual = 0.0;  // |det M| at the returned point
};

/// Newton iteration on (Re det M, Im det M) = 0 with a minimum-norm (pseudoinverse) step in
/// the row space of the finite-difference Jacobian. The result has corank one.
LocateResult locate_singularity(const IntegrableSystem& sys, const PhasePoint& seed, const LocateOptions& opts = {});

}  // namespace maslov
