#pragma once

#include "maslov/singularity.hpp"

#include <string>
#include <vector>

namespace maslov {

/// Flow of sum_a w_a F_a over [0, t_end].
struct FlowSpec {
  /// Empty means the Hamiltonian weights of the system.
  Vector weights;
  double t_end = 1.0;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double max_dt = 0.5;
  /// max_b |F_b(z_t) - F_b(z_0)| may not exceed drift_tol * max(1, max_b |F_b(z_0)|).
  double drift_tol = 1e-7;
  /// Bound on |S^T J S - J| / max(1, |S|^2) for linearized flows.
  double sympl_tol = 1e-6;
  /// Trajectories leaving |z| <= safety_radius fail; 0 means 1e3 * max(1, |z_0|).
  double safety_radius = 0.0;
  long max_steps = 2000000;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> z;
  /// Per-integral max |F_b(z_t) - F_b(z_0)|.
  Vector drift;
  double drift_scale = 1.0;
  long steps = 0;

  PhasePoint final_point() const { return PhasePoint(z.back()); }
};

/// Adaptive Dormand-Prince 5(4) integration with drift and escape monitoring. Every accepted
/// step is recorded.
Trajectory integrate_flow(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec);

/// Point reached after time t_end.
PhasePoint flow_point(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec);

struct LinearizedFlow {
  PhasePoint final_point;
  Matrix S;
  /// |S^T J S - J|_max / max(1, |S|_2^2); scale-free so that hyperbolic growth does not count.
  double symplectic_defect = 0.0;
  Vector drift;
  long steps = 0;
};

/// Base flow co-integrated with dS/dt = J (sum_a w_a F_a'') S, S(0) = I.
LinearizedFlow linearized_flow(const IntegrableSystem& sys, const PhasePoint& z0, const FlowSpec& spec);

double symplectic_defect(const Matrix& S);

struct LiapunovEstimate {
  double exponent = 0.0;
  /// Same estimate over the first half of the averaging window; a convergence diagnostic.
  double half_exponent = 0.0;
  int renormalizations = 0;
  double transient = 0.0;
};

/// Benettin estimate of the transverse exponent: a vector seeded in im K^2(x) is propagated by
/// the linearized Hamiltonian flow and renormalized every renorm_dt. Growth during the first
/// `transient` time units is discarded (negative means 0.1 T).
LiapunovEstimate direct_liapunov(const IntegrableSystem& sys, const PhasePoint& x, double T, double renorm_dt,
                                 double transient = -1.0, const FlowSpec& base = {});

/// Symmetric rank-one projector onto the +tau_root eigenline of Kbar = sum_a c_a J F_a''(x_s).
Matrix projector_P(const IntegrableSystem& sys, const PhasePoint& x_s, const Vector& c, double tau_root);

struct AverageSpec {
  /// Weights of the flow used for the torus average; empty means (1, sqrt 2, sqrt 3, ...) normalized.
  Vector weights;
  double window = 20.0;
  int min_windows = 3;
  int max_windows = 200;
  double avg_tol = 1e-3;
  FlowSpec flow;
};

struct AverageResult {
  /// Signed average of Tr(P J F_a'') for each a.
  Vector mean;
  /// Cumulative means after each window, one row per window.
  Matrix window_means;
  /// Largest change of the cumulative means over the last window.
  double last_change = 0.0;
  int windows = 0;
};

/// Torus averages of Tr(P J F_a'') for all a at once.
AverageResult torus_average(const IntegrableSystem& sys, const PhasePoint& x, const AverageSpec& spec);

/// |<Tr(P J F_alpha'')>|.
double kappa_alpha(const IntegrableSystem& sys, const PhasePoint& x, int alpha, const AverageSpec& spec = {});

Vector default_ergodic_weights(int n);

struct LiapunovReport {
  SingularityKind kind = SingularityKind::Regular;
  double tau = 0.0;
  double tau_root = 0.0;
  Vector c;
  Vector kappa_alpha;  // empty on the elliptic branch
  double kappa_H = 0.0;
  double kappa_direct = 0.0;
  double kappa_direct_half = 0.0;
  double sum_rule = 0.0;           // sum_a c_a kappa_a
  double sum_rule_residual = 0.0;  // |sum_rule - tau_root|
  double cross_difference = 0.0;   // |kappa_H - kappa_direct|
  bool cross_ok = false;
  AverageResult average;
};

struct LiapunovSpec {
  AverageSpec average;
  double direct_T = 50.0;
  double renorm_dt = 1.0;
  double transient = -1.0;
  double cross_tol = 0.03;
  /// On the elliptic branch kappa_direct must not exceed this.
  double elliptic_tol = 0.02;
};

/// Elliptic x: kappa_H = 0, checked against the direct estimate. Hyperbolic x: kappa_alpha for
/// every integral, kappa_H = sum_a w_a kappa_a, the sum rule and the direct cross-check.
LiapunovReport kappa_H_and_sum_rule(const IntegrableSystem& sys, const PhasePoint& x, const LiapunovSpec& spec = {});

/// Transport of the singular data along the flow of one integral: c(x_t) against c(x), and
/// K(x_t) against S K(x) S^{-1}. Alignments are |cos| of the angles (Frobenius for matrices).
struct TransportCheck {
  double c_alignment = 0.0;
  double K_alignment = 0.0;
  PhasePoint end;
};

TransportCheck transport_check(const IntegrableSystem& sys, const PhasePoint& x, const FlowSpec& spec);

}  // namespace maslov
