#pragma once

#include "maslov/singularity.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace maslov {

/// A closed curve z(s), s in [0, 1], with z(1) = z(0).
class ClosedCurve {
 public:
  using Map = std::function<PhasePoint(double)>;

  ClosedCurve(Map map, std::string label = {});
  /// Piecewise-linear interpolation through the samples; the last sample must repeat the first.
  static ClosedCurve from_samples(std::vector<PhasePoint> samples, std::string label = {});

  PhasePoint operator()(double s) const { return map_(s); }
  const std::string& label() const noexcept { return label_; }
  /// The same curve traversed backwards.
  ClosedCurve reversed() const;

 private:
  Map map_;
  std::string label_;
};

struct MaslovOptions {
  int initial_samples = 256;
  int max_depth = 16;
  /// Adjacent samples must differ in phase by less than this.
  double max_phase_step = 1.5707963267948966;
  /// |det M| below proximity_rel * median |det M| (initial samples) counts as hitting the singular set.
  double proximity_rel = 1e-12;
  double residual_tol = 0.01;
  /// |z(1) - z(0)| <= closure_rel * max(1, |z(0)|).
  double closure_rel = 1e-10;
};

struct TracePoint {
  double s = 0.0;
  std::complex<double> det;
  double unwrapped_arg = 0.0;
};

struct MaslovResult {
  int index = 0;
  double raw = 0.0;       // total phase change / pi
  double residual = 0.0;  // |raw - index|
  int refinement_depth = 0;
  double min_abs_det = 0.0;
  double proximity_threshold = 0.0;
  std::vector<TracePoint> trace;
};

MaslovResult maslov_index(const IntegrableSystem& sys, const ClosedCurve& curve, const MaslovOptions& opts = {});

/// Phase change of det M along z restricted to [s0, s1], divided by pi. Uses the same
/// refinement as maslov_index but needs no closure.
double phase_increment(const IntegrableSystem& sys, const ClosedCurve& curve, double s0, double s1,
                       const MaslovOptions& opts = {});

/// Components of u and v along eta and theta in the frame (eta, theta, ker K^2).
struct ProjectedPair {
  Eigen::Vector2d u;
  Eigen::Vector2d v;
  double bracket = 0.0;  // [u*, v*]
};

ProjectedPair project_onto_image(const SingularityData& data, const TransverseSplit& split, const TangentVector& u,
                                 const TangentVector& v);

/// 2 sgn[u*, v*] sgn(tau) at an elliptic or hyperbolic point x.
int local_maslov_index(const IntegrableSystem& sys, const PhasePoint& x, const TangentVector& u, const TangentVector& v);

/// The curve x + eps (cos 2 pi s u + sin 2 pi s v).
ClosedCurve epsilon_circle(const PhasePoint& x, const TangentVector& u, const TangentVector& v, double eps);

struct LocalIndexCheck {
  int formula = 0;
  int winding = 0;
  double eps = 0.0;
  bool agree = false;
};

/// Evaluates the local index both ways; the winding side uses the epsilon-circle.
LocalIndexCheck verify_local_index(const IntegrableSystem& sys, const PhasePoint& x, const TangentVector& u,
                                   const TangentVector& v, double eps = 1e-3, const MaslovOptions& opts = {});

/// A map S of the closed unit disk into phase space, with the points e_j where S meets the
/// singular set.
struct TransverseDisk {
  std::function<PhasePoint(double, double)> map;
  std::vector<Eigen::Vector2d> preimages;
  /// Optional (dS/dx, dS/dy) at each preimage; finite differences are used when empty.
  std::vector<std::pair<TangentVector, TangentVector>> tangents;
  std::string label;
};

/// The boundary S(cos 2 pi s, sin 2 pi s).
ClosedCurve disk_boundary(const TransverseDisk& disk);

struct DiskTerm {
  Eigen::Vector2d preimage;
  PhasePoint point;
  SingularityKind kind = SingularityKind::Regular;
  int sigma = 0;
  int sigma_alt = 0;  // sgn(tau) sgn[K^2 u, v]
  int tau_sign = 0;
  int contribution = 0;
};

struct DiskFormulaResult {
  int index = 0;
  std::vector<DiskTerm> terms;
};

/// 2 sum_j sigma_j sgn tau(S(e_j)). Each S(e_j) is refined onto the singular set first.
DiskFormulaResult disk_index_formula(const IntegrableSystem& sys, const TransverseDisk& disk);

/// Zeros of det M o S in the unit disk, found by the phase winding of det M around the cells
/// of a grid x grid partition of [-1, 1]^2 followed by Newton refinement in the disk plane.
std::vector<Eigen::Vector2d> find_disk_preimages(const IntegrableSystem& sys,
                                                 const std::function<PhasePoint(double, double)>& map,
                                                 int grid = 64);

/// A flat disk center + r (x a + y b).
TransverseDisk planar_disk(const PhasePoint& center, const TangentVector& a, const TangentVector& b, double r);

}  // namespace maslov
