#pragma once

#include "maslov/maslov.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace maslov {

/// One-freedom system F_1 = H. `source` is a builtin name (harmonic, saddle, cubic,
/// double_well) or an expression in q1, p1 (q and p are accepted as aliases). The cubic
/// builtin reads the parameter a (default 0).
IntegrableSystem make_one_freedom(std::string_view source, const ParameterMap& params = {},
                                  const SystemOptions& options = {});

/// F_1 = p1^2/2 + p2 q1^2/2 - eps q1, F_2 = p2, H = F_1.
IntegrableSystem make_bifurcation_family(double eps, const SystemOptions& options = {});

/// F_1 = (p1^2 -+ q1^2)/2 (hyperbolic / elliptic), F_2 = (p2^2 + q2^2)/2, H = w_1 F_1 + w_2 F_2.
IntegrableSystem make_product_system(bool hyperbolic, double w1 = 1.0, double w2 = 1.0,
                                     const SystemOptions& options = {});

/// A rotationally invariant system on R^{2n} with F = (H, L12, L^2_(3), ..., L^2_(n)).
struct RotationalSystem {
  IntegrableSystem system;
  int n = 0;
  std::string h_source;
  ParameterMap params;
  /// False when h mentions coordinates directly, so no radial chart can be built from it.
  bool radial_chart = false;
};

/// h_source is an expression in r2 = |r|^2, p2 = |p|^2, rp = r.p (coordinates and
/// parameters are also allowed). Involution with the angular momenta is checked on construction.
RotationalSystem make_rotational(int n, std::string_view h_source, const ParameterMap& params = {},
                                 const SystemOptions& options = {});

/// Expression for L_ab = r_a p_b - r_b p_a (1-based a, b).
Expr angular_momentum(int a, int b, int n);
/// Expression for L^2_(j) = r_(j)^2 p_(j)^2 - (r_(j).p_(j))^2.
Expr squared_momentum(int j, int n);

double angular_momentum_value(const PhasePoint& z, int a, int b);
double squared_momentum_value(const PhasePoint& z, int j);

enum class RotationalAction { L12, Lm };

/// Orbit of the 2 pi-periodic action flow through z: rigid rotation in the 12-plane for L12,
/// the flow of L_(m) = sqrt(L^2_(m)) otherwise.
ClosedCurve rotational_action_curve(const RotationalSystem& sys, const PhasePoint& z, RotationalAction which,
                                    int m = 0);

enum class RotationalKind { Spherical, Axial, Radial, TwelveAxial, None };

const char* to_string(RotationalKind kind) noexcept;

struct RotationalVerdict {
  RotationalKind kind = RotationalKind::None;
  int m = 0;  // Axial and Radial
  bool nondegenerate = false;
  /// Tr(K^2)/2 for the natural normalisation of c (c_H = 1 for spherical, c_m = 1 for axial).
  double half_trK2 = 0.0;
  bool ambiguous = false;
  std::vector<std::string> matches;
  /// From the generic singularity analysis.
  int corank = 0;
  SingularityKind generic_kind = SingularityKind::Regular;
  /// Whether the generic analysis agrees in corank and in the sign of tau.
  bool consistent = false;
};

RotationalVerdict classify_rotational_singularity(const RotationalSystem& sys, const PhasePoint& z);

/// Builtin system by name: harmonic, saddle, cubic, double_well, bifurcation, product_hyperbolic,
/// product_elliptic, rotational. Parameters: a (cubic), eps (bifurcation), w1 w2 (product),
/// n (rotational, with h_source).
IntegrableSystem make_builtin(std::string_view name, const ParameterMap& params, std::string_view h_source = {},
                              const SystemOptions& options = {});

}  // namespace maslov
