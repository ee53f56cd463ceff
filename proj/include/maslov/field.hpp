#pragma once

#include "maslov/expr.hpp"
#include "maslov/symplectic.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace maslov {

enum class Differentiation {
  Forward,           // nested forward-mode duals, exact up to rounding
  FiniteDifference,  // central differences
};

/// Value, gradient and Hessian at one point.
struct FieldJet {
  double value = 0.0;
  TangentVector grad;
  Matrix hess;
};

/// An immutable scalar function on R^{2n} with first and second derivatives.
///
/// Built either from an expression tree (exact derivatives by forward-mode AD) or from a
/// black-box callable (central finite differences with steps cbrt(eps)*max(1,|z_i|) for
/// gradients and eps^(1/4)*max(1,|z_i|) for Hessians). Copies share the underlying state.
class ScalarField {
 public:
  using Function = std::function<double(std::span<const double>)>;

  static ScalarField from_expression(Expr expr, int n, Differentiation diff = Differentiation::Forward);
  static ScalarField from_function(Function f, int n, std::string label);

  int freedoms() const;
  int dimension() const { return 2 * freedoms(); }
  Differentiation differentiation() const;
  /// The tree behind an expression field, or null for a black-box field.
  const Expr& expression() const;
  std::string label() const;

  double eval(const PhasePoint& z) const;
  TangentVector grad(const PhasePoint& z) const;
  /// Symmetric to the last bit.
  Matrix hess(const PhasePoint& z) const;
  FieldJet jet(const PhasePoint& z) const;

  struct Impl;

 private:
  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Parses `source` into a forward-mode field over R^{2n} with the parameters bound now.
ScalarField parse_field(std::string_view source, int n, const ParameterMap& params = {});

double eval_field(const ScalarField& f, const PhasePoint& z);
TangentVector grad_field(const ScalarField& f, const PhasePoint& z);
Matrix hess_field(const ScalarField& f, const PhasePoint& z);

}  // namespace maslov
