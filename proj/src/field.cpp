#include "maslov/field.hpp"

#include "maslov/dual.hpp"
#include "maslov/errors.hpp"

#include <cmath>
#include <limits>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace maslov {

namespace {

struct Instr {
  NodeKind kind = NodeKind::Constant;
  Builtin function = Builtin::Sin;
  int a = -1;
  int b = -1;
  double value = 0.0;
  int coordinate = -1;
  bool constant_exponent = false;
  Expr node;
};

struct Tape {
  std::vector<Instr> code;
};

class Compiler {
 public:
  Tape run(const Expr& root) {
    emit(root);
    return std::move(tape_);
  }

 private:
  int emit(const Expr& e) {
    if (auto it = slot_.find(e.get()); it != slot_.end()) return it->second;
    Instr ins;
    ins.kind = e->kind;
    ins.node = e;
    switch (e->kind) {
      case NodeKind::Constant:
      case NodeKind::Parameter: ins.value = e->value; break;
      case NodeKind::Coordinate: ins.coordinate = e->coordinate; break;
      case NodeKind::Negate: ins.a = emit(e->lhs); break;
      case NodeKind::Call:
        ins.function = e->function;
        ins.a = emit(e->lhs);
        break;
      case NodeKind::Power:
        ins.a = emit(e->lhs);
        if (is_constant(e->rhs)) {
          ins.constant_exponent = true;
          ins.value = constant_value(e->rhs);
        } else {
          ins.b = emit(e->rhs);
        }
        break;
      default:
        ins.a = emit(e->lhs);
        ins.b = emit(e->rhs);
        break;
    }
    tape_.code.push_back(ins);
    const int k = static_cast<int>(tape_.code.size()) - 1;
    slot_[e.get()] = k;
    return k;
  }

  Tape tape_;
  std::unordered_map<const ExprNode*, int> slot_;
};

[[noreturn]] void domain_failure(const char* what, const Expr& node) {
  throw DomainError(std::string(what) + " in '" + to_string(node) + "'");
}

template <class S>
S evaluate(const Tape& tape, const std::function<S(int)>& coordinate) {
  constexpr bool kDerivatives = !std::is_same_v<S, double>;
  std::vector<S> slot(tape.code.size());
  for (std::size_t k = 0; k < tape.code.size(); ++k) {
    const Instr& ins = tape.code[k];
    S& out = slot[k];
    switch (ins.kind) {
      case NodeKind::Constant:
      case NodeKind::Parameter: out = S(ins.value); break;
      case NodeKind::Coordinate: out = coordinate(ins.coordinate); break;
      case NodeKind::Negate: out = -slot[ins.a]; break;
      case NodeKind::Add: out = slot[ins.a] + slot[ins.b]; break;
      case NodeKind::Subtract: out = slot[ins.a] - slot[ins.b]; break;
      case NodeKind::Multiply: out = slot[ins.a] * slot[ins.b]; break;
      case NodeKind::Divide:
        if (ad::primal(slot[ins.b]) == 0.0) domain_failure("division by zero", ins.node);
        out = slot[ins.a] / slot[ins.b];
        break;
      case NodeKind::Power: {
        const S& base = slot[ins.a];
        const double x = ad::primal(base);
        if (ins.constant_exponent) {
          const double c = ins.value;
          const bool integral = std::abs(c) <= 1e6 && c == std::nearbyint(c);
          if (integral) {
            if (x == 0.0 && c < 0.0) domain_failure("negative power of zero", ins.node);
          } else {
            if (x < 0.0) domain_failure("non-integer power of negative base", ins.node);
            if (kDerivatives && x == 0.0) domain_failure("non-integer power not differentiable at zero", ins.node);
          }
          out = ad::pow(base, c);
        } else {
          if (x <= 0.0) domain_failure("variable exponent requires positive base", ins.node);
          out = ad::exp(slot[ins.b] * ad::log(base));
        }
        break;
      }
      case NodeKind::Call: {
        const S& arg = slot[ins.a];
        const double x = ad::primal(arg);
        switch (ins.function) {
          case Builtin::Sin: out = ad::sin(arg); break;
          case Builtin::Cos: out = ad::cos(arg); break;
          case Builtin::Exp: out = ad::exp(arg); break;
          case Builtin::Log:
            if (x <= 0.0) domain_failure("log of non-positive argument", ins.node);
            out = ad::log(arg);
            break;
          case Builtin::Sqrt:
            if (x < 0.0) domain_failure("sqrt of negative argument", ins.node);
            if (kDerivatives && x == 0.0) domain_failure("sqrt not differentiable at zero", ins.node);
            out = ad::sqrt(arg);
            break;
        }
        break;
      }
    }
  }
  const S& result = slot.back();
  if (!std::isfinite(ad::primal(result))) domain_failure("non-finite value", tape.code.back().node);
  return result;
}

template <int N>
FieldJet forward_jet(const Tape& tape, const PhasePoint& z) {
  using Inner = ad::Dual<double, N>;
  using Outer = ad::Dual<Inner, N>;
  const int m = static_cast<int>(z.size());
  const Outer r = evaluate<Outer>(tape, [&](int k) {
    Outer x;
    x.v.v = z[k];
    x.v.d[k] = 1.0;
    x.d[k] = Inner(1.0);
    return x;
  });
  FieldJet jet;
  jet.value = r.v.v;
  jet.grad.resize(m);
  jet.hess.resize(m, m);
  for (int i = 0; i < m; ++i) {
    jet.grad[i] = r.v.d[i];
    for (int j = 0; j < m; ++j) jet.hess(i, j) = r.d[i].d[j];
  }
  jet.hess = (0.5 * (jet.hess + jet.hess.transpose())).eval();
  return jet;
}

template <int N>
TangentVector forward_grad(const Tape& tape, const PhasePoint& z) {
  using D = ad::Dual<double, N>;
  const D r = evaluate<D>(tape, [&](int k) {
    D x(z[k]);
    x.d[k] = 1.0;
    return x;
  });
  TangentVector g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) g[i] = r.d[i];
  return g;
}

template <class F>
decltype(auto) dispatch(int m, F&& f) {
  if (m <= 2) return f(std::integral_constant<int, 2>{});
  if (m <= 4) return f(std::integral_constant<int, 4>{});
  if (m <= 6) return f(std::integral_constant<int, 6>{});
  if (m <= 8) return f(std::integral_constant<int, 8>{});
  if (m <= 12) return f(std::integral_constant<int, 12>{});
  if (m <= 16) return f(std::integral_constant<int, 16>{});
  if (m <= 20) return f(std::integral_constant<int, 20>{});
  throw DimensionError("forward-mode fields support at most 10 freedoms");
}

double fd_step(double order_root, double zi) {
  return std::pow(std::numeric_limits<double>::epsilon(), order_root) * std::max(1.0, std::abs(zi));
}

TangentVector fd_grad(const ScalarField::Function& f, const PhasePoint& z) {
  const Eigen::Index m = z.size();
  TangentVector g(m);
  Vector x = z.z();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = fd_step(1.0 / 3.0, z[i]);
    x[i] = z[i] + h;
    const double fp = f({x.data(), static_cast<std::size_t>(m)});
    x[i] = z[i] - h;
    const double fm = f({x.data(), static_cast<std::size_t>(m)});
    x[i] = z[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix fd_hess(const ScalarField::Function& f, const PhasePoint& z) {
  const Eigen::Index m = z.size();
  Matrix H(m, m);
  Vector x = z.z();
  auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    x[i] += di;
    x[j] += dj;
    const double v = f({x.data(), static_cast<std::size_t>(m)});
    x[i] = z[i];
    x[j] = z[j];
    return v;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    const double hi = fd_step(0.25, z[i]);
    for (Eigen::Index j = i; j < m; ++j) {
      const double hj = fd_step(0.25, z[j]);
      const double v = at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj);
      H(i, j) = H(j, i) = v / (4.0 * hi * hj);
    }
  }
  return H;
}

}  // namespace

struct ScalarField::Impl {
  int n = 0;
  Differentiation diff = Differentiation::Forward;
  Expr expr;
  Tape tape;
  Function fn;
  std::string label;

  double value(const PhasePoint& z) const {
    if (fn) return fn(z.span());
    return evaluate<double>(tape, [&](int k) { return z[k]; });
  }
  Function value_function() const {
    if (fn) return fn;
    return [this](std::span<const double> x) {
      return evaluate<double>(tape, [&](int k) { return x[static_cast<std::size_t>(k)]; });
    };
  }
};

ScalarField ScalarField::from_expression(Expr expr, int n, Differentiation diff) {
  if (!expr) throw Error("null expression");
  if (n < 1) throw DimensionError("number of freedoms must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->diff = diff;
  impl->label = to_string(expr);
  impl->tape = Compiler().run(expr);
  for (const Instr& ins : impl->tape.code)
    if (ins.kind == NodeKind::Coordinate && ins.coordinate >= 2 * n)
      throw DimensionError("expression refers to a coordinate beyond 2n");
  impl->expr = std::move(expr);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::from_function(Function f, int n, std::string label) {
  if (!f) throw Error("empty function");
  if (n < 1) throw DimensionError("number of freedoms must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->diff = Differentiation::FiniteDifference;
  impl->fn = std::move(f);
  impl->label = std::move(label);
  return ScalarField(std::move(impl));
}

int ScalarField::freedoms() const { return impl_->n; }
Differentiation ScalarField::differentiation() const { return impl_->diff; }
const Expr& ScalarField::expression() const { return impl_->expr; }
std::string ScalarField::label() const { return impl_->label; }

namespace {
void check_dim(const ScalarField& f, const PhasePoint& z) {
  if (z.size() != f.dimension())
    throw DimensionError("point has dimension " + std::to_string(z.size()) + ", field expects " +
                         std::to_string(f.dimension()));
}
}  // namespace

double ScalarField::eval(const PhasePoint& z) const {
  check_dim(*this, z);
  const double v = impl_->value(z);
  if (!std::isfinite(v)) throw DomainError("non-finite value of '" + impl_->label + "'");
  return v;
}

TangentVector ScalarField::grad(const PhasePoint& z) const {
  check_dim(*this, z);
  if (impl_->diff == Differentiation::FiniteDifference) return fd_grad(impl_->value_function(), z);
  return dispatch(static_cast<int>(z.size()),
                  [&](auto N) { return forward_grad<decltype(N)::value>(impl_->tape, z); });
}

Matrix ScalarField::hess(const PhasePoint& z) const { return jet(z).hess; }

FieldJet ScalarField::jet(const PhasePoint& z) const {
  check_dim(*this, z);
  if (impl_->diff == Differentiation::FiniteDifference) {
    const auto f = impl_->value_function();
    return FieldJet{impl_->value(z), fd_grad(f, z), fd_hess(f, z)};
  }
  return dispatch(static_cast<int>(z.size()),
                  [&](auto N) { return forward_jet<decltype(N)::value>(impl_->tape, z); });
}

ScalarField parse_field(std::string_view source, int n, const ParameterMap& params) {
  return ScalarField::from_expression(parse_expression(source, n, params), n);
}

double eval_field(const ScalarField& f, const PhasePoint& z) { return f.eval(z); }
TangentVector grad_field(const ScalarField& f, const PhasePoint& z) { return f.grad(z); }
Matrix hess_field(const ScalarField& f, const PhasePoint& z) { return f.hess(z); }

}  // namespace maslov
