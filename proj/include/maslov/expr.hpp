#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace maslov {

enum class NodeKind { Constant, Coordinate, Parameter, Negate, Add, Subtract, Multiply, Divide, Power, Call };
enum class Builtin { Sin, Cos, Exp, Log, Sqrt };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// One node of an expression tree. Parameters carry the value they were bound to at parse time.
struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;     // Constant and Parameter
  int coordinate = -1;    // Coordinate: index into z = (q_1..q_n, p_1..p_n)
  int freedoms = 0;       // Coordinate: n
  std::string name;       // Parameter
  Builtin function = Builtin::Sin;
  Expr lhs;               // operand of unary nodes, left operand of binary nodes
  Expr rhs;
};

using ParameterMap = std::map<std::string, double>;

/// Named sub-expressions substituted for identifiers; they shadow coordinates and parameters.
using MacroMap = std::map<std::string, Expr>;

/// Parses infix text over q1..qn, p1..pn and the given parameters.
///
/// Precedence, high to low: `^` (right-associative), unary minus, `*` `/`, `+` `-`.
/// Functions: sin, cos, exp, log, sqrt. Throws ParseError on malformed input,
/// unknown identifiers and wrong argument counts.
Expr parse_expression(std::string_view source, int n, const ParameterMap& params = {},
                      const MacroMap& macros = {});

/// Fully parenthesised text that parses back to a structurally identical tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// True when no coordinate occurs in the tree.
bool is_constant(const Expr& e);

/// Value of a coordinate-free tree.
double constant_value(const Expr& e);

Expr make_constant(double v);
Expr make_coordinate(int index, int freedoms);
Expr make_parameter(std::string name, double value);
Expr make_unary(NodeKind kind, Expr operand);
Expr make_binary(NodeKind kind, Expr lhs, Expr rhs);
Expr make_call(Builtin f, Expr arg);

const char* builtin_name(Builtin f);

}  // namespace maslov
