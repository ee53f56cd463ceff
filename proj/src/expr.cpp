#include "maslov/expr.hpp"

#include "maslov/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace maslov {

Expr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

Expr make_coordinate(int index, int freedoms) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Coordinate;
  n->coordinate = index;
  n->freedoms = freedoms;
  return n;
}

Expr make_parameter(std::string name, double value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Parameter;
  n->name = std::move(name);
  n->value = value;
  return n;
}

Expr make_unary(NodeKind kind, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

Expr make_binary(NodeKind kind, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

Expr make_call(Builtin f, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Call;
  n->function = f;
  n->lhs = std::move(arg);
  return n;
}

const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Exp: return "exp";
    case Builtin::Log: return "log";
    case Builtin::Sqrt: return "sqrt";
  }
  return "?";
}

namespace {

std::optional<Builtin> lookup_builtin(std::string_view name) {
  if (name == "sin") return Builtin::Sin;
  if (name == "cos") return Builtin::Cos;
  if (name == "exp") return Builtin::Exp;
  if (name == "log") return Builtin::Log;
  if (name == "sqrt") return Builtin::Sqrt;
  return std::nullopt;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, i_, {}});
        return out;
      }
      const char c = src_[i_];
      const std::size_t start = i_;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(number(start));
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
          ++i_;
        out.push_back({Tok::Ident, start, src_.substr(start, i_ - start)});
        continue;
      }
      ++i_;
      switch (c) {
        case '+': out.push_back({Tok::Plus, start, {}}); break;
        case '-': out.push_back({Tok::Minus, start, {}}); break;
        case '*': out.push_back({Tok::Star, start, {}}); break;
        case '/': out.push_back({Tok::Slash, start, {}}); break;
        case '^': out.push_back({Tok::Caret, start, {}}); break;
        case '(': out.push_back({Tok::LParen, start, {}}); break;
        case ')': out.push_back({Tok::RParen, start, {}}); break;
        case ',': out.push_back({Tok::Comma, start, {}}); break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", start);
      }
    }
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      std::size_t k = 0;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_, ++k;
      return k;
    };
    std::size_t mantissa = digits();
    if (i_ < src_.size() && src_[i_] == '.') {
      ++i_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      ++i_;
      if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
      if (digits() == 0) throw ParseError("malformed exponent in number", start);
    }
    Token t{Tok::Number, start, src_.substr(start, i_ - start)};
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec != std::errc()) throw ParseError("number out of range", start);
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, int n, const ParameterMap& params, const MacroMap& macros)
      : toks_(std::move(toks)), n_(n), params_(params), macros_(macros) {}

  Expr parse() {
    Expr e = additive();
    if (peek().kind != Tok::End) throw ParseError("unexpected trailing input", peek().pos);
    return e;
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& advance() { return toks_[k_++]; }
  bool accept(Tok t) {
    if (peek().kind != t) return false;
    ++k_;
    return true;
  }
  void expect(Tok t, const char* what) {
    if (!accept(t)) throw ParseError(std::string("expected ") + what, peek().pos);
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (true) {
      if (accept(Tok::Plus))
        lhs = make_binary(NodeKind::Add, lhs, multiplicative());
      else if (accept(Tok::Minus))
        lhs = make_binary(NodeKind::Subtract, lhs, multiplicative());
      else
        return lhs;
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (true) {
      if (accept(Tok::Star))
        lhs = make_binary(NodeKind::Multiply, lhs, unary());
      else if (accept(Tok::Slash))
        lhs = make_binary(NodeKind::Divide, lhs, unary());
      else
        return lhs;
    }
  }

  Expr unary() {
    if (accept(Tok::Minus)) return make_unary(NodeKind::Negate, unary());
    return power();
  }

  // base ^ exponent, where the exponent may itself carry a leading minus: q1^-2.
  Expr power() {
    Expr base = primary();
    if (accept(Tok::Caret)) return make_binary(NodeKind::Power, base, exponent());
    return base;
  }

  Expr exponent() {
    if (accept(Tok::Minus)) return make_unary(NodeKind::Negate, exponent());
    return power();
  }

  Expr primary() {
    const Token& t = advance();
    switch (t.kind) {
      case Tok::Number: return make_constant(t.number);
      case Tok::LParen: {
        Expr e = additive();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: return identifier(t);
      case Tok::End: throw ParseError("unexpected end of input", t.pos);
      default: throw ParseError("unexpected token", t.pos);
    }
  }

  Expr identifier(const Token& t) {
    const std::string name(t.text);
    if (auto f = lookup_builtin(name)) {
      if (!accept(Tok::LParen)) throw ParseError("function '" + name + "' requires an argument list", t.pos);
      std::vector<Expr> args;
      if (peek().kind != Tok::RParen) {
        args.push_back(additive());
        while (accept(Tok::Comma)) args.push_back(additive());
      }
      expect(Tok::RParen, "')'");
      if (args.size() != 1)
        throw ParseError("function '" + name + "' takes 1 argument, got " + std::to_string(args.size()), t.pos);
      return make_call(*f, args.front());
    }
    if (peek().kind == Tok::LParen) throw ParseError("'" + name + "' is not a function", t.pos);
    if (auto it = macros_.find(name); it != macros_.end()) return it->second;
    if (auto idx = coordinate_index(name)) return make_coordinate(*idx, n_);
    if (auto it = params_.find(name); it != params_.end()) return make_parameter(name, it->second);
    throw ParseError("unknown identifier '" + name + "'", t.pos);
  }

  std::optional<int> coordinate_index(const std::string& name) const {
    if (name.size() < 2 || (name[0] != 'q' && name[0] != 'p')) return std::nullopt;
    if (name[1] == '0') return std::nullopt;
    int k = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
      k = 10 * k + (name[i] - '0');
      if (k > n_) return std::nullopt;
    }
    if (k < 1) return std::nullopt;
    return name[0] == 'q' ? k - 1 : n_ + k - 1;
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
  int n_;
  const ParameterMap& params_;
  const MacroMap& macros_;
};

void print(const Expr& e, std::string& out) {
  switch (e->kind) {
    case NodeKind::Constant: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, e->value);
      out.append(buf, res.ptr);
      return;
    }
    case NodeKind::Coordinate: {
      const int n = e->freedoms;
      if (e->coordinate < n)
        out += "q" + std::to_string(e->coordinate + 1);
      else
        out += "p" + std::to_string(e->coordinate - n + 1);
      return;
    }
    case NodeKind::Parameter: out += e->name; return;
    case NodeKind::Negate:
      out += "(-";
      print(e->lhs, out);
      out += ")";
      return;
    case NodeKind::Call:
      out += builtin_name(e->function);
      out += "(";
      print(e->lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = e->kind == NodeKind::Add        ? " + "
                   : e->kind == NodeKind::Subtract ? " - "
                   : e->kind == NodeKind::Multiply ? " * "
                   : e->kind == NodeKind::Divide   ? " / "
                                                   : " ^ ";
  out += "(";
  print(e->lhs, out);
  out += op;
  print(e->rhs, out);
  out += ")";
}

}  // namespace

Expr parse_expression(std::string_view source, int n, const ParameterMap& params, const MacroMap& macros) {
  if (n < 1) throw DimensionError("number of freedoms must be >= 1");
  for (const auto& [name, value] : params) {
    (void)value;
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
      throw ParseError("invalid parameter name '" + name + "'", 0);
  }
  Parser parser(Lexer(source).run(), n, params, macros);
  return parser.parse();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant: return a->value == b->value;
    case NodeKind::Coordinate: return a->coordinate == b->coordinate && a->freedoms == b->freedoms;
    case NodeKind::Parameter: return a->name == b->name && a->value == b->value;
    case NodeKind::Negate: return structurally_equal(a->lhs, b->lhs);
    case NodeKind::Call: return a->function == b->function && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

bool is_constant(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Constant:
    case NodeKind::Parameter: return true;
    case NodeKind::Coordinate: return false;
    case NodeKind::Negate:
    case NodeKind::Call: return is_constant(e->lhs);
    default: return is_constant(e->lhs) && is_constant(e->rhs);
  }
}

double constant_value(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Constant:
    case NodeKind::Parameter: return e->value;
    case NodeKind::Coordinate: throw DomainError("expression is not constant: " + to_string(e));
    case NodeKind::Negate: return -constant_value(e->lhs);
    case NodeKind::Call: {
      const double x = constant_value(e->lhs);
      switch (e->function) {
        case Builtin::Sin: return std::sin(x);
        case Builtin::Cos: return std::cos(x);
        case Builtin::Exp: return std::exp(x);
        case Builtin::Log: return std::log(x);
        case Builtin::Sqrt: return std::sqrt(x);
      }
      break;
    }
    case NodeKind::Add: return constant_value(e->lhs) + constant_value(e->rhs);
    case NodeKind::Subtract: return constant_value(e->lhs) - constant_value(e->rhs);
    case NodeKind::Multiply: return constant_value(e->lhs) * constant_value(e->rhs);
    case NodeKind::Divide: return constant_value(e->lhs) / constant_value(e->rhs);
    case NodeKind::Power: return std::pow(constant_value(e->lhs), constant_value(e->rhs));
  }
  return 0.0;
}

}  // namespace maslov
