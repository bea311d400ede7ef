#include "specgen/expr.hpp"

#include "specgen/clause.hpp"

#include <charconv>
#include <map>
#include <tuple>

namespace specgen {

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Equiv: return "<==>";
    case BinaryOp::Implies: return "==>";
    case BinaryOp::RevImplies: return "<==";
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
  }
  return "?";
}

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Not ? "!" : "-"; }

std::string_view to_string(QuantKind kind) {
  return kind == QuantKind::Forall ? "\\forall" : "\\exists";
}

namespace build {

ExprPtr quant(QuantKind kind, std::string v, ExprPtr range, ExprPtr body) {
  return std::make_shared<const Expr>(
      Expr{Quantifier{kind, std::move(v), std::move(range), std::move(body)}});
}
ExprPtr forall(std::string v, ExprPtr range, ExprPtr body) {
  return quant(QuantKind::Forall, std::move(v), std::move(range), std::move(body));
}
ExprPtr exists(std::string v, ExprPtr range, ExprPtr body) {
  return quant(QuantKind::Exists, std::move(v), std::move(range), std::move(body));
}
ExprPtr bin(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr un(UnaryOp op, ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand)}});
}
ExprPtr var(std::string name) { return std::make_shared<const Expr>(Expr{Var{std::move(name)}}); }
ExprPtr lit(BigInt value) { return std::make_shared<const Expr>(Expr{IntLit{std::move(value)}}); }
ExprPtr boolean(bool value) { return std::make_shared<const Expr>(Expr{BoolLit{value}}); }
ExprPtr null() { return std::make_shared<const Expr>(Expr{NullLit{}}); }
ExprPtr index(ExprPtr base, ExprPtr idx) {
  return std::make_shared<const Expr>(Expr{ArrayIndex{std::move(base), std::move(idx)}});
}
ExprPtr field(ExprPtr base, std::string name) {
  return std::make_shared<const Expr>(Expr{FieldAccess{std::move(base), std::move(name)}});
}
ExprPtr result() { return std::make_shared<const Expr>(Expr{ResultRef{}}); }
ExprPtr old(ExprPtr inner) { return std::make_shared<const Expr>(Expr{OldRef{std::move(inner)}}); }

}  // namespace build

namespace {

struct EqualVisitor {
  const ExprNode &other;

  bool operator()(const Quantifier &a) const {
    const auto &b = std::get<Quantifier>(other);
    return a.kind == b.kind && a.var == b.var && equal(a.range, b.range) && equal(a.body, b.body);
  }
  bool operator()(const Binary &a) const {
    const auto &b = std::get<Binary>(other);
    return a.op == b.op && equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
  }
  bool operator()(const Unary &a) const {
    const auto &b = std::get<Unary>(other);
    return a.op == b.op && equal(a.operand, b.operand);
  }
  bool operator()(const Var &a) const { return a.name == std::get<Var>(other).name; }
  bool operator()(const IntLit &a) const { return a.value == std::get<IntLit>(other).value; }
  bool operator()(const BoolLit &a) const { return a.value == std::get<BoolLit>(other).value; }
  bool operator()(const NullLit &) const { return true; }
  bool operator()(const ArrayIndex &a) const {
    const auto &b = std::get<ArrayIndex>(other);
    return equal(a.base, b.base) && equal(a.index, b.index);
  }
  bool operator()(const FieldAccess &a) const {
    const auto &b = std::get<FieldAccess>(other);
    return a.field == b.field && equal(a.base, b.base);
  }
  bool operator()(const ResultRef &) const { return true; }
  bool operator()(const OldRef &a) const { return equal(a.inner, std::get<OldRef>(other).inner); }
};

}  // namespace

bool equal(const Expr &a, const Expr &b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(EqualVisitor{b.node}, a.node);
}

bool equal(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Equiv: return 1;
    case BinaryOp::Implies:
    case BinaryOp::RevImplies: return 2;
    case BinaryOp::Or: return 3;
    case BinaryOp::And: return 4;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 5;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 6;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 7;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 8;
  }
  return 0;
}

int precedence(const Expr &e) {
  if (const auto *b = std::get_if<Binary>(&e.node)) return precedence(b->op);
  if (std::holds_alternative<Unary>(e.node)) return kUnaryPrecedence;
  return kPrimaryPrecedence;
}

bool is_logical(BinaryOp op) { return precedence(op) <= 4; }
bool is_comparison(BinaryOp op) { return precedence(op) == 5 || precedence(op) == 6; }
bool is_arithmetic(BinaryOp op) { return precedence(op) >= 7; }

bool mentions(const Expr &e, std::string_view name) {
  return std::visit(
      [&](const auto &n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return n.name == name;
        } else if constexpr (std::is_same_v<T, Quantifier>) {
          if (n.var == name) return false;
          return mentions(*n.range, name) || mentions(*n.body, name);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return mentions(*n.lhs, name) || mentions(*n.rhs, name);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return mentions(*n.operand, name);
        } else if constexpr (std::is_same_v<T, ArrayIndex>) {
          return mentions(*n.base, name) || mentions(*n.index, name);
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          return mentions(*n.base, name);
        } else if constexpr (std::is_same_v<T, OldRef>) {
          return mentions(*n.inner, name);
        } else {
          return false;
        }
      },
      e.node);
}

// --- clauses ---------------------------------------------------------------

std::string_view to_string(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Requires: return "requires";
    case ClauseKind::Ensures: return "ensures";
    case ClauseKind::Maintaining: return "maintaining";
    case ClauseKind::Decreases: return "decreases";
  }
  return "?";
}

std::optional<ClauseKind> clause_kind_from_keyword(std::string_view word) {
  if (word == "requires") return ClauseKind::Requires;
  if (word == "ensures") return ClauseKind::Ensures;
  if (word == "maintaining" || word == "loop_invariant") return ClauseKind::Maintaining;
  if (word == "decreases" || word == "decreasing" || word == "loop_variant") {
    return ClauseKind::Decreases;
  }
  return std::nullopt;
}

std::string ProgramAnchor::to_string() const {
  if (loop) return "loop:" + method + ":" + std::to_string(*loop);
  return "method:" + method;
}

std::optional<ProgramAnchor> ProgramAnchor::parse(std::string_view text) {
  if (text.starts_with("method:")) {
    auto name = text.substr(7);
    if (name.empty() || name.find(':') != std::string_view::npos) return std::nullopt;
    return ProgramAnchor{std::string(name), std::nullopt};
  }
  if (text.starts_with("loop:")) {
    auto rest = text.substr(5);
    auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    auto digits = rest.substr(colon + 1);
    int ordinal = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ordinal);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || ordinal < 0) {
      return std::nullopt;
    }
    return ProgramAnchor{std::string(rest.substr(0, colon)), ordinal};
  }
  return std::nullopt;
}

bool same_clause(const SpecClause &a, const SpecClause &b) {
  return a.kind == b.kind && equal(a.expr, b.expr);
}

std::string make_clause_id(const ProgramAnchor &anchor, ClauseKind kind, int ordinal) {
  return anchor.to_string() + "/" + std::string(to_string(kind)) + "/" + std::to_string(ordinal);
}

const SpecClause *AnnotatedProgram::find(std::string_view id) const {
  for (const auto &c : clauses) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void assign_ids(std::vector<SpecClause> &clauses) {
  std::map<std::tuple<ProgramAnchor, ClauseKind>, int> next;
  for (auto &c : clauses) {
    int &ordinal = next[{c.anchor, c.kind}];
    c.id = make_clause_id(c.anchor, c.kind, ordinal++);
  }
}

}  // namespace specgen
