#pragma once

// Expression tree for the JML subset handled by the toolchain: integer
// quantifiers, logical / comparison / arithmetic operators, array indexing,
// `.length`, `\result` and `\old`.
//
// Nodes are immutable and shared, so rewriting one operator copies only the
// spine from the root to that node.

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace specgen {

using BigInt = boost::multiprecision::cpp_int;

enum class BinaryOp {
  Equiv,       // <==>
  Implies,     // ==>
  RevImplies,  // <==
  Or,
  And,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
};

enum class UnaryOp { Not, Neg };

enum class QuantKind { Forall, Exists };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);
std::string_view to_string(QuantKind kind);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Quantifier {
  QuantKind kind;
  std::string var;
  ExprPtr range;
  ExprPtr body;
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Unary {
  UnaryOp op;
  ExprPtr operand;
};

struct Var {
  std::string name;
};

// Parsed literals are never negative; `-5` parses as Unary(Neg, 5).
struct IntLit {
  BigInt value;
};

struct BoolLit {
  bool value;
};

struct NullLit {};

struct ArrayIndex {
  ExprPtr base;
  ExprPtr index;
};

struct FieldAccess {
  ExprPtr base;
  std::string field;
};

struct ResultRef {};

struct OldRef {
  ExprPtr inner;
};

using ExprNode = std::variant<Quantifier, Binary, Unary, Var, IntLit, BoolLit, NullLit,
                              ArrayIndex, FieldAccess, ResultRef, OldRef>;

struct Expr {
  ExprNode node;
};

namespace build {

ExprPtr quant(QuantKind kind, std::string var, ExprPtr range, ExprPtr body);
ExprPtr forall(std::string var, ExprPtr range, ExprPtr body);
ExprPtr exists(std::string var, ExprPtr range, ExprPtr body);
ExprPtr bin(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr un(UnaryOp op, ExprPtr operand);
ExprPtr var(std::string name);
ExprPtr lit(BigInt value);
ExprPtr boolean(bool value);
ExprPtr null();
ExprPtr index(ExprPtr base, ExprPtr idx);
ExprPtr field(ExprPtr base, std::string name);
ExprPtr result();
ExprPtr old(ExprPtr inner);

}  // namespace build

/// Deep structural equality.
bool equal(const Expr &a, const Expr &b);
bool equal(const ExprPtr &a, const ExprPtr &b);

/// Binding strength used by both the parser and the printer; larger binds tighter.
int precedence(BinaryOp op);
int precedence(const Expr &e);

inline constexpr int kUnaryPrecedence = 9;
inline constexpr int kPrimaryPrecedence = 10;

bool is_logical(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_arithmetic(BinaryOp op);

/// True if `name` occurs free in `e`.
bool mentions(const Expr &e, std::string_view name);

}  // namespace specgen
