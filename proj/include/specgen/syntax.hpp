#pragma once

#include "specgen/clause.hpp"
#include "specgen/expr.hpp"

#include <string>
#include <string_view>

namespace specgen {

/// Parses one expression. Throws SyntaxError.
ExprPtr parse_expression(std::string_view text);

/// Parses `//@ <kind> <expr>;` or `<kind> <expr>;`. The returned clause has an
/// empty anchor and id. Throws SyntaxError or TypeMismatch.
SpecClause parse_clause(std::string_view text);

/// Canonical text with minimal parentheses. Same tree gives the same bytes.
std::string render_expr(const Expr &e);

/// `//@ <kind> <expr>;`
std::string render_clause(const SpecClause &clause);
std::string render_clause(ClauseKind kind, const Expr &e);

enum class ValueType { Bool, Int, Ref, Unknown };

/// Best-effort static type of `e`. Throws TypeMismatch when an operator is
/// applied to an operand of a definitely wrong type.
ValueType infer_type(const Expr &e);

/// Decreases clauses must be integer-valued; all other kinds boolean-valued.
/// Throws TypeMismatch.
void check_clause_type(ClauseKind kind, const Expr &e);

}  // namespace specgen
