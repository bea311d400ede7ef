#pragma once

// Evaluation of clauses against runtime trace records.
//
// Integers are arbitrary precision. This deliberately differs from Java's
// 32-bit int: an expression that overflows in Java evaluates to the exact
// mathematical value here. Division truncates toward zero and `%` takes the
// sign of the dividend, as in Java.

#include "specgen/clause.hpp"
#include "specgen/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace specgen {

struct NullValue {
  friend bool operator==(NullValue, NullValue) { return true; }
};

using IntArray = std::vector<BigInt>;
using Value = std::variant<BigInt, bool, IntArray, std::string, NullValue>;

std::string describe(const Value &v);

using Bindings = std::map<std::string, Value, std::less<>>;

enum class TracePhase { Pre, Post, Iter };

std::string_view to_string(TracePhase phase);
std::optional<TracePhase> trace_phase_from_string(std::string_view s);

struct TraceRecord {
  ProgramAnchor anchor;
  TracePhase phase = TracePhase::Pre;
  Bindings bindings;
  std::optional<Value> result;
  std::optional<Bindings> old;
};

/// Closed interval; empty when lo > hi.
struct Interval {
  BigInt lo;
  BigInt hi;

  bool empty() const { return lo > hi; }
  BigInt width() const { return empty() ? BigInt(0) : BigInt(hi - lo + 1); }
};

/// Largest quantifier domain the evaluator will enumerate.
inline constexpr long kMaxQuantifierDomain = 1'000'000;

/// Throws EvalError.
Value eval_expr(const Expr &expr, const TraceRecord &record);

bool eval_bool(const Expr &expr, const TraceRecord &record);

/// Finite interval for `var` implied by the conjunction `range`. Bound
/// expressions are evaluated against `record`. Throws EvalError
/// (UnboundedQuantifier when no lower or no upper bound is found).
Interval extract_bounds(const Expr &range, std::string_view var, const TraceRecord &record);

}  // namespace specgen
