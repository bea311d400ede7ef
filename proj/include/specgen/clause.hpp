#pragma once

#include "specgen/expr.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specgen {

enum class ClauseKind { Requires, Ensures, Maintaining, Decreases };

std::string_view to_string(ClauseKind kind);
std::optional<ClauseKind> clause_kind_from_keyword(std::string_view word);

/// A method header, or the n-th loop (0-based, textual order) inside a method.
struct ProgramAnchor {
  std::string method;
  std::optional<int> loop;

  bool is_loop() const { return loop.has_value(); }

  /// `method:NAME` or `loop:NAME:ORDINAL`, the form used by trace files.
  std::string to_string() const;
  static std::optional<ProgramAnchor> parse(std::string_view text);

  friend bool operator==(const ProgramAnchor &, const ProgramAnchor &) = default;
  friend auto operator<=>(const ProgramAnchor &, const ProgramAnchor &) = default;
};

struct SpecClause {
  ClauseKind kind = ClauseKind::Requires;
  ExprPtr expr;
  ProgramAnchor anchor;
  std::string id;
};

/// Same kind and structurally equal expression. Anchor and id are ignored.
bool same_clause(const SpecClause &a, const SpecClause &b);

/// `anchor/kind/ordinal`, e.g. `loop:twoSum:0/maintaining/1`.
std::string make_clause_id(const ProgramAnchor &anchor, ClauseKind kind, int ordinal);

/// Source text with all annotation lines removed, plus the clauses that
/// belong in it.
struct AnnotatedProgram {
  std::string source;
  std::vector<SpecClause> clauses;

  const SpecClause *find(std::string_view id) const;
};

/// Assigns deterministic ids: ordinal counts clauses sharing anchor and kind,
/// in list order.
void assign_ids(std::vector<SpecClause> &clauses);

}  // namespace specgen
