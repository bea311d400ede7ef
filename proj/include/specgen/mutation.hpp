#pragma once

// Operator mutation of specification clauses.
//
// Four mutation kinds, each substituting an operator with another of the same
// kind:
//
//   Predicative  \forall -> \exists          \exists -> \forall
//   Logical      &&  -> ||                   ||  -> &&
//                <==> -> <==, ==>            ==> -> <==      <== -> ==>
//   Comparative  <=  -> <,  l - 1 <= r       >=  -> >,  l + 1 >= r
//                <   -> <=                   >   -> >=
//                ==  -> !=                   !=  -> ==
//   Arithmetic   +   -> -                    -   -> +   (binary only)
//
// A family holds every combination of per-site choices over the sites of the
// template, scored by the weighted mutation count.

#include "specgen/clause.hpp"
#include "specgen/expr.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace specgen {

enum class MutationKind { Predicative = 0, Logical = 1, Comparative = 2, Arithmetic = 3 };

inline constexpr std::array<MutationKind, 4> kAllMutationKinds = {
    MutationKind::Predicative, MutationKind::Logical, MutationKind::Comparative,
    MutationKind::Arithmetic};

std::string_view to_string(MutationKind kind);
std::optional<MutationKind> mutation_kind_from_string(std::string_view s);

using MutationKindSet = std::set<MutationKind>;
MutationKindSet all_mutation_kinds();

using Operator = std::variant<BinaryOp, QuantKind>;
std::string operator_token(const Operator &op);

/// Child indices from the root: quantifier range=0 body=1, binary lhs=0 rhs=1,
/// unary/old/field operand=0, array base=0 index=1.
using TreePath = std::vector<std::uint8_t>;

struct MutationSite {
  TreePath path;
  MutationKind kind;
  Operator original;

  friend bool operator==(const MutationSite &, const MutationSite &) = default;
};

enum class LeftShift { None, MinusOne, PlusOne };

struct Replacement {
  Operator op;
  LeftShift shift = LeftShift::None;

  friend bool operator==(const Replacement &, const Replacement &) = default;
};

/// Display form of a replacement, e.g. `<`, `- 1 <=`.
std::string replacement_token(const Replacement &r);

struct MutationChoice {
  MutationSite site;
  Replacement replacement;

  friend bool operator==(const MutationChoice &, const MutationChoice &) = default;
};

/// Mutation kind of an operator, if it is mutable at all.
std::optional<MutationKind> mutation_kind_of(const Operator &op);

/// Replacements for one operator, in fixed order.
std::vector<Replacement> replacements_for(const Operator &op);

/// Pre-order list of every mutable operator in `expr`, including inside \old.
std::vector<MutationSite> enumerate_sites(const Expr &expr);

/// Throws SitePathInvalid when the site does not resolve or its operator differs.
ExprPtr apply_choice(const ExprPtr &expr, const MutationChoice &choice);

/// Applies choices that all refer to paths of the original tree. Throws
/// SitePathInvalid.
ExprPtr apply_choices(const ExprPtr &expr, const std::vector<MutationChoice> &choices);

struct WeightTable {
  std::array<std::int64_t, 4> weight = {-4, -2, -1, -4};  // indexed by MutationKind

  std::int64_t operator[](MutationKind k) const { return weight[static_cast<int>(k)]; }
  std::int64_t &operator[](MutationKind k) { return weight[static_cast<int>(k)]; }
};

using MutationCounts = std::array<int, 4>;

struct Variant {
  SpecClause clause;  // template clause with the mutated expression
  std::string template_id;
  MutationCounts counts{};
  std::vector<MutationChoice> choices;
  std::string text;  // canonical rendering, used for identity and tie-breaks
  std::int64_t score = 0;

  const ExprPtr &expr() const { return clause.expr; }
  int count(MutationKind k) const { return counts[static_cast<int>(k)]; }
  int total_mutations() const;
};

struct Family {
  std::string template_id;
  SpecClause template_clause;
  std::vector<Variant> members;  // live members, ordered by (score desc, text asc)
  std::size_t initial_size = 0;
  bool truncated = false;
  /// Number of raw combinations, saturated at UINT64_MAX.
  std::uint64_t raw_combinations = 0;
  std::size_t merged_duplicates = 0;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
  const Variant *find(std::string_view text) const;
  /// Returns false when no live member has this text.
  bool remove(std::string_view text);
};

inline constexpr std::size_t kDefaultVariantCap = 4096;

/// Sum over kinds of count * weight.
std::int64_t score_variant(const Variant &variant, const WeightTable &weights);

/// Every combination of per-site choices restricted to `kinds`, including the
/// unmutated template. Duplicates by text keep the best score. Above `cap` raw
/// combinations the best `cap` variants are kept and the family is marked
/// truncated.
Family enumerate_variants(const SpecClause &templ, const MutationKindSet &kinds,
                          std::size_t cap = kDefaultVariantCap,
                          const WeightTable &weights = WeightTable{});

/// Argmax score over live members; ties go to the smaller text.
const Variant *select_by_heuristic(const Family &family, const WeightTable &weights);

/// Uniform choice over live members.
const Variant *select_random(const Family &family, std::uint64_t seed);
const Variant *select_random(const Family &family, std::mt19937_64 &rng);

/// Unbiased draw in [0, n) from the raw engine output, so the sequence is the
/// same on every standard library.
std::uint64_t uniform_index(std::mt19937_64 &rng, std::uint64_t n);

}  // namespace specgen
