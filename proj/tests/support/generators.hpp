#pragma once

// Random clauses and traces for property tests, plus oracles that do not
// share code with the library under test.

#include "specgen/clause.hpp"
#include "specgen/eval.hpp"
#include "specgen/mutation.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace specgen::testing {

struct GenOptions {
  int max_depth = 3;
  bool allow_old = true;
  bool allow_result = true;
  bool allow_division = true;
  /// Quantifier bounds stay within [-bound_limit, bound_limit].
  int bound_limit = 12;
};

class ClauseGenerator {
 public:
  explicit ClauseGenerator(std::uint64_t seed, GenOptions opts = {}) : rng_(seed), opts_(opts) {}

  ExprPtr boolean_expr(int depth);
  ExprPtr int_expr(int depth);
  SpecClause clause();
  SpecClause clause_of_kind(ClauseKind kind);

  std::mt19937_64 &rng() { return rng_; }

 private:
  int pick(int n);
  bool chance(double p);
  ExprPtr int_leaf();
  ExprPtr quantifier(int depth);
  ExprPtr bound_expr();

  std::mt19937_64 rng_;
  GenOptions opts_;
  std::vector<std::string> bound_vars_;
  int next_quant_ = 0;
  bool in_post_ = false;
};

/// Random records for `method:m` (pre/post) and `loop:m:0` (iter), binding
/// x, y, n, i, j and the array a.
std::vector<TraceRecord> random_trace(std::mt19937_64 &rng, int records);

/// Anchor a clause of the given kind is attached to in random traces.
ProgramAnchor anchor_for(ClauseKind kind);

/// Number of mutable operators in canonical clause text, found by scanning
/// tokens rather than walking the tree.
int count_sites_by_tokens(const std::string &text);

/// Every mutant of `e` (restricted to `kinds`) mapped to its best score,
/// built by recursive cartesian product over the tree.
std::map<std::string, std::int64_t> brute_force_family(const SpecClause &templ, const MutationKindSet &kinds,
                                                       const WeightTable &weights);

/// Outcome of evaluating a boolean clause by plain enumeration.
enum class OracleResult { True, False, Error };

/// Quantifiers are enumerated over [-window, window] and filtered by their
/// range predicate; no bound extraction.
OracleResult oracle_eval_bool(const Expr &e, const TraceRecord &r, int window = 64);

/// Brute-force trace check: does any matching record falsify the clause (or
/// fail to evaluate)? Decreases uses activations delimited by pre/post records.
bool oracle_clause_fails(const SpecClause &clause, const std::vector<TraceRecord> &traces);

/// Directory holding test fixtures.
std::filesystem::path fixture_dir();
std::string read_text(const std::filesystem::path &path);

}  // namespace specgen::testing
