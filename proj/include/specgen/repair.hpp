#pragma once

// Mutation-based repair: every template clause gets a family of operator
// variants; the selected set starts as the templates and is verified
// repeatedly. Each refuted variant leaves its family for good and is replaced
// by the next choice from the same family; a template whose family runs dry is
// dropped. The loop ends when a verdict refutes nothing, so it makes at most
// 1 + sum(|family|) verifier calls.

#include "specgen/clause.hpp"
#include "specgen/mutation.hpp"
#include "specgen/verifier.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace specgen {

struct SelectionStrategy {
  enum class Kind { Heuristic, Random };
  Kind kind = Kind::Heuristic;
  std::uint64_t seed = 0;

  static SelectionStrategy heuristic() { return {}; }
  static SelectionStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

std::string_view to_string(SelectionStrategy::Kind k);

struct RefutedEntry {
  int iteration;  // 1-based verifier call that refuted it
  std::string clause_id;
  std::string text;

  friend bool operator==(const RefutedEntry &, const RefutedEntry &) = default;
};

struct SelectionState {
  std::vector<std::string> template_order;
  std::map<std::string, Family> families;                   // template id -> live members
  std::map<std::string, std::optional<Variant>> selected;  // nullopt = dropped
  std::vector<RefutedEntry> refuted_history;
  int verifier_calls = 0;
  /// Templates replaced more than half their family's size.
  std::vector<std::string> thrashing;
  std::string source;
  VerifierVerdict last_verdict;

  /// Source plus the live selected clauses, in template order.
  AnnotatedProgram current_program() const;
  std::size_t live_family_members() const;
  std::size_t initial_family_total() const;
  std::vector<std::string> dropped() const;
};

struct RepairOptions {
  MutationKindSet kinds = all_mutation_kinds();
  WeightTable weights;
  std::size_t variant_cap = kDefaultVariantCap;
  SelectionStrategy strategy;
  /// Wall-clock budget for the whole loop; zero disables it.
  std::chrono::milliseconds budget{std::chrono::minutes(30)};
};

/// Family per template, keyed by template id.
std::map<std::string, Family> spec_mutation(const std::vector<SpecClause> &templates, const MutationKindSet &kinds,
                                            std::size_t cap, const WeightTable &weights = WeightTable{});

/// State with every template selected as itself.
SelectionState init_selection(const AnnotatedProgram &templates, const RepairOptions &options);

class Reselector {
 public:
  Reselector(const WeightTable &weights, SelectionStrategy strategy);

  /// Removes each refuted variant and selects its replacement. Throws
  /// UnknownClause for ids that are not currently selected.
  void re_select(SelectionState &state, const std::vector<std::string> &refuted_ids, int iteration);

 private:
  const Variant *pick(const Family &family);

  WeightTable weights_;
  SelectionStrategy strategy_;
  std::mt19937_64 rng_;
};

/// Live members of a template's family. Throws UnknownClause.
const Family &get_family_of(const SelectionState &state, const std::string &clause_id);

/// Runs the verify / re-select loop to completion. Throws VerifierUnavailable
/// on adapter crashes and TimeoutBudgetExceeded.
void spec_selection(SelectionState &state, Verifier &verifier, const RepairOptions &options);

struct RepairResult {
  AnnotatedProgram program;
  SelectionState state;
};

RepairResult mutation_based_gen(const AnnotatedProgram &templates, Verifier &verifier,
                                const RepairOptions &options = RepairOptions{});

}  // namespace specgen
