#include "specgen/repair.hpp"

#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"

#include <algorithm>
#include <set>

namespace specgen {

std::string_view to_string(SelectionStrategy::Kind k) {
  return k == SelectionStrategy::Kind::Heuristic ? "heuristic" : "random";
}

AnnotatedProgram SelectionState::current_program() const {
  AnnotatedProgram p;
  p.source = source;
  for (const auto &id : template_order) {
    const auto &slot = selected.at(id);
    if (slot) p.clauses.push_back(slot->clause);
  }
  return p;
}

std::size_t SelectionState::live_family_members() const {
  std::size_t n = 0;
  for (const auto &[id, f] : families) n += f.size();
  return n;
}

std::size_t SelectionState::initial_family_total() const {
  std::size_t n = 0;
  for (const auto &[id, f] : families) n += f.initial_size;
  return n;
}

std::vector<std::string> SelectionState::dropped() const {
  std::vector<std::string> out;
  for (const auto &id : template_order) {
    if (!selected.at(id)) out.push_back(id);
  }
  return out;
}

std::map<std::string, Family> spec_mutation(const std::vector<SpecClause> &templates, const MutationKindSet &kinds,
                                            std::size_t cap, const WeightTable &weights) {
  std::map<std::string, Family> out;
  for (const auto &t : templates) {
    if (out.contains(t.id)) throw Error("duplicate template clause id " + t.id);
    out.emplace(t.id, enumerate_variants(t, kinds, cap, weights));
  }
  return out;
}

SelectionState init_selection(const AnnotatedProgram &templates, const RepairOptions &options) {
  SelectionState state;
  state.source = templates.source;
  state.families = spec_mutation(templates.clauses, options.kinds, options.variant_cap, options.weights);
  for (const auto &t : templates.clauses) {
    state.template_order.push_back(t.id);
    const auto &family = state.families.at(t.id);
    // The unmutated template scores 0 and always survives truncation under
    // non-positive weights; otherwise start from the family's best member.
    const Variant *start = family.find(render_clause(t));
    if (!start) start = select_by_heuristic(family, options.weights);
    state.selected.emplace(t.id, start ? std::optional<Variant>(*start) : std::nullopt);
  }
  return state;
}

const Family &get_family_of(const SelectionState &state, const std::string &clause_id) {
  auto it = state.families.find(clause_id);
  if (it == state.families.end()) throw UnknownClause("unknown clause id " + clause_id);
  return it->second;
}

Reselector::Reselector(const WeightTable &weights, SelectionStrategy strategy)
    : weights_(weights), strategy_(strategy), rng_(strategy.seed) {}

const Variant *Reselector::pick(const Family &family) {
  if (strategy_.kind == SelectionStrategy::Kind::Random) return select_random(family, rng_);
  return select_by_heuristic(family, weights_);
}

void Reselector::re_select(SelectionState &state, const std::vector<std::string> &refuted_ids, int iteration) {
  for (const auto &id : refuted_ids) {
    auto slot = state.selected.find(id);
    if (slot == state.selected.end() || !slot->second) {
      throw UnknownClause("refuted clause " + id + " is not currently selected");
    }
  }
  for (const auto &id : refuted_ids) {
    auto &slot = state.selected.at(id);
    auto &family = state.families.at(id);
    std::string text = slot->text;
    family.remove(text);
    state.refuted_history.push_back({iteration, id, text});
    const Variant *next = pick(family);
    slot = next ? std::optional<Variant>(*next) : std::nullopt;

    auto replaced = std::count_if(state.refuted_history.begin(), state.refuted_history.end(),
                                  [&](const RefutedEntry &e) { return e.clause_id == id; });
    if (static_cast<std::size_t>(replaced) * 2 > family.initial_size &&
        std::find(state.thrashing.begin(), state.thrashing.end(), id) == state.thrashing.end()) {
      state.thrashing.push_back(id);
    }
  }
}

void spec_selection(SelectionState &state, Verifier &verifier, const RepairOptions &options) {
  auto start = std::chrono::steady_clock::now();
  Reselector reselector(options.weights, options.strategy);
  for (;;) {
    auto program = state.current_program();
    auto verdict = verifier.verify(program);
    ++state.verifier_calls;
    state.last_verdict = verdict;

    if (verdict.outcome == VerdictOutcome::Pass) return;
    if (verdict.outcome == VerdictOutcome::Crash) {
      std::string detail = verdict.notes.empty() ? "" : ": " + verdict.notes.front();
      throw VerifierUnavailable("verifier crashed" + detail);
    }

    std::set<std::string> live;
    for (const auto &c : program.clauses) live.insert(c.id);
    std::vector<std::string> refuted;
    for (const auto &f : verdict.failures) {
      if (f.clause_id && live.contains(*f.clause_id) &&
          std::find(refuted.begin(), refuted.end(), *f.clause_id) == refuted.end()) {
        refuted.push_back(*f.clause_id);
      }
    }
    // A rejection that names no selected clause (timeout, unattributed
    // diagnostic) refutes the whole selection.
    if (refuted.empty()) {
      for (const auto &c : program.clauses) refuted.push_back(c.id);
    }
    if (refuted.empty()) return;  // nothing left to refute

    reselector.re_select(state, refuted, state.verifier_calls);

    if (options.budget.count() > 0 && std::chrono::steady_clock::now() - start > options.budget) {
      throw TimeoutBudgetExceeded("repair loop exceeded its wall-clock budget after " +
                                  std::to_string(state.verifier_calls) + " verifier calls");
    }
  }
}

RepairResult mutation_based_gen(const AnnotatedProgram &templates, Verifier &verifier, const RepairOptions &options) {
  RepairResult out;
  out.state = init_selection(templates, options);
  spec_selection(out.state, verifier, options);
  out.program = out.state.current_program();
  return out;
}

}  // namespace specgen
