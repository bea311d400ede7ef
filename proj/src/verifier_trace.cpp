#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"
#include "specgen/verifier.hpp"

namespace specgen {
namespace {

TracePhase phase_for(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Requires: return TracePhase::Pre;
    case ClauseKind::Ensures: return TracePhase::Post;
    default: return TracePhase::Iter;
  }
}

FailureCategory category_for(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Requires: return FailureCategory::UnprovablePrecondition;
    case ClauseKind::Ensures: return FailureCategory::UnprovablePostcondition;
    case ClauseKind::Maintaining: return FailureCategory::UnprovableInvariant;
    case ClauseKind::Decreases: return FailureCategory::NonterminationDecreases;
  }
  return FailureCategory::Unknown;
}

// A loop activation ends at any pre/post record of its method and at any
// iteration record of a textually earlier loop of the same method (which
// encloses it, or has finished before it starts).
bool ends_activation(const TraceRecord &r, const ProgramAnchor &loop) {
  if (r.anchor.method != loop.method) return false;
  if (!r.anchor.is_loop()) return true;
  return *r.anchor.loop < *loop.loop;
}

std::string record_label(std::size_t index, const TraceRecord &r) {
  return "trace record #" + std::to_string(index) + " (" + r.anchor.to_string() + ", " +
         std::string(to_string(r.phase)) + ")";
}

ClauseCheck check_boolean(const SpecClause &clause, const std::vector<TraceRecord> &traces) {
  ClauseCheck out;
  out.clause_id = clause.id;
  auto phase = phase_for(clause.kind);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto &r = traces[i];
    if (r.anchor != clause.anchor || r.phase != phase) continue;
    ++out.records_checked;
    try {
      if (!eval_bool(*clause.expr, r)) {
        out.status = ClauseStatus::Falsified;
        out.failing_record = i;
        out.message = "falsified by " + record_label(i, r);
        return out;
      }
    } catch (const EvalError &e) {
      out.status = ClauseStatus::Error;
      out.failing_record = i;
      out.message = "evaluation error on " + record_label(i, r) + ": " + e.what();
      return out;
    }
  }
  out.status = out.records_checked ? ClauseStatus::Holds : ClauseStatus::Uncovered;
  return out;
}

ClauseCheck check_decreases(const SpecClause &clause, const std::vector<TraceRecord> &traces) {
  ClauseCheck out;
  out.clause_id = clause.id;
  std::optional<BigInt> previous;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto &r = traces[i];
    if (clause.anchor.is_loop() && ends_activation(r, clause.anchor)) {
      previous.reset();
      continue;
    }
    if (r.anchor != clause.anchor || r.phase != TracePhase::Iter) continue;
    ++out.records_checked;
    try {
      auto v = eval_expr(*clause.expr, r);
      const auto *n = std::get_if<BigInt>(&v);
      if (!n) throw EvalError(EvalErrorKind::TypeError, "decreases expression is not an integer: " + describe(v));
      if (*n < 0) {
        out.status = ClauseStatus::Falsified;
        out.message = "value " + n->str() + " is negative at " + record_label(i, r);
      } else if (previous && *n >= *previous) {
        out.status = ClauseStatus::Falsified;
        out.message = "value " + n->str() + " does not decrease from " + previous->str() + " at " +
                      record_label(i, r);
      }
      if (out.status == ClauseStatus::Falsified) {
        out.failing_record = i;
        return out;
      }
      previous = *n;
    } catch (const EvalError &e) {
      out.status = ClauseStatus::Error;
      out.failing_record = i;
      out.message = "evaluation error on " + record_label(i, r) + ": " + e.what();
      return out;
    }
  }
  out.status = out.records_checked ? ClauseStatus::Holds : ClauseStatus::Uncovered;
  return out;
}

}  // namespace

std::string_view to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::Holds: return "holds";
    case ClauseStatus::Falsified: return "falsified";
    case ClauseStatus::Error: return "error";
    case ClauseStatus::Uncovered: return "uncovered";
  }
  return "?";
}

std::vector<ClauseCheck> check_clauses(const AnnotatedProgram &program, const std::vector<TraceRecord> &traces) {
  std::vector<ClauseCheck> out;
  out.reserve(program.clauses.size());
  for (const auto &clause : program.clauses) {
    out.push_back(clause.kind == ClauseKind::Decreases ? check_decreases(clause, traces)
                                                      : check_boolean(clause, traces));
  }
  return out;
}

VerifierVerdict verify_trace(const AnnotatedProgram &program, const std::vector<TraceRecord> &traces) {
  auto checks = check_clauses(program, traces);
  std::vector<FailureReport> failures;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto &clause = program.clauses[i];
    const auto &c = checks[i];
    if (c.status == ClauseStatus::Uncovered) {
      notes.push_back("coverage: no trace records for " + clause.id);
      continue;
    }
    if (c.status == ClauseStatus::Holds) continue;
    FailureReport f;
    f.clause_id = clause.id;
    f.category = c.status == ClauseStatus::Error ? FailureCategory::TypeError : category_for(clause.kind);
    f.raw_message = clause.id + ": `" + render_clause(clause) + "` " + c.message;
    failures.push_back(std::move(f));
  }
  VerifierVerdict verdict = failures.empty() ? VerifierVerdict::pass() : VerifierVerdict::fail(std::move(failures));
  verdict.notes = std::move(notes);
  verdict.notes.push_back("trace-based: a pass means no counterexample among " + std::to_string(traces.size()) +
                          " records");
  return verdict;
}

TraceVerifier::TraceVerifier(std::vector<TraceRecord> traces, FailuresPerCall failures_per_call)
    : traces_(std::move(traces)), failures_per_call_(failures_per_call) {}

VerifierVerdict TraceVerifier::verify(const AnnotatedProgram &program) {
  auto start = std::chrono::steady_clock::now();
  auto verdict = verify_trace(program, traces_);
  apply_failure_limit(verdict, failures_per_call_);
  verdict.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return verdict;
}

// --- mock --------------------------------------------------------------------

MockVerifier MockVerifier::accepting(const std::vector<std::string> &accepted, FailuresPerCall failures_per_call) {
  MockVerifier m;
  m.truth_.emplace();
  for (const auto &t : accepted) m.truth_->insert(normalize_clause_text(t));
  m.failures_per_call_ = failures_per_call;
  return m;
}

MockVerifier MockVerifier::scripted(std::vector<VerifierVerdict> verdicts) {
  MockVerifier m;
  m.script_ = std::move(verdicts);
  return m;
}

VerifierVerdict MockVerifier::verify(const AnnotatedProgram &program) {
  MockCall call;
  for (const auto &c : program.clauses) call.clause_texts.push_back(render_clause(c));

  if (truth_) {
    std::vector<FailureReport> failures;
    for (std::size_t i = 0; i < program.clauses.size(); ++i) {
      if (truth_->contains(call.clause_texts[i])) continue;
      FailureReport f;
      f.clause_id = program.clauses[i].id;
      f.category = category_for(program.clauses[i].kind);
      f.raw_message = "mock verifier rejected " + program.clauses[i].id + ": " + call.clause_texts[i];
      failures.push_back(std::move(f));
    }
    call.verdict = failures.empty() ? VerifierVerdict::pass() : VerifierVerdict::fail(std::move(failures));
    apply_failure_limit(call.verdict, failures_per_call_);
  } else {
    if (next_ >= script_.size()) {
      throw ScriptExhausted("mock verifier script exhausted after " + std::to_string(script_.size()) + " calls");
    }
    call.verdict = script_[next_++];
  }
  calls_.push_back(call);
  return call.verdict;
}

}  // namespace specgen
