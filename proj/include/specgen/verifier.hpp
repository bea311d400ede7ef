#pragma once

#include "specgen/clause.hpp"
#include "specgen/eval.hpp"

#include <chrono>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace specgen {

enum class FailureCategory {
  SyntaxError,
  UnprovablePostcondition,
  UnprovableInvariant,
  UnprovablePrecondition,
  NonterminationDecreases,
  TypeError,
  Unknown,
};

std::string_view to_string(FailureCategory c);
std::optional<FailureCategory> failure_category_from_string(std::string_view s);

struct FailureReport {
  std::optional<std::string> clause_id;
  std::string raw_message;
  FailureCategory category = FailureCategory::Unknown;
  std::optional<int> source_line;
};

enum class VerdictOutcome { Pass, Fail, Timeout, Crash };

std::string_view to_string(VerdictOutcome o);

struct VerifierVerdict {
  VerdictOutcome outcome = VerdictOutcome::Pass;
  std::vector<FailureReport> failures;  // nonempty iff outcome == Fail
  std::chrono::milliseconds wall_time{0};
  /// Free-form adapter notes, e.g. trace coverage caveats.
  std::vector<std::string> notes;

  bool passed() const { return outcome == VerdictOutcome::Pass; }

  static VerifierVerdict pass() { return {}; }
  static VerifierVerdict fail(std::vector<FailureReport> failures);
};

enum class FailuresPerCall { One, All };

std::string_view to_string(FailuresPerCall f);

/// Keeps only the first failure when `mode` is One.
void apply_failure_limit(VerifierVerdict &verdict, FailuresPerCall mode);

/// Adapters handle one call at a time; use one instance per thread.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifierVerdict verify(const AnnotatedProgram &program) = 0;
};

// --- diagnostic classification ---------------------------------------------

struct ClassificationRule {
  std::string pattern;  // ECMAScript regex, matched case-insensitively
  FailureCategory category;
};

/// Rules tuned to OpenJML's diagnostic wording.
std::vector<ClassificationRule> default_classification_rules();

/// First matching rule wins; Unknown otherwise.
FailureCategory classify_failure(std::string_view message, const std::vector<ClassificationRule> &rules);

// --- external command adapter -----------------------------------------------

struct ExecConfig {
  /// Run through /bin/sh; `{file}` is replaced with the path of the program.
  std::string command;
  std::chrono::milliseconds timeout{std::chrono::seconds(1800)};
  FailuresPerCall failures_per_call = FailuresPerCall::One;
  /// Must capture (1) the line number and (2) the message.
  std::string diagnostic_pattern = R"(^[^:\s]+\.java:(\d+):\s*(?:verify|error|warning):\s*(.*)$)";
  /// Diagnostics matching this are folded into the previous failure, and
  /// their line is used to attribute it.
  std::string association_pattern = R"(Associated declaration)";
  std::vector<ClassificationRule> rules = default_classification_rules();
};

struct CommandResult {
  int exit_code = 0;
  bool timed_out = false;
  std::string output;  // stdout and stderr interleaved
  std::chrono::milliseconds wall_time{0};
};

/// Throws CommandNotFound when the shell cannot start the command.
CommandResult run_command(const std::string &command, std::chrono::milliseconds timeout);

/// Maps a finished command to a verdict. `clause_lines[i]` is the 1-based line
/// of clause i in the instrumented text.
VerifierVerdict interpret_command_result(const CommandResult &result, const AnnotatedProgram &program,
                                         const std::vector<int> &clause_lines, const ExecConfig &cfg);

class ExecVerifier : public Verifier {
 public:
  explicit ExecVerifier(ExecConfig cfg);
  VerifierVerdict verify(const AnnotatedProgram &program) override;

 private:
  ExecConfig cfg_;
};

// --- trace checker -----------------------------------------------------------

enum class ClauseStatus { Holds, Falsified, Error, Uncovered };

std::string_view to_string(ClauseStatus s);

struct ClauseCheck {
  std::string clause_id;
  ClauseStatus status = ClauseStatus::Uncovered;
  std::size_t records_checked = 0;
  std::optional<std::size_t> failing_record;  // index into the trace
  std::string message;
};

/// Per-clause detail behind verify_trace.
std::vector<ClauseCheck> check_clauses(const AnnotatedProgram &program, const std::vector<TraceRecord> &traces);

/// Pass means no counterexample exists in the supplied traces.
VerifierVerdict verify_trace(const AnnotatedProgram &program, const std::vector<TraceRecord> &traces);

class TraceVerifier : public Verifier {
 public:
  explicit TraceVerifier(std::vector<TraceRecord> traces,
                         FailuresPerCall failures_per_call = FailuresPerCall::All);
  VerifierVerdict verify(const AnnotatedProgram &program) override;

 private:
  std::vector<TraceRecord> traces_;
  FailuresPerCall failures_per_call_;
};

// --- scripted mock -----------------------------------------------------------

struct MockCall {
  std::vector<std::string> clause_texts;  // canonical renderings, program order
  VerifierVerdict verdict;
};

class MockVerifier : public Verifier {
 public:
  /// Accepts exactly the clauses whose canonical rendering is in `accepted`.
  /// Entries are normalised through the parser, so any valid spelling works.
  static MockVerifier accepting(const std::vector<std::string> &accepted,
                                FailuresPerCall failures_per_call = FailuresPerCall::All);
  /// Returns `verdicts` in order; throws ScriptExhausted afterwards.
  static MockVerifier scripted(std::vector<VerifierVerdict> verdicts);

  VerifierVerdict verify(const AnnotatedProgram &program) override;

  const std::vector<MockCall> &calls() const { return calls_; }

 private:
  MockVerifier() = default;

  std::optional<std::set<std::string>> truth_;
  FailuresPerCall failures_per_call_ = FailuresPerCall::All;
  std::vector<VerifierVerdict> script_;
  std::size_t next_ = 0;
  std::vector<MockCall> calls_;
};

/// Canonical form of a clause text for comparisons (`//@ kind expr;`).
std::string normalize_clause_text(std::string_view text);

}  // namespace specgen
