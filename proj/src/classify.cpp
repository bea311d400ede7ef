#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"
#include "specgen/verifier.hpp"

namespace specgen {

std::string_view to_string(FailureCategory c) {
  switch (c) {
    case FailureCategory::SyntaxError: return "syntax-error";
    case FailureCategory::UnprovablePostcondition: return "unprovable-postcondition";
    case FailureCategory::UnprovableInvariant: return "unprovable-invariant";
    case FailureCategory::UnprovablePrecondition: return "unprovable-precondition";
    case FailureCategory::NonterminationDecreases: return "nontermination-decreases";
    case FailureCategory::TypeError: return "type-error";
    case FailureCategory::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<FailureCategory> failure_category_from_string(std::string_view s) {
  for (auto c : {FailureCategory::SyntaxError, FailureCategory::UnprovablePostcondition,
                 FailureCategory::UnprovableInvariant, FailureCategory::UnprovablePrecondition,
                 FailureCategory::NonterminationDecreases, FailureCategory::TypeError,
                 FailureCategory::Unknown}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(VerdictOutcome o) {
  switch (o) {
    case VerdictOutcome::Pass: return "pass";
    case VerdictOutcome::Fail: return "fail";
    case VerdictOutcome::Timeout: return "timeout";
    case VerdictOutcome::Crash: return "crash";
  }
  return "?";
}

std::string_view to_string(FailuresPerCall f) { return f == FailuresPerCall::One ? "one" : "all"; }

VerifierVerdict VerifierVerdict::fail(std::vector<FailureReport> failures) {
  if (failures.empty()) throw Error("a failing verdict needs at least one failure report");
  VerifierVerdict v;
  v.outcome = VerdictOutcome::Fail;
  v.failures = std::move(failures);
  return v;
}

void apply_failure_limit(VerifierVerdict &verdict, FailuresPerCall mode) {
  if (mode == FailuresPerCall::One && verdict.failures.size() > 1) verdict.failures.resize(1);
}

std::vector<ClassificationRule> default_classification_rules() {
  // OpenJML reports proof failures as "The prover cannot establish an
  // assertion (Postcondition: ...)", "(LoopInvariant)", "(LoopDecreases)" etc.
  return {
      {R"(loopdecreases|decreases|termination|\bvariant\b)", FailureCategory::NonterminationDecreases},
      {R"(loopinvariant|loop invariant|maintaining)", FailureCategory::UnprovableInvariant},
      {R"(postcondition|ensures)", FailureCategory::UnprovablePostcondition},
      {R"(precondition|requires)", FailureCategory::UnprovablePrecondition},
      {R"(incompatible types|cannot find symbol|bad operand type|type mismatch)", FailureCategory::TypeError},
      {R"(illegal start|expected|syntax|parse error|unexpected|not a statement)", FailureCategory::SyntaxError},
  };
}

FailureCategory classify_failure(std::string_view message, const std::vector<ClassificationRule> &rules) {
  if (message.empty()) return FailureCategory::Unknown;
  std::string text(message);
  for (const auto &rule : rules) {
    std::regex re(rule.pattern, std::regex::ECMAScript | std::regex::icase);
    if (std::regex_search(text, re)) return rule.category;
  }
  return FailureCategory::Unknown;
}

std::string normalize_clause_text(std::string_view text) { return render_clause(parse_clause(text)); }

}  // namespace specgen
