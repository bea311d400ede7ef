#include "specgen/conversation.hpp"

#include "specgen/annotations.hpp"
#include "specgen/errors.hpp"
#include "specgen/mutation.hpp"
#include "specgen/syntax.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace specgen {

using nlohmann::json;

const char *const kDefaultSystemRole =
    "You are an expert in formal verification of Java programs. Your task is to generate JML "
    "(Java Modeling Language) specifications for the Java program given by the user. Write each "
    "clause on its own line as a `//@` comment directly above the method or loop it describes: "
    "`//@ requires P;` and `//@ ensures Q;` above a method, `//@ maintaining I;` and "
    "`//@ decreases E;` above a loop. The specifications must be strong enough for a static "
    "verifier to prove the program correct. Reply with the complete annotated program in a "
    "single ```java code block.";

// --- prompt ------------------------------------------------------------------

std::string query_message(const std::string &program) {
  std::string text = "Generate JML specifications for the following Java program.\n\n```java\n" + program;
  if (!program.empty() && program.back() != '\n') text += '\n';
  return text + "```";
}

std::string fenced_program(const std::string &annotated) {
  std::string text = "```java\n" + annotated;
  if (!annotated.empty() && annotated.back() != '\n') text += '\n';
  return text + "```";
}

std::vector<ChatMessage> PromptBundle::messages() const {
  std::vector<ChatMessage> out;
  out.push_back({"system", system_role});
  for (const auto &s : shots) {
    out.push_back({"user", query_message(s.program)});
    out.push_back({"assistant", fenced_program(s.annotated)});
  }
  out.push_back({"user", query_message(query_program)});
  return out;
}

std::string PromptBundle::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto &m : messages()) {
    if (!first) out << "\n\n";
    first = false;
    out << "[" << m.role << "]\n" << m.content;
  }
  return out.str();
}

std::vector<ShotExample> load_shot_corpus(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open shot corpus " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("shot corpus " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ConfigError("shot corpus " + path.string() + " must be a JSON array");
  std::vector<ShotExample> out;
  for (const auto &e : j) {
    if (!e.contains("program") || !e.contains("annotated")) {
      throw ConfigError("shot corpus " + path.string() + ": each entry needs program and annotated");
    }
    out.push_back({e["program"].get<std::string>(), e["annotated"].get<std::string>()});
  }
  return out;
}

std::vector<ShotExample> select_shots(const std::vector<ShotExample> &corpus, int count,
                                      std::optional<std::uint64_t> seed) {
  if (count < 0) throw ConfigError("shot count must be non-negative");
  auto n = static_cast<std::size_t>(count);
  if (corpus.size() < n) {
    throw InsufficientShots("shot corpus holds " + std::to_string(corpus.size()) + " examples, " +
                            std::to_string(count) + " requested");
  }
  std::vector<std::size_t> idx(corpus.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (seed) {
    std::mt19937_64 rng(*seed);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
  } else {
    idx.resize(n);
  }
  std::vector<ShotExample> out;
  for (auto i : idx) out.push_back(corpus[i]);
  return out;
}

PromptBundle build_initial_prompt(const std::string &program, std::vector<ShotExample> shots,
                                  std::string system_role, int shot_count) {
  if (shot_count < 0 || shots.size() != static_cast<std::size_t>(shot_count)) {
    throw InsufficientShots("prompt needs " + std::to_string(shot_count) + " shots, got " +
                            std::to_string(shots.size()));
  }
  return PromptBundle{std::move(system_role), std::move(shots), program};
}

// --- guidance ----------------------------------------------------------------

GuidanceRules::GuidanceRules(const std::vector<GuidanceRule> &rules) {
  for (const auto &r : rules) {
    if (!rules_.emplace(r.category, r.guidance).second) {
      throw ConfigError("duplicate guidance rule for category " + std::string(to_string(r.category)));
    }
  }
}

const std::string *GuidanceRules::find(FailureCategory c) const {
  auto it = rules_.find(c);
  return it == rules_.end() ? nullptr : &it->second;
}

GuidanceRules GuidanceRules::defaults() {
  return GuidanceRules({
      {FailureCategory::UnprovablePostcondition,
       "The postcondition may be too strong, or a loop invariant may be too weak to establish it. "
       "Weaken the ensures clause or strengthen the loop invariants."},
      {FailureCategory::UnprovableInvariant,
       "The loop invariant may not hold on entry or may not be preserved by the loop body. "
       "Check the bounds of the loop variable, including the value it has when the loop exits."},
      {FailureCategory::UnprovablePrecondition,
       "A call site may not satisfy the precondition. Weaken the requires clause."},
      {FailureCategory::NonterminationDecreases,
       "The decreases expression must be non-negative and must strictly decrease in every iteration."},
      {FailureCategory::SyntaxError,
       "Use only JML expressions: \\result, \\old, \\forall and \\exists are allowed, method calls are not. "
       "End every clause with a semicolon."},
  });
}

GuidanceRules GuidanceRules::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open guidance rules " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("guidance rules " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ConfigError("guidance rules " + path.string() + " must be a JSON array");
  std::vector<GuidanceRule> rules;
  for (const auto &e : j) {
    auto name = e.value("category", "");
    auto category = failure_category_from_string(name);
    if (!category) throw ConfigError("guidance rules " + path.string() + ": unknown category '" + name + "'");
    rules.push_back({*category, e.value("guidance", "")});
  }
  return GuidanceRules(rules);
}

// --- extraction --------------------------------------------------------------

VerifierVerdict ExtractionFailure::as_verdict() const {
  std::vector<FailureReport> failures;
  for (const auto &d : diagnostics) {
    FailureReport f;
    f.raw_message = d;
    f.category = FailureCategory::SyntaxError;
    failures.push_back(std::move(f));
  }
  if (failures.empty()) {
    FailureReport f;
    f.raw_message = "no specifications could be extracted";
    f.category = FailureCategory::SyntaxError;
    failures.push_back(std::move(f));
  }
  return VerifierVerdict::fail(std::move(failures));
}

std::string last_fenced_block(const std::string &response) {
  std::istringstream in(response);
  std::string line;
  bool inside = false;
  std::string current;
  std::optional<std::string> last;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    bool fence = first != std::string::npos && line.compare(first, 3, "```") == 0;
    if (fence) {
      if (inside) last = current;
      inside = !inside;
      current.clear();
      continue;
    }
    if (inside) current += line + "\n";
  }
  return last ? *last : response;
}

namespace {

std::string describe(const AnnotationDiagnostic &d) {
  return "line " + std::to_string(d.line) + ": `" + d.clause_text + "`: " + d.message;
}

// Clauses returned without any program around them go to the query program's
// only method (requires/ensures) or only loop (maintaining/decreases).
SpecExtraction reanchor_orphans(const ExtractionResult &extracted, const std::string &query_source) {
  std::vector<ProgramAnchor> methods, loops;
  for (const auto &a : scan_anchors(query_source)) (a.anchor.is_loop() ? loops : methods).push_back(a.anchor);

  ExtractionFailure failure;
  AnnotatedProgram out;
  out.source = query_source;
  for (const auto &d : extracted.diagnostics) {
    SpecClause clause;
    try {
      clause = parse_clause(d.clause_text);
    } catch (const Error &e) {
      failure.diagnostics.push_back("line " + std::to_string(d.line) + ": `" + d.clause_text + "`: " + e.what());
      continue;
    }
    bool on_loop = clause.kind == ClauseKind::Maintaining || clause.kind == ClauseKind::Decreases;
    const auto &candidates = on_loop ? loops : methods;
    if (candidates.size() != 1) {
      failure.diagnostics.push_back("line " + std::to_string(d.line) + ": `" + d.clause_text +
                                    "`: cannot tell which " + (on_loop ? "loop" : "method") +
                                    " the clause belongs to; reply with the complete annotated program");
      continue;
    }
    clause.anchor = candidates.front();
    out.clauses.push_back(std::move(clause));
  }
  if (!failure.diagnostics.empty()) return failure;
  assign_ids(out.clauses);
  return out;
}

}  // namespace

SpecExtraction extract_specs(const std::string &response, const std::string &program) {
  auto query_source = extract_annotations(program).program.source;
  auto block = last_fenced_block(response);
  auto extracted = extract_annotations(block);

  bool all_orphans = !extracted.diagnostics.empty() &&
                     std::all_of(extracted.diagnostics.begin(), extracted.diagnostics.end(),
                                 [](const AnnotationDiagnostic &d) { return d.kind == DiagnosticKind::Orphan; });
  if (all_orphans && extracted.program.clauses.empty() && scan_anchors(block).empty()) {
    return reanchor_orphans(extracted, query_source);
  }

  if (!extracted.ok()) {
    ExtractionFailure failure;
    for (const auto &d : extracted.diagnostics) failure.diagnostics.push_back(describe(d));
    return failure;
  }
  if (extracted.program.clauses.empty()) {
    return ExtractionFailure{{"no specifications found: write each clause as a `//@` line above its method or loop"}};
  }

  std::set<ProgramAnchor> known;
  for (const auto &a : scan_anchors(query_source)) known.insert(a.anchor);
  ExtractionFailure failure;
  for (const auto &c : extracted.program.clauses) {
    if (!known.contains(c.anchor)) {
      failure.diagnostics.push_back("`" + render_clause(c) + "` is attached to " + c.anchor.to_string() +
                                    ", which does not exist in the queried program");
    }
  }
  if (!failure.diagnostics.empty()) return failure;

  AnnotatedProgram out;
  out.source = query_source;
  out.clauses = std::move(extracted.program.clauses);
  assign_ids(out.clauses);
  return out;
}

// --- feedback ----------------------------------------------------------------

std::string build_feedback_prompt(const VerifierVerdict &verdict, const GuidanceRules &guidance) {
  std::string message;
  FailureCategory category = FailureCategory::Unknown;
  if (!verdict.failures.empty()) {
    message = verdict.failures.front().raw_message;
    category = verdict.failures.front().category;
  } else if (verdict.outcome == VerdictOutcome::Timeout) {
    message = "The verifier timed out before proving the specifications.";
  } else {
    message = "The verifier did not accept the specifications.";
  }

  std::string text = "The verifier reported the following error:\n\n" + message + "\n\n";
  if (const auto *g = guidance.find(category)) text += "Guidance: " + *g + "\n\n";
  text += "Fix the specifications and reply with the complete corrected annotated program in a single ```java code block.";
  return text;
}

// --- conversation ------------------------------------------------------------

std::string_view to_string(ConversationOutcome o) {
  switch (o) {
    case ConversationOutcome::Verified: return "verified";
    case ConversationOutcome::Exhausted: return "exhausted";
    case ConversationOutcome::Aborted: return "aborted";
  }
  return "?";
}

const AnnotatedProgram *ConversationTranscript::last_extracted() const {
  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it) {
    if (const auto *p = std::get_if<AnnotatedProgram>(&it->extraction)) return p;
  }
  return nullptr;
}

int ConversationTranscript::verifier_calls() const {
  return static_cast<int>(std::count_if(rounds.begin(), rounds.end(),
                                        [](const ConversationRound &r) { return r.verifier_called; }));
}

std::vector<std::string> ConversationTranscript::responses() const {
  std::vector<std::string> out;
  for (const auto &r : rounds) out.push_back(r.response);
  return out;
}

std::size_t estimate_tokens(const std::vector<ChatMessage> &messages) {
  std::size_t chars = 0;
  for (const auto &m : messages) chars += m.content.size();
  return (chars + 3) / 4;
}

namespace {

// Drops the oldest (user, assistant) shot pairs until the history fits.
std::size_t enforce_budget(std::vector<ChatMessage> &history, std::size_t &shots_left, std::size_t budget) {
  std::size_t dropped = 0;
  while (budget > 0 && shots_left > 0 && estimate_tokens(history) > budget) {
    history.erase(history.begin() + 1, history.begin() + 3);
    --shots_left;
    ++dropped;
  }
  return dropped;
}

}  // namespace

ConversationResult run_conversation(const std::string &program, const ConversationOptions &options,
                                    Verifier &verifier, ChatClient &client) {
  options.endpoint.validate();
  ConversationResult result;
  auto &transcript = result.transcript;

  auto bundle = build_initial_prompt(program, options.shots, options.system_role, options.endpoint.shot_count);
  std::vector<ChatMessage> history = bundle.messages();
  transcript.initial_messages = history;
  std::size_t shots_left = bundle.shots.size();

  std::string prompt = history.back().content;
  for (int round = 1; round <= options.endpoint.max_rounds; ++round) {
    if (round > 1) history.push_back({"user", prompt});
    transcript.dropped_shots += enforce_budget(history, shots_left, options.endpoint.token_budget);

    ChatRequest request{options.endpoint.model, options.endpoint.temperature, history};
    std::string response;
    try {
      response = client.complete(request);
    } catch (const EndpointError &e) {
      transcript.outcome = ConversationOutcome::Aborted;
      transcript.error = e.what();
      return result;
    }
    history.push_back({"assistant", response});

    ConversationRound r{prompt, response, extract_specs(response, program), {}, false};
    if (const auto *annotated = std::get_if<AnnotatedProgram>(&r.extraction)) {
      r.verdict = verifier.verify(*annotated);
      r.verifier_called = true;
    } else {
      r.verdict = std::get<ExtractionFailure>(r.extraction).as_verdict();
    }
    transcript.rounds.push_back(r);

    if (r.verdict.outcome == VerdictOutcome::Pass) {
      transcript.outcome = ConversationOutcome::Verified;
      result.verified = std::get<AnnotatedProgram>(r.extraction);
      return result;
    }
    prompt = build_feedback_prompt(r.verdict, options.guidance);
  }
  transcript.outcome = ConversationOutcome::Exhausted;
  return result;
}

}  // namespace specgen
