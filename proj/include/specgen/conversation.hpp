#pragma once

#include "specgen/chat.hpp"
#include "specgen/clause.hpp"
#include "specgen/verifier.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace specgen {

struct ShotExample {
  std::string program;
  std::string annotated;
};

extern const char *const kDefaultSystemRole;

struct PromptBundle {
  std::string system_role;
  std::vector<ShotExample> shots;
  std::string query_program;

  /// system, (user, assistant) per shot, then the query as a user message.
  std::vector<ChatMessage> messages() const;
  /// Deterministic text rendering of messages().
  std::string render() const;
};

/// User message asking for specifications of `program`.
std::string query_message(const std::string &program);
/// Wraps an annotated program the way the model is asked to reply.
std::string fenced_program(const std::string &annotated);

/// Corpus file: [{"program": "...", "annotated": "..."}, ...].
std::vector<ShotExample> load_shot_corpus(const std::filesystem::path &path);

/// First `count` examples in corpus order, or a seeded random subset (kept in
/// corpus order) when `seed` is given. Throws InsufficientShots.
std::vector<ShotExample> select_shots(const std::vector<ShotExample> &corpus, int count,
                                      std::optional<std::uint64_t> seed = std::nullopt);

/// Throws InsufficientShots when shots.size() != shot_count.
PromptBundle build_initial_prompt(const std::string &program, std::vector<ShotExample> shots,
                                  std::string system_role, int shot_count);

struct GuidanceRule {
  FailureCategory category;
  std::string guidance;
};

/// At most one rule per category.
class GuidanceRules {
 public:
  GuidanceRules() = default;
  /// Throws ConfigError on a duplicate category.
  explicit GuidanceRules(const std::vector<GuidanceRule> &rules);

  const std::string *find(FailureCategory c) const;
  std::size_t size() const { return rules_.size(); }

  static GuidanceRules defaults();
  /// File: [{"category": "unprovable-postcondition", "guidance": "..."}, ...].
  static GuidanceRules load(const std::filesystem::path &path);

 private:
  std::map<FailureCategory, std::string> rules_;
};

struct ExtractionFailure {
  std::vector<std::string> diagnostics;

  /// The failure as a verifier verdict, one SyntaxError report per diagnostic.
  VerifierVerdict as_verdict() const;
};

using SpecExtraction = std::variant<AnnotatedProgram, ExtractionFailure>;

/// Body of the last complete ``` fence, or the whole text without one.
std::string last_fenced_block(const std::string &response);

/// Clauses from the model response, anchored onto `program` (the queried
/// program; its own //@ lines are ignored).
SpecExtraction extract_specs(const std::string &response, const std::string &program);

std::string build_feedback_prompt(const VerifierVerdict &verdict, const GuidanceRules &guidance);

enum class ConversationOutcome { Verified, Exhausted, Aborted };
std::string_view to_string(ConversationOutcome o);

struct ConversationRound {
  std::string prompt;    // user message sent this round
  std::string response;  // assistant reply
  SpecExtraction extraction;
  VerifierVerdict verdict;
  bool verifier_called = false;
};

struct ConversationTranscript {
  std::vector<ChatMessage> initial_messages;
  std::vector<ConversationRound> rounds;
  ConversationOutcome outcome = ConversationOutcome::Exhausted;
  std::string error;  // set when Aborted
  std::size_t dropped_shots = 0;

  /// Last successfully extracted clause set, if any.
  const AnnotatedProgram *last_extracted() const;
  int verifier_calls() const;
  /// Assistant replies in order; feeding them to a ScriptedChatClient replays
  /// the conversation.
  std::vector<std::string> responses() const;
};

struct ConversationOptions {
  EndpointConfig endpoint;
  std::string system_role = kDefaultSystemRole;
  std::vector<ShotExample> shots;
  GuidanceRules guidance = GuidanceRules::defaults();
};

struct ConversationResult {
  std::optional<AnnotatedProgram> verified;
  ConversationTranscript transcript;
};

/// Estimated token count of a message list (characters / 4, rounded up).
std::size_t estimate_tokens(const std::vector<ChatMessage> &messages);

ConversationResult run_conversation(const std::string &program, const ConversationOptions &options,
                                    Verifier &verifier, ChatClient &client);

}  // namespace specgen
