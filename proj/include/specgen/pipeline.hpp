#pragma once

// Conversation followed by mutation-based repair, and the run reports.
//
// Report records are JSON lines (schema version 1):
//
//   {"schema":1,"program":"TwoSum","attempt":0,"outcome":"verified-by-mutation",
//    "rounds":10,"conversation_calls":10,"repair_calls":4,
//    "templates":["//@ ...;"],"final_clauses":["//@ ...;"],
//    "refuted":[{"iteration":1,"clause":"loop:twoSum:0/maintaining/0","text":"//@ ...;"}],
//    "dropped":[],"thrashing":[],"error":"","wall_time_s":1.25}
//
// `wall_time_s` is present only when timing is enabled, so that runs replay
// byte-identically.

#include "specgen/chat.hpp"
#include "specgen/config.hpp"
#include "specgen/conversation.hpp"
#include "specgen/repair.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace specgen {

inline constexpr int kReportSchemaVersion = 1;

enum class RunOutcome { VerifiedByConversation, VerifiedByMutation, Failed, Aborted };
std::string_view to_string(RunOutcome o);
std::optional<RunOutcome> run_outcome_from_string(std::string_view s);

struct RunEntry {
  std::string program;
  int attempt = 0;
  RunOutcome outcome = RunOutcome::Failed;
  int rounds = 0;
  int conversation_calls = 0;
  int repair_calls = 0;
  std::vector<std::string> templates;
  std::vector<std::string> final_clauses;
  std::vector<RefutedEntry> refuted;
  std::vector<std::string> dropped;
  std::vector<std::string> thrashing;
  std::string error;
  std::optional<double> wall_time_s;

  bool passed() const {
    return outcome == RunOutcome::VerifiedByConversation || outcome == RunOutcome::VerifiedByMutation;
  }
  int verifier_calls() const { return conversation_calls + repair_calls; }
};

/// One JSON line, keys sorted.
std::string format_entry(const RunEntry &e);
/// Throws Error on malformed input.
RunEntry parse_entry(const std::string &line);
std::vector<RunEntry> load_entries(const std::filesystem::path &path);

struct ProgramSummary {
  std::string program;
  int attempts = 0;
  int successes = 0;
  double success_probability = 0.0;
  double mean_verifier_calls = 0.0;
};

struct ReportSummary {
  std::vector<ProgramSummary> programs;  // sorted by name
  int entries = 0;
  int number_of_passes = 0;  // programs with at least one verified attempt
  double mean_success_probability = 0.0;
  double mean_verifier_calls = 0.0;  // over all entries
};

ReportSummary summarize(const std::vector<RunEntry> &entries);
std::string format_summary_table(const ReportSummary &s);
std::string format_summary_json(const ReportSummary &s);

/// Everything a pipeline run needs besides the program and its clients.
struct PipelineContext {
  ConversationOptions conversation;
  PipelineConfig config;
};

/// Reads shots and guidance rules named by the config. Throws ConfigError or
/// InsufficientShots.
PipelineContext make_context(const PipelineConfig &config);

std::unique_ptr<Verifier> make_verifier(const PipelineConfig &config);
/// Scripted clients take script `attempt` of the fixture.
std::unique_ptr<ChatClient> make_chat_client(const PipelineConfig &config, int attempt);

/// Never throws: errors become Aborted entries.
RunEntry run_pipeline(const std::string &name, const std::string &program, const PipelineContext &context,
                      ChatClient &client, Verifier &verifier, int attempt = 0);

struct BatchItem {
  std::string name;
  std::string program;
};

/// Every item for every attempt, on up to config.workers threads, with fresh
/// clients per run. Results are in (item, attempt) order.
std::vector<RunEntry> run_batch(const std::vector<BatchItem> &items, const PipelineContext &context);

}  // namespace specgen
