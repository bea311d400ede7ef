#pragma once

// Pipeline configuration, loaded from a YAML file.
//
//   endpoint:
//     client: http | scripted        # scripted replays `script`
//     script: chats.json
//     base_url: https://api.openai.com/v1
//     model: gpt-3.5-turbo
//     temperature: 0.4
//     max_rounds: 10
//     shot_count: 4
//     shot_seed: 7                   # optional; random shot subset
//     api_key_env: OPENAI_API_KEY
//     request_timeout_s: 120
//     retry_count: 3
//     retry_backoff_ms: 1000
//     token_budget: 32000
//     system_role: "..."             # optional override
//   verifier:
//     adapter: exec | trace | mock
//     command: "openjml --esc {file}"
//     timeout_seconds: 1800
//     rules:                         # replaces the built-in classification
//       - {pattern: "postcondition", category: unprovable-postcondition}
//     failures_per_call: one | all
//     diagnostic_pattern: '...'
//     association_pattern: '...'
//     trace_file: traces.jsonl
//     accept: ["requires a < b;"]    # mock adapter
//   weights: {predicative: -4, logical: -2, comparative: -1, arithmetic: -4}
//   mutation:
//     enabled: true                  # false skips the repair phase
//     kinds: [predicative, logical, comparative, arithmetic]
//     variant_cap: 4096
//   strategy: {kind: heuristic | random, seed: 0}
//   budgets: {pipeline_s: 1800}       # 0 disables the wall-clock cap
//   paths: {shots: shots.json, guidance: guidance.json, output_dir: out}
//   report: {attempts: 1, workers: 1, include_timing: false}
//
// Every key is optional. Relative paths resolve against the config file's
// directory. Unknown keys are errors.

#include "specgen/chat.hpp"
#include "specgen/repair.hpp"
#include "specgen/verifier.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specgen {

enum class ClientKind { Http, Scripted };
enum class VerifierAdapter { Exec, Trace, Mock };

std::string_view to_string(ClientKind k);
std::string_view to_string(VerifierAdapter a);

struct PipelineConfig {
  EndpointConfig endpoint;
  ClientKind client = ClientKind::Http;
  std::filesystem::path chat_script;
  std::optional<std::string> system_role;
  std::optional<std::uint64_t> shot_seed;

  VerifierAdapter adapter = VerifierAdapter::Exec;
  ExecConfig exec;
  std::filesystem::path trace_file;
  std::vector<std::string> mock_accept;
  /// Unset: one for exec, all for trace and mock.
  std::optional<FailuresPerCall> failures_per_call;

  bool mutation_enabled = true;
  RepairOptions repair;
  std::chrono::milliseconds pipeline_budget{std::chrono::seconds(1800)};

  std::filesystem::path shots_path;
  std::filesystem::path guidance_path;  // empty: built-in rules
  std::filesystem::path output_dir = "specgen-out";

  int attempts = 1;
  int workers = 1;
  bool include_timing = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Directory holding the shipped shot corpus and guidance rules.
std::filesystem::path default_data_dir();

PipelineConfig default_config();
/// Throws ConfigError naming the offending key.
PipelineConfig parse_config(const std::string &yaml, const std::filesystem::path &base_dir = ".");
PipelineConfig load_config(const std::filesystem::path &path);

}  // namespace specgen
