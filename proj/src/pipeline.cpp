#include "specgen/pipeline.hpp"

#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"
#include "specgen/trace_io.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace specgen {

using nlohmann::json;

std::string_view to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::VerifiedByConversation: return "verified-by-conversation";
    case RunOutcome::VerifiedByMutation: return "verified-by-mutation";
    case RunOutcome::Failed: return "failed";
    case RunOutcome::Aborted: return "aborted";
  }
  return "?";
}

std::optional<RunOutcome> run_outcome_from_string(std::string_view s) {
  for (auto o : {RunOutcome::VerifiedByConversation, RunOutcome::VerifiedByMutation, RunOutcome::Failed,
                 RunOutcome::Aborted}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

// --- records -----------------------------------------------------------------

std::string format_entry(const RunEntry &e) {
  json refuted = json::array();
  for (const auto &r : e.refuted) refuted.push_back({{"iteration", r.iteration}, {"clause", r.clause_id}, {"text", r.text}});
  json j = {
      {"schema", kReportSchemaVersion},
      {"program", e.program},
      {"attempt", e.attempt},
      {"outcome", std::string(to_string(e.outcome))},
      {"rounds", e.rounds},
      {"conversation_calls", e.conversation_calls},
      {"repair_calls", e.repair_calls},
      {"templates", e.templates},
      {"final_clauses", e.final_clauses},
      {"refuted", refuted},
      {"dropped", e.dropped},
      {"thrashing", e.thrashing},
      {"error", e.error},
  };
  if (e.wall_time_s) j["wall_time_s"] = *e.wall_time_s;
  return j.dump();
}

RunEntry parse_entry(const std::string &line) {
  try {
    auto j = json::parse(line);
    if (j.value("schema", 0) != kReportSchemaVersion) {
      throw Error("unsupported report schema version in: " + line.substr(0, 80));
    }
    RunEntry e;
    e.program = j.at("program").get<std::string>();
    e.attempt = j.at("attempt").get<int>();
    auto outcome = run_outcome_from_string(j.at("outcome").get<std::string>());
    if (!outcome) throw Error("unknown outcome in report entry: " + j.at("outcome").dump());
    e.outcome = *outcome;
    e.rounds = j.at("rounds").get<int>();
    e.conversation_calls = j.at("conversation_calls").get<int>();
    e.repair_calls = j.at("repair_calls").get<int>();
    e.templates = j.at("templates").get<std::vector<std::string>>();
    e.final_clauses = j.at("final_clauses").get<std::vector<std::string>>();
    for (const auto &r : j.at("refuted")) {
      e.refuted.push_back({r.at("iteration").get<int>(), r.at("clause").get<std::string>(), r.at("text").get<std::string>()});
    }
    e.dropped = j.at("dropped").get<std::vector<std::string>>();
    e.thrashing = j.at("thrashing").get<std::vector<std::string>>();
    e.error = j.at("error").get<std::string>();
    if (j.contains("wall_time_s")) e.wall_time_s = j["wall_time_s"].get<double>();
    return e;
  } catch (const json::exception &ex) {
    throw Error(std::string("malformed report entry: ") + ex.what());
  }
}

std::vector<RunEntry> load_entries(const std::filesystem::path &path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto &f : std::filesystem::directory_iterator(path)) {
      if (f.path().extension() == ".jsonl") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<RunEntry> out;
  for (const auto &f : files) {
    std::ifstream in(f);
    if (!in) throw Error("cannot open report file " + f.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.push_back(parse_entry(line));
    }
  }
  return out;
}

// --- aggregation -------------------------------------------------------------

ReportSummary summarize(const std::vector<RunEntry> &entries) {
  ReportSummary s;
  s.entries = static_cast<int>(entries.size());
  std::map<std::string, std::vector<const RunEntry *>> by_program;
  long long calls = 0;
  for (const auto &e : entries) {
    by_program[e.program].push_back(&e);
    calls += e.verifier_calls();
  }
  if (!entries.empty()) s.mean_verifier_calls = static_cast<double>(calls) / static_cast<double>(entries.size());

  double prob_sum = 0.0;
  for (const auto &[name, list] : by_program) {
    ProgramSummary p;
    p.program = name;
    p.attempts = static_cast<int>(list.size());
    long long program_calls = 0;
    for (const auto *e : list) {
      if (e->passed()) ++p.successes;
      program_calls += e->verifier_calls();
    }
    p.success_probability = static_cast<double>(p.successes) / p.attempts;
    p.mean_verifier_calls = static_cast<double>(program_calls) / p.attempts;
    if (p.successes > 0) ++s.number_of_passes;
    prob_sum += p.success_probability;
    s.programs.push_back(p);
  }
  if (!s.programs.empty()) s.mean_success_probability = prob_sum / static_cast<double>(s.programs.size());
  return s;
}

std::string format_summary_table(const ReportSummary &s) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-32s %8s %8s %12s %12s\n", "program", "attempts", "passes", "success-prob",
                "mean-calls");
  out << buf;
  for (const auto &p : s.programs) {
    std::snprintf(buf, sizeof buf, "%-32s %8d %8d %12.4f %12.2f\n", p.program.c_str(), p.attempts, p.successes,
                  p.success_probability, p.mean_verifier_calls);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "number of passes: %d / %zu programs\n", s.number_of_passes, s.programs.size());
  out << buf;
  std::snprintf(buf, sizeof buf, "mean success probability: %.4f\n", s.mean_success_probability);
  out << buf;
  std::snprintf(buf, sizeof buf, "mean verifier calls: %.2f (over %d runs)\n", s.mean_verifier_calls, s.entries);
  out << buf;
  return out.str();
}

std::string format_summary_json(const ReportSummary &s) {
  json programs = json::array();
  for (const auto &p : s.programs) {
    programs.push_back({{"program", p.program},
                        {"attempts", p.attempts},
                        {"successes", p.successes},
                        {"success_probability", p.success_probability},
                        {"mean_verifier_calls", p.mean_verifier_calls}});
  }
  json j = {{"schema", kReportSchemaVersion},
            {"entries", s.entries},
            {"number_of_passes", s.number_of_passes},
            {"mean_success_probability", s.mean_success_probability},
            {"mean_verifier_calls", s.mean_verifier_calls},
            {"programs", programs}};
  return j.dump();
}

// --- pipeline ----------------------------------------------------------------

PipelineContext make_context(const PipelineConfig &config) {
  PipelineContext ctx;
  ctx.config = config;
  auto &conv = ctx.conversation;
  conv.endpoint = config.endpoint;
  if (config.system_role) conv.system_role = *config.system_role;
  if (config.endpoint.shot_count > 0) {
    auto corpus = load_shot_corpus(config.shots_path);
    conv.shots = select_shots(corpus, config.endpoint.shot_count, config.shot_seed);
  }
  if (!config.guidance_path.empty()) conv.guidance = GuidanceRules::load(config.guidance_path);
  return ctx;
}

std::unique_ptr<Verifier> make_verifier(const PipelineConfig &config) {
  auto fpc = config.failures_per_call.value_or(FailuresPerCall::All);
  switch (config.adapter) {
    case VerifierAdapter::Exec: {
      auto exec = config.exec;
      exec.failures_per_call = config.failures_per_call.value_or(FailuresPerCall::One);
      return std::make_unique<ExecVerifier>(exec);
    }
    case VerifierAdapter::Trace: return std::make_unique<TraceVerifier>(load_trace_file(config.trace_file), fpc);
    case VerifierAdapter::Mock: return std::make_unique<MockVerifier>(MockVerifier::accepting(config.mock_accept, fpc));
  }
  throw ConfigError("unknown verifier adapter");
}

std::unique_ptr<ChatClient> make_chat_client(const PipelineConfig &config, int attempt) {
  if (config.client == ClientKind::Http) return std::make_unique<HttpChatClient>(config.endpoint);
  auto scripts = load_chat_scripts(config.chat_script);
  if (attempt < 0 || static_cast<std::size_t>(attempt) >= scripts.size()) {
    throw ConfigError("chat script " + config.chat_script.string() + " holds " + std::to_string(scripts.size()) +
                      " scripts; attempt " + std::to_string(attempt + 1) + " has none");
  }
  return std::make_unique<ScriptedChatClient>(scripts[static_cast<std::size_t>(attempt)]);
}

namespace {

std::vector<std::string> render_all(const AnnotatedProgram &p) {
  std::vector<std::string> out;
  for (const auto &c : p.clauses) out.push_back(render_clause(c));
  return out;
}

}  // namespace

RunEntry run_pipeline(const std::string &name, const std::string &program, const PipelineContext &context,
                      ChatClient &client, Verifier &verifier, int attempt) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  const auto &cfg = context.config;
  RunEntry entry;
  entry.program = name;
  entry.attempt = attempt;

  try {
    auto conv = run_conversation(program, context.conversation, verifier, client);
    const auto &t = conv.transcript;
    entry.rounds = static_cast<int>(t.rounds.size());
    entry.conversation_calls = t.verifier_calls();
    if (const auto *last = t.last_extracted()) entry.templates = render_all(*last);

    if (t.outcome == ConversationOutcome::Aborted) {
      entry.outcome = RunOutcome::Aborted;
      entry.error = t.error;
    } else if (conv.verified) {
      entry.final_clauses = render_all(*conv.verified);
      entry.outcome = entry.final_clauses.empty() ? RunOutcome::Failed : RunOutcome::VerifiedByConversation;
    } else if (const auto *templates = t.last_extracted(); templates && !templates->clauses.empty() &&
                                                           cfg.mutation_enabled) {
      auto options = cfg.repair;
      if (cfg.pipeline_budget.count() > 0) {
        auto left = cfg.pipeline_budget - std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
        options.budget = std::max(left, std::chrono::milliseconds(1));
      } else {
        options.budget = std::chrono::milliseconds(0);
      }
      try {
        auto repaired = mutation_based_gen(*templates, verifier, options);
        const auto &st = repaired.state;
        entry.repair_calls = st.verifier_calls;
        entry.refuted = st.refuted_history;
        entry.dropped = st.dropped();
        entry.thrashing = st.thrashing;
        entry.final_clauses = render_all(repaired.program);
        bool pass = st.last_verdict.outcome == VerdictOutcome::Pass && !entry.final_clauses.empty();
        entry.outcome = pass ? RunOutcome::VerifiedByMutation : RunOutcome::Failed;
      } catch (const TimeoutBudgetExceeded &e) {
        entry.outcome = RunOutcome::Failed;
        entry.error = e.what();
      }
    } else {
      entry.outcome = RunOutcome::Failed;
    }
  } catch (const std::exception &e) {
    entry.outcome = RunOutcome::Aborted;
    entry.error = e.what();
  }
  if (cfg.include_timing) {
    entry.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
  }
  return entry;
}

std::vector<RunEntry> run_batch(const std::vector<BatchItem> &items, const PipelineContext &context) {
  const auto attempts = static_cast<std::size_t>(context.config.attempts);
  const std::size_t total = items.size() * attempts;
  std::vector<RunEntry> out(total);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const auto &item = items[k / attempts];
      int attempt = static_cast<int>(k % attempts);
      try {
        auto verifier = make_verifier(context.config);
        auto client = make_chat_client(context.config, attempt);
        out[k] = run_pipeline(item.name, item.program, context, *client, *verifier, attempt);
      } catch (const std::exception &e) {
        RunEntry failed;
        failed.program = item.name;
        failed.attempt = attempt;
        failed.outcome = RunOutcome::Aborted;
        failed.error = e.what();
        out[k] = failed;
      }
    }
  };

  auto n = std::min<std::size_t>(static_cast<std::size_t>(context.config.workers), std::max<std::size_t>(total, 1));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(work);
    for (auto &t : threads) t.join();
  }
  return out;
}

}  // namespace specgen
