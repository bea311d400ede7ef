// specgen command line.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or configuration error.

#include "specgen/annotations.hpp"
#include "specgen/config.hpp"
#include "specgen/errors.hpp"
#include "specgen/mutation.hpp"
#include "specgen/pipeline.hpp"
#include "specgen/syntax.hpp"
#include "specgen/trace_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specgen;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOptions {
  std::string config;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string verifier_command;
  std::string trace;
  bool json = false;
};

PipelineConfig resolve_config(const CommonOptions &o) {
  PipelineConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
  if (!o.strategy.empty()) {
    if (o.strategy == "heuristic") {
      cfg.repair.strategy.kind = SelectionStrategy::Kind::Heuristic;
    } else if (o.strategy == "random") {
      cfg.repair.strategy.kind = SelectionStrategy::Kind::Random;
    } else {
      throw UsageError("--strategy must be heuristic or random");
    }
  }
  if (o.seed) cfg.repair.strategy.seed = *o.seed;
  if (!o.verifier_command.empty()) {
    cfg.adapter = VerifierAdapter::Exec;
    cfg.exec.command = o.verifier_command;
  }
  if (!o.trace.empty()) {
    cfg.adapter = VerifierAdapter::Trace;
    cfg.trace_file = o.trace;
  }
  cfg.validate();
  return cfg;
}

AnnotatedProgram load_annotated(const fs::path &path) {
  auto extracted = extract_annotations(read_file(path));
  if (!extracted.ok()) {
    std::ostringstream msg;
    msg << path.string() << ": invalid annotations";
    for (const auto &d : extracted.diagnostics) {
      msg << "\n  line " << d.line << ": `" << d.clause_text << "`: " << d.message;
    }
    throw UsageError(msg.str());
  }
  return extracted.program;
}

json verdict_json(const VerifierVerdict &v) {
  json failures = json::array();
  for (const auto &f : v.failures) {
    json jf = {{"category", std::string(to_string(f.category))}, {"message", f.raw_message}};
    jf["clause"] = f.clause_id ? json(*f.clause_id) : json(nullptr);
    jf["line"] = f.source_line ? json(*f.source_line) : json(nullptr);
    failures.push_back(jf);
  }
  return {{"outcome", std::string(to_string(v.outcome))}, {"failures", failures}, {"notes", v.notes}};
}

void print_verdict(const VerifierVerdict &v) {
  std::cout << "verdict: " << to_string(v.outcome) << "\n";
  for (const auto &f : v.failures) {
    std::cout << "  [" << to_string(f.category) << "] " << (f.clause_id ? *f.clause_id : std::string("-")) << "\n    "
              << f.raw_message << "\n";
  }
  for (const auto &n : v.notes) std::cout << "  note: " << n << "\n";
}

// --- commands ----------------------------------------------------------------

int cmd_generate(const std::vector<std::string> &files, const CommonOptions &o, std::optional<int> attempts,
                 const std::string &out_dir, int workers) {
  auto cfg = resolve_config(o);
  if (attempts) cfg.attempts = *attempts;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (workers > 0) cfg.workers = workers;
  cfg.validate();
  auto ctx = make_context(cfg);

  std::vector<BatchItem> items;
  for (const auto &f : files) items.push_back({fs::path(f).stem().string(), read_file(f)});
  auto entries = run_batch(items, ctx);
  auto summary = summarize(entries);

  fs::create_directories(cfg.output_dir);
  {
    std::ofstream report(cfg.output_dir / "report.jsonl");
    for (const auto &e : entries) report << format_entry(e) << "\n";
    std::ofstream table(cfg.output_dir / "summary.txt");
    table << format_summary_table(summary);
  }

  if (o.json) {
    for (const auto &e : entries) std::cout << format_entry(e) << "\n";
    std::cout << format_summary_json(summary) << "\n";
  } else {
    for (const auto &e : entries) {
      std::cout << e.program << " #" << e.attempt + 1 << ": " << to_string(e.outcome) << " (rounds " << e.rounds
                << ", conversation calls " << e.conversation_calls << ", repair calls " << e.repair_calls << ")\n";
      for (const auto &c : e.final_clauses) std::cout << "  " << c << "\n";
      if (!e.error.empty()) std::cout << "  error: " << e.error << "\n";
    }
    std::cout << "\n" << format_summary_table(summary);
  }
  return summary.number_of_passes == static_cast<int>(summary.programs.size()) ? kOk : kDomainFailure;
}

int cmd_mutate(const std::string &clause_text, const CommonOptions &o, const std::vector<std::string> &kinds,
               std::size_t cap) {
  PipelineConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
  auto clause = parse_clause(clause_text);
  clause.id = "clause";
  MutationKindSet set = cfg.repair.kinds;
  if (!kinds.empty()) {
    set.clear();
    for (const auto &k : kinds) {
      auto mk = mutation_kind_from_string(k);
      if (!mk) throw UsageError("unknown mutation kind '" + k + "'");
      set.insert(*mk);
    }
  }
  auto family = enumerate_variants(clause, set, cap ? cap : cfg.repair.variant_cap, cfg.repair.weights);
  if (o.json) {
    for (const auto &v : family.members) std::cout << json{{"score", v.score}, {"text", v.text}}.dump() << "\n";
    std::cout << json{{"size", family.members.size()},
                      {"raw_combinations", family.raw_combinations},
                      {"truncated", family.truncated},
                      {"merged_duplicates", family.merged_duplicates}}
                     .dump()
              << "\n";
  } else {
    for (const auto &v : family.members) std::cout << v.score << "\t" << v.text << "\n";
    if (family.truncated) {
      std::cerr << "family truncated to " << family.members.size() << " of " << family.raw_combinations
                << " combinations\n";
    }
  }
  return kOk;
}

int cmd_repair(const std::string &file, const CommonOptions &o) {
  auto cfg = resolve_config(o);
  auto program = load_annotated(file);
  if (program.clauses.empty()) throw UsageError(file + ": no //@ clauses to repair");
  auto verifier = make_verifier(cfg);
  auto result = mutation_based_gen(program, *verifier, cfg.repair);
  const auto &st = result.state;
  bool pass = st.last_verdict.outcome == VerdictOutcome::Pass && !result.program.clauses.empty();

  std::vector<std::string> clauses;
  for (const auto &c : result.program.clauses) clauses.push_back(render_clause(c));
  if (o.json) {
    json refuted = json::array();
    for (const auto &r : st.refuted_history) {
      refuted.push_back({{"iteration", r.iteration}, {"clause", r.clause_id}, {"text", r.text}});
    }
    std::cout << json{{"outcome", pass ? "verified" : "failed"},
                      {"verifier_calls", st.verifier_calls},
                      {"final_clauses", clauses},
                      {"refuted", refuted},
                      {"dropped", st.dropped()},
                      {"thrashing", st.thrashing}}
                     .dump()
              << "\n";
  } else {
    std::cout << (pass ? "verified" : "failed") << " after " << st.verifier_calls << " verifier calls\n";
    for (const auto &r : st.refuted_history) std::cout << "  refuted @" << r.iteration << ": " << r.text << "\n";
    for (const auto &id : st.dropped()) std::cout << "  dropped: " << id << "\n";
    for (const auto &id : st.thrashing) std::cout << "  thrashing: " << id << "\n";
    std::cout << instrument(result.program);
    if (!result.program.source.empty() && result.program.source.back() != '\n') std::cout << "\n";
  }
  return pass ? kOk : kDomainFailure;
}

int cmd_verify(const std::string &file, const CommonOptions &o) {
  auto cfg = resolve_config(o);
  auto program = load_annotated(file);
  auto verifier = make_verifier(cfg);
  auto verdict = verifier->verify(program);
  if (o.json) {
    std::cout << verdict_json(verdict).dump() << "\n";
  } else {
    print_verdict(verdict);
  }
  if (verdict.outcome == VerdictOutcome::Crash) throw VerifierUnavailable("verifier crashed");
  return verdict.outcome == VerdictOutcome::Pass ? kOk : kDomainFailure;
}

int cmd_eval(const std::string &file, const std::string &trace_file, const CommonOptions &o) {
  auto program = load_annotated(file);
  auto traces = load_trace_file(trace_file);
  auto checks = check_clauses(program, traces);
  bool ok = true;
  json rows = json::array();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto &c = checks[i];
    if (c.status == ClauseStatus::Falsified || c.status == ClauseStatus::Error) ok = false;
    if (o.json) {
      json row = {{"clause", c.clause_id},
                  {"text", render_clause(program.clauses[i])},
                  {"status", std::string(to_string(c.status))},
                  {"records_checked", c.records_checked},
                  {"message", c.message}};
      row["failing_record"] = c.failing_record ? json(*c.failing_record) : json(nullptr);
      rows.push_back(row);
    } else {
      std::cout << to_string(c.status) << "\t" << c.clause_id << "\t" << render_clause(program.clauses[i]) << "\t"
                << c.records_checked << " records";
      if (!c.message.empty()) std::cout << "\t" << c.message;
      std::cout << "\n";
    }
  }
  if (o.json) std::cout << json{{"verdict", ok ? "pass" : "fail"}, {"clauses", rows}}.dump() << "\n";
  else std::cout << "verdict: " << (ok ? "pass" : "fail") << " (" << traces.size() << " trace records)\n";
  return ok ? kOk : kDomainFailure;
}

int cmd_report(const std::string &dir, const CommonOptions &o) {
  if (!fs::exists(dir)) throw UsageError("no such report path: " + dir);
  auto summary = summarize(load_entries(dir));
  std::cout << (o.json ? format_summary_json(summary) + "\n" : format_summary_table(summary));
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Specification generation for Java programs: LLM conversation plus mutation-based repair"};
  app.require_subcommand(1);

  CommonOptions o;
  auto add_common = [&](CLI::App *cmd, bool verifier_flags) {
    cmd->add_option("--config", o.config, "YAML configuration file")->check(CLI::ExistingFile);
    cmd->add_flag("--json", o.json, "Emit structured JSON records");
    if (verifier_flags) {
      cmd->add_option("--strategy", o.strategy, "heuristic | random")->check(CLI::IsMember({"heuristic", "random"}));
      cmd->add_option("--seed", o.seed, "Seed for random selection");
      cmd->add_option("--verifier-cmd", o.verifier_command, "Verifier command with a {file} placeholder");
      cmd->add_option("--trace", o.trace, "Use the trace checker with this JSONL trace file")
          ->check(CLI::ExistingFile);
    }
  };

  std::vector<std::string> gen_files;
  std::optional<int> attempts;
  std::string out_dir;
  int workers = 0;
  auto *gen = app.add_subcommand("generate", "Run the full pipeline on Java files");
  gen->add_option("files", gen_files, "Java source files")->required()->check(CLI::ExistingFile);
  gen->add_option("--attempts", attempts, "Attempts per program (success probability)")->check(CLI::PositiveNumber);
  gen->add_option("--out", out_dir, "Output directory for report.jsonl and summary.txt");
  gen->add_option("--workers", workers, "Parallel pipeline runs")->check(CLI::PositiveNumber);
  add_common(gen, true);

  std::string clause_text;
  std::vector<std::string> kinds;
  std::size_t cap = 0;
  auto *mut = app.add_subcommand("mutate", "Print the scored mutation family of one clause");
  mut->add_option("clause", clause_text, "Clause, e.g. \"requires a <= b;\"")->required();
  mut->add_option("--kinds", kinds, "Mutation kinds to enable");
  mut->add_option("--cap", cap, "Variant cap");
  add_common(mut, false);

  std::string annotated_file, trace_file, report_dir;
  auto *rep = app.add_subcommand("repair", "Mutation-based repair of a hand-annotated program");
  rep->add_option("file", annotated_file, "Annotated Java file")->required()->check(CLI::ExistingFile);
  add_common(rep, true);

  auto *ver = app.add_subcommand("verify", "One verifier call on an annotated program");
  ver->add_option("file", annotated_file, "Annotated Java file")->required()->check(CLI::ExistingFile);
  add_common(ver, true);

  auto *ev = app.add_subcommand("eval", "Check clauses against recorded execution traces");
  ev->add_option("file", annotated_file, "Annotated Java file")->required()->check(CLI::ExistingFile);
  ev->add_option("traces", trace_file, "JSONL trace file")->required()->check(CLI::ExistingFile);
  add_common(ev, false);

  auto *rpt = app.add_subcommand("report", "Aggregate report.jsonl files into the metrics table");
  rpt->add_option("dir", report_dir, "Directory of .jsonl reports, or one report file")->required();
  add_common(rpt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*gen) return cmd_generate(gen_files, o, attempts, out_dir, workers);
    if (*mut) return cmd_mutate(clause_text, o, kinds, cap);
    if (*rep) return cmd_repair(annotated_file, o);
    if (*ver) return cmd_verify(annotated_file, o);
    if (*ev) return cmd_eval(annotated_file, trace_file, o);
    if (*rpt) return cmd_report(report_dir, o);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SyntaxError &e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kUsageError;
  } catch (const TypeMismatch &e) {
    std::cerr << "type error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InsufficientShots &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsageError;
}
