#include "specgen/config.hpp"

#include "specgen/errors.hpp"
#include "specgen/mutation.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#ifndef SPECGEN_DATA_DIR
#define SPECGEN_DATA_DIR "data"
#endif

namespace specgen {
namespace fs = std::filesystem;

std::string_view to_string(ClientKind k) { return k == ClientKind::Http ? "http" : "scripted"; }

std::string_view to_string(VerifierAdapter a) {
  switch (a) {
    case VerifierAdapter::Exec: return "exec";
    case VerifierAdapter::Trace: return "trace";
    case VerifierAdapter::Mock: return "mock";
  }
  return "?";
}

fs::path default_data_dir() { return SPECGEN_DATA_DIR; }

PipelineConfig default_config() {
  PipelineConfig cfg;
  cfg.shots_path = default_data_dir() / "shots.json";
  return cfg;
}

void PipelineConfig::validate() const {
  endpoint.validate();
  if (client == ClientKind::Scripted && chat_script.empty()) {
    throw ConfigError("endpoint.script is required when endpoint.client is scripted");
  }
  if (adapter == VerifierAdapter::Exec && exec.command.find("{file}") == std::string::npos) {
    throw ConfigError("verifier.command must contain a {file} placeholder");
  }
  if (adapter == VerifierAdapter::Trace && trace_file.empty()) {
    throw ConfigError("verifier.trace_file is required when verifier.adapter is trace");
  }
  if (repair.variant_cap == 0) throw ConfigError("mutation.variant_cap must be positive");
  if (attempts < 1) throw ConfigError("report.attempts must be at least 1");
  if (workers < 1) throw ConfigError("report.workers must be at least 1");
  for (auto w : repair.weights.weight) {
    if (w > 0) throw ConfigError("weights must not be positive");
  }
}

namespace {

class Reader {
 public:
  explicit Reader(fs::path base) : base_(std::move(base)) {}

  void check_keys(const YAML::Node &node, const std::string &section, const std::set<std::string> &allowed) const {
    if (!node.IsMap()) throw ConfigError(label(section) + " must be a mapping");
    for (const auto &kv : node) {
      auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) throw ConfigError("unknown config key '" + join(section, key) + "'");
    }
  }

  template <typename T>
  T get(const YAML::Node &node, const std::string &key, const std::string &section, T fallback) const {
    auto v = node[key];
    if (!v) return fallback;
    try {
      return v.as<T>();
    } catch (const YAML::Exception &) {
      throw ConfigError("config key '" + join(section, key) + "' has the wrong type");
    }
  }

  fs::path path(const YAML::Node &node, const std::string &key, const std::string &section, fs::path fallback) const {
    auto v = node[key];
    if (!v) return fallback;
    fs::path p = get<std::string>(node, key, section, "");
    return p.is_absolute() ? p : base_ / p;
  }

  static std::string join(const std::string &section, const std::string &key) {
    return section.empty() ? key : section + "." + key;
  }

 private:
  static std::string label(const std::string &section) {
    return section.empty() ? "config" : "config section '" + section + "'";
  }

  fs::path base_;
};

}  // namespace

PipelineConfig parse_config(const std::string &yaml, const fs::path &base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception &e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  PipelineConfig cfg = default_config();
  if (!root || root.IsNull()) return cfg;

  Reader r(base_dir);
  r.check_keys(root, "", {"endpoint", "verifier", "weights", "mutation", "strategy", "budgets", "paths", "report"});

  if (auto n = root["endpoint"]) {
    const std::string s = "endpoint";
    r.check_keys(n, s, {"client", "script", "base_url", "model", "temperature", "max_rounds", "shot_count", "shot_seed",
                        "api_key_env", "request_timeout_s", "retry_count", "retry_backoff_ms", "token_budget",
                        "system_role"});
    auto client = r.get<std::string>(n, "client", s, "http");
    if (client == "http") {
      cfg.client = ClientKind::Http;
    } else if (client == "scripted") {
      cfg.client = ClientKind::Scripted;
    } else {
      throw ConfigError("endpoint.client must be http or scripted, got '" + client + "'");
    }
    cfg.chat_script = r.path(n, "script", s, {});
    auto &e = cfg.endpoint;
    e.base_url = r.get(n, "base_url", s, e.base_url);
    e.model = r.get(n, "model", s, e.model);
    e.temperature = r.get(n, "temperature", s, e.temperature);
    e.max_rounds = r.get(n, "max_rounds", s, e.max_rounds);
    e.shot_count = r.get(n, "shot_count", s, e.shot_count);
    if (n["shot_seed"]) cfg.shot_seed = r.get<std::uint64_t>(n, "shot_seed", s, 0);
    e.api_key_env = r.get(n, "api_key_env", s, e.api_key_env);
    e.request_timeout = std::chrono::seconds(r.get<long long>(n, "request_timeout_s", s, e.request_timeout.count()));
    e.retry_count = r.get(n, "retry_count", s, e.retry_count);
    e.retry_backoff = std::chrono::milliseconds(r.get<long long>(n, "retry_backoff_ms", s, e.retry_backoff.count()));
    e.token_budget = r.get<std::size_t>(n, "token_budget", s, e.token_budget);
    if (n["system_role"]) cfg.system_role = r.get<std::string>(n, "system_role", s, "");
  }

  if (auto n = root["verifier"]) {
    const std::string s = "verifier";
    r.check_keys(n, s, {"adapter", "command", "timeout_seconds", "failures_per_call", "diagnostic_pattern",
                        "association_pattern", "rules", "trace_file", "accept"});
    auto adapter = r.get<std::string>(n, "adapter", s, "exec");
    if (adapter == "exec") {
      cfg.adapter = VerifierAdapter::Exec;
    } else if (adapter == "trace") {
      cfg.adapter = VerifierAdapter::Trace;
    } else if (adapter == "mock") {
      cfg.adapter = VerifierAdapter::Mock;
    } else {
      throw ConfigError("verifier.adapter must be exec, trace or mock, got '" + adapter + "'");
    }
    cfg.exec.command = r.get(n, "command", s, cfg.exec.command);
    if (n["failures_per_call"]) {
      auto fpc = r.get<std::string>(n, "failures_per_call", s, "");
      if (fpc == "one") {
        cfg.failures_per_call = FailuresPerCall::One;
      } else if (fpc == "all") {
        cfg.failures_per_call = FailuresPerCall::All;
      } else {
        throw ConfigError("verifier.failures_per_call must be one or all, got '" + fpc + "'");
      }
      cfg.exec.failures_per_call = *cfg.failures_per_call;
    }
    if (n["timeout_seconds"]) {
      auto secs = r.get<double>(n, "timeout_seconds", s, 0.0);
      if (secs <= 0) throw ConfigError("verifier.timeout_seconds must be positive");
      cfg.exec.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
    }
    if (auto rules = n["rules"]) {
      if (!rules.IsSequence()) throw ConfigError("verifier.rules must be a list of {pattern, category}");
      cfg.exec.rules.clear();
      for (const auto &rule : rules) {
        r.check_keys(rule, "verifier.rules[]", {"pattern", "category"});
        auto pattern = r.get<std::string>(rule, "pattern", "verifier.rules[]", "");
        auto name = r.get<std::string>(rule, "category", "verifier.rules[]", "");
        auto category = failure_category_from_string(name);
        if (!category) throw ConfigError("verifier.rules[]: unknown category '" + name + "'");
        try {
          std::regex check(pattern);
        } catch (const std::regex_error &) {
          throw ConfigError("verifier.rules[]: invalid pattern '" + pattern + "'");
        }
        cfg.exec.rules.push_back({pattern, *category});
      }
    }
    cfg.exec.diagnostic_pattern = r.get(n, "diagnostic_pattern", s, cfg.exec.diagnostic_pattern);
    cfg.exec.association_pattern = r.get(n, "association_pattern", s, cfg.exec.association_pattern);
    cfg.trace_file = r.path(n, "trace_file", s, {});
    cfg.mock_accept = r.get(n, "accept", s, cfg.mock_accept);
  }

  if (auto n = root["weights"]) {
    r.check_keys(n, "weights", {"predicative", "logical", "comparative", "arithmetic"});
    for (auto k : kAllMutationKinds) {
      std::string name(to_string(k));
      cfg.repair.weights[k] = r.get<std::int64_t>(n, name, "weights", cfg.repair.weights[k]);
    }
  }

  if (auto n = root["mutation"]) {
    const std::string s = "mutation";
    r.check_keys(n, s, {"enabled", "kinds", "variant_cap"});
    cfg.mutation_enabled = r.get(n, "enabled", s, cfg.mutation_enabled);
    if (n["kinds"]) {
      cfg.repair.kinds.clear();
      for (const auto &name : r.get<std::vector<std::string>>(n, "kinds", s, {})) {
        auto k = mutation_kind_from_string(name);
        if (!k) throw ConfigError("mutation.kinds: unknown mutation kind '" + name + "'");
        cfg.repair.kinds.insert(*k);
      }
    }
    cfg.repair.variant_cap = r.get<std::size_t>(n, "variant_cap", s, cfg.repair.variant_cap);
  }

  if (auto n = root["strategy"]) {
    const std::string s = "strategy";
    r.check_keys(n, s, {"kind", "seed"});
    auto kind = r.get<std::string>(n, "kind", s, "heuristic");
    auto seed = r.get<std::uint64_t>(n, "seed", s, 0);
    if (kind == "heuristic") {
      cfg.repair.strategy = SelectionStrategy::heuristic();
      cfg.repair.strategy.seed = seed;
    } else if (kind == "random") {
      cfg.repair.strategy = SelectionStrategy::random(seed);
    } else {
      throw ConfigError("strategy.kind must be heuristic or random, got '" + kind + "'");
    }
  }

  if (auto n = root["budgets"]) {
    const std::string s = "budgets";
    r.check_keys(n, s, {"pipeline_s"});
    cfg.pipeline_budget = std::chrono::seconds(
        r.get<long long>(n, "pipeline_s", s,
                         std::chrono::duration_cast<std::chrono::seconds>(cfg.pipeline_budget).count()));
  }

  if (auto n = root["paths"]) {
    const std::string s = "paths";
    r.check_keys(n, s, {"shots", "guidance", "output_dir"});
    cfg.shots_path = r.path(n, "shots", s, cfg.shots_path);
    cfg.guidance_path = r.path(n, "guidance", s, cfg.guidance_path);
    cfg.output_dir = r.path(n, "output_dir", s, cfg.output_dir);
  }

  if (auto n = root["report"]) {
    const std::string s = "report";
    r.check_keys(n, s, {"attempts", "workers", "include_timing"});
    cfg.attempts = r.get(n, "attempts", s, cfg.attempts);
    cfg.workers = r.get(n, "workers", s, cfg.workers);
    cfg.include_timing = r.get(n, "include_timing", s, cfg.include_timing);
  }

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace specgen
