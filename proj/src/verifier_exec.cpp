#include "specgen/annotations.hpp"
#include "specgen/errors.hpp"
#include "specgen/verifier.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace specgen {
namespace fs = std::filesystem;
namespace {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "specgen-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw VerifierUnavailable("mkdtemp failed: " + std::string(std::strerror(errno)));
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

class Pipe {
 public:
  Pipe() {
    if (::pipe(fds_) != 0) throw VerifierUnavailable("pipe failed: " + std::string(std::strerror(errno)));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe &) = delete;
  Pipe &operator=(const Pipe &) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() {
    if (fds_[0] >= 0) ::close(fds_[0]);
    fds_[0] = -1;
  }
  void close_write() {
    if (fds_[1] >= 0) ::close(fds_[1]);
    fds_[1] = -1;
  }

 private:
  int fds_[2] = {-1, -1};
};

std::string java_file_name(const std::string &source) {
  static const std::regex public_class(R"(public\s+(?:final\s+|abstract\s+)*class\s+([A-Za-z_$][\w$]*))");
  static const std::regex any_class(R"(\bclass\s+([A-Za-z_$][\w$]*))");
  std::smatch m;
  if (std::regex_search(source, m, public_class) || std::regex_search(source, m, any_class)) {
    return m[1].str() + ".java";
  }
  return "Main.java";
}

std::string substitute_file(std::string command, const std::string &file) {
  const std::string placeholder = "{file}";
  std::string quoted = "'" + file + "'";
  for (auto pos = command.find(placeholder); pos != std::string::npos;
       pos = command.find(placeholder, pos + quoted.size())) {
    command.replace(pos, placeholder.size(), quoted);
  }
  return command;
}

}  // namespace

CommandResult run_command(const std::string &command, std::chrono::milliseconds timeout) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  Pipe out;

  pid_t pid = ::fork();
  if (pid < 0) throw VerifierUnavailable("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out.write_end(), STDOUT_FILENO);
    ::dup2(out.write_end(), STDERR_FILENO);
    ::close(out.read_end());
    ::close(out.write_end());
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out.close_write();

  CommandResult result;
  auto deadline = start + timeout;
  std::array<char, 4096> buf{};
  bool eof = false;
  while (!eof) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{out.read_end(), POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    ssize_t n = ::read(out.read_end(), buf.data(), buf.size());
    if (n > 0) {
      result.output.append(buf.data(), static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      eof = true;
    }
  }

  int status = 0;
  if (result.timed_out) {
    ::kill(-pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    result.exit_code = -1;
  } else {
    // Output closed; the process may still be running briefly.
    for (;;) {
      pid_t w = ::waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (clock::now() >= deadline) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        result.timed_out = true;
        break;
      }
      ::usleep(2000);
    }
    if (!result.timed_out) {
      result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    } else {
      result.exit_code = -1;
    }
  }
  result.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
  if (!result.timed_out && result.exit_code == 127 &&
      result.output.find("not found") != std::string::npos) {
    throw CommandNotFound("verifier command not found: " + command + "\n" + result.output);
  }
  return result;
}

VerifierVerdict interpret_command_result(const CommandResult &result, const AnnotatedProgram &program,
                                         const std::vector<int> &clause_lines, const ExecConfig &cfg) {
  VerifierVerdict verdict;
  verdict.wall_time = result.wall_time;
  if (result.timed_out) {
    verdict.outcome = VerdictOutcome::Timeout;
    return verdict;
  }

  std::regex diag(cfg.diagnostic_pattern);
  std::regex assoc(cfg.association_pattern, std::regex::icase);

  // Nearest instrumented clause at or above a line.
  auto attribute = [&](int line) -> std::optional<std::string> {
    std::optional<std::string> best;
    int best_line = 0;
    for (std::size_t i = 0; i < clause_lines.size() && i < program.clauses.size(); ++i) {
      if (clause_lines[i] <= line && clause_lines[i] > best_line) {
        best_line = clause_lines[i];
        best = program.clauses[i].id;
      }
    }
    return best;
  };

  std::vector<FailureReport> failures;
  std::istringstream in(result.output);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_search(line, m, diag)) {
      // Source excerpt and caret lines belong to the previous diagnostic.
      if (!failures.empty() && !line.empty()) failures.back().raw_message += "\n" + line;
      continue;
    }
    int lineno = std::stoi(m[1].str());
    std::string message = m[2].str();
    if (!failures.empty() && std::regex_search(message, assoc)) {
      auto &prev = failures.back();
      prev.raw_message += "\n" + line;
      prev.source_line = lineno;
      if (prev.category != FailureCategory::SyntaxError) {
        if (auto id = attribute(lineno)) prev.clause_id = id;
      }
      continue;
    }
    FailureReport report;
    report.raw_message = line;
    report.category = classify_failure(message, cfg.rules);
    report.source_line = lineno;
    if (report.category != FailureCategory::SyntaxError) report.clause_id = attribute(lineno);
    failures.push_back(std::move(report));
  }
  for (auto &f : failures) {
    if (!f.clause_id && f.category != FailureCategory::SyntaxError) f.category = FailureCategory::Unknown;
  }

  if (failures.empty()) {
    verdict.outcome = result.exit_code == 0 ? VerdictOutcome::Pass : VerdictOutcome::Crash;
    if (verdict.outcome == VerdictOutcome::Crash) {
      verdict.notes.push_back("exit code " + std::to_string(result.exit_code) + ": " + result.output);
    }
    return verdict;
  }
  verdict.outcome = VerdictOutcome::Fail;
  verdict.failures = std::move(failures);
  apply_failure_limit(verdict, cfg.failures_per_call);
  return verdict;
}

ExecVerifier::ExecVerifier(ExecConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command.find("{file}") == std::string::npos) {
    throw ConfigError("verifier.command must contain a {file} placeholder");
  }
}

VerifierVerdict ExecVerifier::verify(const AnnotatedProgram &program) {
  auto instrumented = instrument_with_lines(program);
  TempDir dir;
  auto file = dir.path() / java_file_name(program.source);
  {
    std::ofstream out(file);
    out << instrumented.text;
    if (!instrumented.text.empty() && instrumented.text.back() != '\n') out << '\n';
  }
  auto result = run_command(substitute_file(cfg_.command, file.string()), cfg_.timeout);
  return interpret_command_result(result, program, instrumented.clause_lines, cfg_);
}

}  // namespace specgen
