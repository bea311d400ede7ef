#include "specgen/annotations.hpp"

#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace specgen {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string_view ltrim(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::string_view trim(std::string_view s) {
  s = ltrim(s);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view indentation(std::string_view line) {
  return line.substr(0, line.size() - ltrim(line).size());
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = static_cast<unsigned char>(s[0]);
  if (!std::isalpha(start) && s[0] != '_' && s[0] != '$') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  });
}

bool starts_with_word(std::string_view s, std::string_view word) {
  if (!s.starts_with(word)) return false;
  if (s.size() == word.size()) return true;
  char c = s[word.size()];
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == '{';
}

constexpr std::array<std::string_view, 16> kStatementWords = {
    "return", "new", "else", "throw", "case", "if", "for", "while",
    "switch", "catch", "do", "try", "assert", "class", "interface", "enum"};

bool is_statement_word(std::string_view w) {
  return std::find(kStatementWords.begin(), kStatementWords.end(), w) != kStatementWords.end();
}

bool is_annotation_line(std::string_view trimmed) { return trimmed.starts_with("//@"); }

bool skippable_between(std::string_view trimmed) {
  return trimmed.empty() || (trimmed.starts_with("@") && !trimmed.starts_with("@*"));
}

bool clause_complete(std::string_view text) {
  auto t = trim(text);
  if (!t.ends_with(';')) return false;
  int depth = 0;
  for (char c : t) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
  }
  return depth <= 0;
}

struct PendingClause {
  std::string text;
  int line;
};

}  // namespace

std::optional<std::string> method_header_name(std::string_view line) {
  auto t = trim(line);
  if (t.empty() || t.starts_with("//") || t.starts_with("/*") || t.starts_with("*") ||
      t.starts_with("@") || t.starts_with("}")) {
    return std::nullopt;
  }
  if (t.ends_with("{")) t = trim(t.substr(0, t.size() - 1));
  if (t.find(';') != std::string_view::npos || t.find('=') != std::string_view::npos ||
      t.find("->") != std::string_view::npos) {
    return std::nullopt;
  }
  auto open = t.find('(');
  auto close = t.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  auto tail = trim(t.substr(close + 1));
  if (!tail.empty() && !starts_with_word(tail, "throws")) return std::nullopt;

  std::vector<std::string_view> words;
  auto prefix = trim(t.substr(0, open));
  std::size_t i = 0;
  while (i < prefix.size()) {
    while (i < prefix.size() && std::isspace(static_cast<unsigned char>(prefix[i]))) ++i;
    std::size_t start = i;
    while (i < prefix.size() && !std::isspace(static_cast<unsigned char>(prefix[i]))) ++i;
    if (i > start) words.push_back(prefix.substr(start, i - start));
  }
  if (words.size() < 2) return std::nullopt;
  auto name = words.back();
  if (!is_identifier(name) || is_statement_word(name) || is_statement_word(words.front())) {
    return std::nullopt;
  }
  return std::string(name);
}

bool is_loop_head(std::string_view line) {
  auto t = ltrim(line);
  return starts_with_word(t, "for") || starts_with_word(t, "while") || starts_with_word(t, "do");
}

std::vector<SourceAnchor> scan_anchors(std::string_view source) {
  std::vector<SourceAnchor> out;
  std::string method;
  int loops = 0;
  int lineno = 0;
  for (auto line : split_lines(source)) {
    ++lineno;
    if (is_annotation_line(ltrim(line))) continue;
    if (auto name = method_header_name(line)) {
      method = *name;
      loops = 0;
      out.push_back({ProgramAnchor{method, std::nullopt}, lineno});
    } else if (is_loop_head(line) && !method.empty()) {
      out.push_back({ProgramAnchor{method, loops++}, lineno});
    }
  }
  return out;
}

ExtractionResult extract_annotations(std::string_view source) {
  ExtractionResult result;
  auto lines = split_lines(source);

  std::vector<std::string_view> kept;
  std::vector<PendingClause> pending;
  std::string acc;
  int acc_line = 0;
  std::string method;
  int loops = 0;

  auto flush_acc = [&] {
    if (!acc.empty()) {
      pending.push_back({acc, acc_line});
      acc.clear();
    }
  };

  auto orphan_all = [&] {
    for (auto &p : pending) {
      result.diagnostics.push_back({DiagnosticKind::Orphan, p.line, p.text,
                                    "annotation precedes neither a method header nor a loop"});
    }
    pending.clear();
  };

  auto attach_all = [&](const ProgramAnchor &anchor) {
    for (auto &p : pending) {
      try {
        auto clause = parse_clause(p.text);
        clause.anchor = anchor;
        result.program.clauses.push_back(std::move(clause));
      } catch (const SyntaxError &e) {
        result.diagnostics.push_back({DiagnosticKind::Syntax, p.line, p.text, e.what()});
      } catch (const TypeMismatch &e) {
        result.diagnostics.push_back({DiagnosticKind::Type, p.line, p.text, e.what()});
      }
    }
    pending.clear();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    auto trimmed = trim(line);
    int lineno = static_cast<int>(i) + 1;

    if (is_annotation_line(trimmed)) {
      auto content = trim(trimmed.substr(3));
      if (acc.empty()) {
        acc_line = lineno;
        acc = std::string(content);
      } else {
        acc += " ";
        acc += content;
      }
      if (clause_complete(acc)) flush_acc();
      continue;
    }
    flush_acc();
    kept.push_back(line);
    if (skippable_between(trimmed)) continue;

    std::optional<ProgramAnchor> anchor;
    if (auto name = method_header_name(line)) {
      method = *name;
      loops = 0;
      anchor = ProgramAnchor{method, std::nullopt};
    } else if (is_loop_head(line) && !method.empty()) {
      anchor = ProgramAnchor{method, loops++};
    }

    if (pending.empty()) continue;
    if (anchor) {
      attach_all(*anchor);
    } else {
      orphan_all();
    }
  }
  flush_acc();
  orphan_all();

  std::ostringstream out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out << '\n';
    out << kept[i];
  }
  result.program.source = out.str();
  assign_ids(result.program.clauses);
  return result;
}

InstrumentedProgram instrument_with_lines(const AnnotatedProgram &program) {
  auto lines = split_lines(program.source);
  auto anchors = scan_anchors(program.source);

  // Clauses go above the anchor line and any Java annotations stacked on it.
  std::map<std::size_t, std::size_t> insert_at;  // line index -> anchor line index
  std::map<ProgramAnchor, std::size_t> anchor_line;
  for (const auto &a : anchors) {
    if (anchor_line.contains(a.anchor)) continue;
    std::size_t idx = static_cast<std::size_t>(a.line - 1);
    anchor_line[a.anchor] = idx;
    std::size_t at = idx;
    while (at > 0 && trim(lines[at - 1]).starts_with("@")) --at;
    insert_at[at] = idx;
  }

  std::map<std::size_t, std::vector<std::size_t>> by_line;  // anchor line -> clause indexes
  for (std::size_t c = 0; c < program.clauses.size(); ++c) {
    const auto &anchor = program.clauses[c].anchor;
    auto it = anchor_line.find(anchor);
    if (it == anchor_line.end()) {
      throw AnchorNotFound("anchor " + anchor.to_string() + " does not resolve in the source");
    }
    by_line[it->second].push_back(c);
  }

  InstrumentedProgram out;
  out.clause_lines.assign(program.clauses.size(), 0);
  std::ostringstream text;
  int emitted = 0;
  auto emit = [&](std::string_view s) {
    if (emitted++) text << '\n';
    text << s;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto ins = insert_at.find(i); ins != insert_at.end()) {
      auto group = by_line.find(ins->second);
      if (group != by_line.end()) {
        auto indent = indentation(lines[ins->second]);
        for (auto c : group->second) {
          emit(std::string(indent) + render_clause(program.clauses[c]));
          out.clause_lines[c] = emitted;
        }
      }
    }
    emit(lines[i]);
  }
  out.text = text.str();
  return out;
}

std::string instrument(const AnnotatedProgram &program) { return instrument_with_lines(program).text; }

}  // namespace specgen
