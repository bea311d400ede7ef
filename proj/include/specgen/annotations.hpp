#pragma once

// Moving clauses between program text and AnnotatedProgram.
//
// The source is treated as text: method headers and loop keywords are
// recognised line by line, and `//@` lines attach to the next method header or
// loop head below them (blank lines and Java `@Annotation` lines in between
// are skipped). A clause may span several consecutive `//@` lines; it ends at
// a `;` at parenthesis depth zero.

#include "specgen/clause.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specgen {

enum class DiagnosticKind { Syntax, Type, Orphan };

struct AnnotationDiagnostic {
  DiagnosticKind kind;
  int line;  // 1-based line of the first `//@` line of the clause
  std::string clause_text;
  std::string message;
};

struct ExtractionResult {
  AnnotatedProgram program;
  std::vector<AnnotationDiagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

/// Errors are collected per clause rather than thrown.
ExtractionResult extract_annotations(std::string_view source);

struct InstrumentedProgram {
  std::string text;
  /// 1-based line number of each emitted clause, parallel to program.clauses.
  std::vector<int> clause_lines;
};

/// Emits `//@` lines immediately above each anchor, indented like the anchor.
/// Throws AnchorNotFound.
InstrumentedProgram instrument_with_lines(const AnnotatedProgram &program);
std::string instrument(const AnnotatedProgram &program);

/// One anchor recognised in source text.
struct SourceAnchor {
  ProgramAnchor anchor;
  int line;  // 1-based
};

/// All method headers and loop heads in textual order.
std::vector<SourceAnchor> scan_anchors(std::string_view source);

/// Method name if `line` looks like a method or constructor header.
std::optional<std::string> method_header_name(std::string_view line);
bool is_loop_head(std::string_view line);

}  // namespace specgen
