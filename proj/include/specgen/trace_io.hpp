#pragma once

// Trace files: one JSON object per line.
//
//   {"anchor":"method:twoSum","phase":"pre","bindings":{"nums":[2,7],"target":9}}
//   {"anchor":"loop:twoSum:0","phase":"iter","bindings":{"i":0,"n":2}}
//   {"anchor":"method:twoSum","phase":"post","bindings":{...},"result":[0,1],"old":{...}}
//
// Values are JSON integers, booleans, arrays of integers, strings, or null.
// Blank lines and lines starting with `#` are ignored.

#include "specgen/eval.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace specgen {

/// Throws Error naming the offending line.
std::vector<TraceRecord> parse_trace(std::string_view text);
std::vector<TraceRecord> load_trace_file(const std::filesystem::path &path);

std::string format_trace_record(const TraceRecord &record);

}  // namespace specgen
