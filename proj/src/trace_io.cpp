#include "specgen/trace_io.hpp"

#include "specgen/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace specgen {
namespace {

using nlohmann::json;

Value value_from_json(const json &j, const std::string &where) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
    return BigInt(j.get<std::int64_t>());
  }
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return NullValue{};
  if (j.is_array()) {
    IntArray arr;
    arr.reserve(j.size());
    for (const auto &e : j) {
      if (!e.is_number_integer()) throw Error(where + ": arrays may only hold integers");
      arr.push_back(e.is_number_unsigned() ? BigInt(e.get<std::uint64_t>())
                                           : BigInt(e.get<std::int64_t>()));
    }
    return arr;
  }
  throw Error(where + ": unsupported value " + j.dump());
}

json big_to_json(const BigInt &v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return v.convert_to<std::int64_t>();
  }
  throw Error("integer " + v.str() + " does not fit a trace file value");
}

json value_to_json(const Value &v) {
  return std::visit(
      [](const auto &x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BigInt>) {
          return big_to_json(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x;
        } else if constexpr (std::is_same_v<T, IntArray>) {
          json arr = json::array();
          for (const auto &e : x) arr.push_back(big_to_json(e));
          return arr;
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return nullptr;
        }
      },
      v);
}

Bindings bindings_from_json(const json &j, const std::string &where) {
  if (!j.is_object()) throw Error(where + ": bindings must be an object");
  Bindings out;
  for (const auto &[name, value] : j.items()) {
    out.emplace(name, value_from_json(value, where + " binding '" + name + "'"));
  }
  return out;
}

json bindings_to_json(const Bindings &b) {
  json out = json::object();
  for (const auto &[name, value] : b) out[name] = value_to_json(value);
  return out;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::vector<TraceRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string where = "trace line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(where + ": " + e.what());
    }
    if (!j.is_object()) throw Error(where + ": expected an object");
    for (const auto &[key, _] : j.items()) {
      if (key != "anchor" && key != "phase" && key != "bindings" && key != "result" && key != "old") {
        throw Error(where + ": unknown field '" + key + "'");
      }
    }
    if (!j.contains("anchor") || !j["anchor"].is_string()) throw Error(where + ": missing anchor");
    if (!j.contains("phase") || !j["phase"].is_string()) throw Error(where + ": missing phase");

    TraceRecord r;
    auto anchor = ProgramAnchor::parse(j["anchor"].get<std::string>());
    if (!anchor) throw Error(where + ": malformed anchor " + j["anchor"].dump());
    r.anchor = *anchor;
    auto phase = trace_phase_from_string(j["phase"].get<std::string>());
    if (!phase) throw Error(where + ": phase must be pre, post or iter");
    r.phase = *phase;
    if (j.contains("bindings")) r.bindings = bindings_from_json(j["bindings"], where);
    if (j.contains("result")) r.result = value_from_json(j["result"], where + " result");
    if (j.contains("old")) r.old = bindings_from_json(j["old"], where + " old");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TraceRecord> load_trace_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string format_trace_record(const TraceRecord &record) {
  json j;
  j["anchor"] = record.anchor.to_string();
  j["phase"] = std::string(to_string(record.phase));
  j["bindings"] = bindings_to_json(record.bindings);
  if (record.result) j["result"] = value_to_json(*record.result);
  if (record.old) j["old"] = bindings_to_json(*record.old);
  return j.dump();
}

}  // namespace specgen
