#pragma once

#include <string>
#include <vector>

#include "hi/engine.hpp"

namespace hi::tio {

// Self-contained record of one engine execution: enough to re-run the exact
// schedule against a rebuilt object and to audit every step offline.
struct TraceDoc {
  std::string object;      // object name
  std::string descriptor;  // object factory descriptor
  std::string spec;        // sequential spec name
  int procs = 0;
  int section_fair_cap = 3;
  std::vector<std::vector<seq::Op>> programs;
  Execution execution;
};

TraceDoc make_trace(const AlgorithmObject& obj, const std::string& descriptor,
                    const std::vector<std::vector<seq::Op>>& programs,
                    const Execution& e, int section_fair_cap = 3);

// One JSON object per line: a header line followed by step, op and marker
// records. Serialization is canonical: parsing and re-serializing a document
// reproduces it byte for byte.
std::string to_jsonl(const TraceDoc& doc);
TraceDoc from_jsonl(const std::string& text);

void write_trace_file(const std::string& path, const TraceDoc& doc);
TraceDoc read_trace_file(const std::string& path);

// Extracts the schedule (steps and snapshot markers) the trace recorded.
Schedule schedule_of(const Execution& e);

struct ReplayResult {
  bool ok = false;
  std::string detail;
};

// Re-runs the recorded schedule against a fresh instance of the object and
// compares every step, operation and marker against the trace.
ReplayResult replay_trace(const TraceDoc& doc, AlgorithmObject& obj);

}  // namespace hi::tio
