#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hi/engine.hpp"

namespace hi::sc {

// Builds a concurrent object from a descriptor:
//   "alg1:K=3,v0=1"   scan register, set + clear down
//   "alg2:K=3,v0=1"   scan register, clear both ways, lock-free reads
//   "alg4:K=3,v0=1"   scan register with writer-to-reader helping
//   "maxreg:K=3,v0=1" max-register
//   "hiset:t=3,procs=2"
//   "rllsc:n=2,vmax=3,v0=0"
//   "universal:procs=2;fast=1;spec=counter:cap=4"
// The universal form uses ';' separators and its spec field comes last,
// since a spec descriptor itself contains ':' and ','.
std::unique_ptr<AlgorithmObject> object_from_descriptor(const std::string& d);

struct RunOptions {
  std::optional<std::uint64_t> max_steps;
  std::optional<int> max_preemptions;
  std::optional<std::uint64_t> max_executions;
  // When set, directed scenarios dump their execution here and explorations
  // dump their witness execution (if the scenario found one).
  std::string trace_path;
};

struct ScenarioResult {
  std::string name;
  std::string claim;  // what the scenario establishes when ok
  bool ok = false;
  std::string detail;
  std::uint64_t executions = 0;
};

// Directed schedules and bounded exhaustive explorations, each with a fixed
// expected outcome. A scenario is ok when every observed verdict matches it.
std::vector<std::string> scenario_names();
bool scenario_exists(const std::string& name);
ScenarioResult run_scenario(const std::string& name, const RunOptions& opt = {});

// Re-runs a recorded trace file against a rebuilt object and compares.
ScenarioResult replay_file(const std::string& path);

}  // namespace hi::sc
