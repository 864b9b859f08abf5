#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hi/checker.hpp"
#include "hi/engine.hpp"
#include "hi/hi_check.hpp"

namespace hi::xpl {

struct Bounds {
  // Steps per execution before it is cut off and counted as truncated.
  std::uint64_t max_steps = 10'000;
  // Schedule moves away from the strand that took the previous step while
  // that strand or its process could continue, per execution; -1 means
  // unlimited. Once spent, the schedule follows the previous strand until a
  // forced move.
  int max_preemptions = -1;
  int section_fair_cap = 3;
  // Executions to explore before stopping early; 0 means no limit.
  std::uint64_t max_executions = 0;
};

struct Checks {
  bool linearizability = true;
  chk::LinOptions lin{};
  // History independence, checked inline at every configuration (including
  // the initial one) where the predicate holds. The checker is borrowed, so
  // its learned state can span several explorations.
  chk::HiChecker* hi = nullptr;
  Predicate observe_at = Predicate::quiescent;
  // Arbitrary end-of-execution check; a returned message is a violation.
  std::function<std::optional<std::string>(const Execution&)> finish_check;
};

struct Witness {
  Schedule schedule;
  Execution execution;
  std::string what;
  int cfg = 0;
};

struct Stats {
  std::uint64_t executions = 0;
  std::uint64_t truncated = 0;
  std::uint64_t obs_points = 0;
  std::uint64_t lin_unknown = 0;
  bool stopped_early = false;
};

struct Result {
  chk::Verdict verdict = chk::Verdict::unknown;
  std::optional<Witness> witness;
  Stats stats;
  std::string detail;
};

using ProgramSet = std::vector<std::vector<seq::Op>>;

// Depth-first enumeration of schedules within the bounds, re-executing the
// object deterministically once per explored execution and running the checks
// on each. Verdict::no reports the first violating execution as a witness;
// Verdict::yes means the bounded space was covered with no violation and no
// execution was truncated or left undecided.
Result explore(AlgorithmObject& obj, const ProgramSet& programs,
               const Bounds& bounds, const Checks& checks);

}  // namespace hi::xpl
