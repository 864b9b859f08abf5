#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hi/engine.hpp"
#include "hi/seq_spec.hpp"

namespace hi::chk {

enum class Verdict { yes, no, unknown };

const char* verdict_name(Verdict v);

struct LinOptions {
  // Pending operations may be assigned a linearization point (with a response
  // computed from the spec) or dropped entirely.
  bool include_pending = true;
  // Search nodes before giving up with Verdict::unknown.
  std::uint64_t node_cap = 50'000'000;
};

struct LinStep {
  int op_index = -1;  // index into Execution::ops
  std::uint64_t state = 0;
  std::int64_t resp = 0;
};

struct LinResult {
  Verdict verdict = Verdict::unknown;
  std::vector<LinStep> order;  // witness order when verdict is yes
  std::uint64_t nodes = 0;
  std::string detail;
};

// Decides whether the execution's operation history is linearizable with
// respect to the spec, by exhaustive search over linearization orders with
// memoization on (linearized-set, state) pairs. Supports up to 64 operations.
LinResult check_linearizable(const seq::SequentialSpec& spec,
                             const Execution& e, const LinOptions& opt = {});

struct StateSetOptions {
  std::uint64_t node_cap = 50'000'000;
};

struct StateSet {
  bool complete = false;  // false when the node cap cut the enumeration short
  std::vector<std::uint64_t> states;  // sorted, deduplicated
  std::uint64_t nodes = 0;

  bool contains(std::uint64_t q) const;
};

// Enumerates every spec state the object can be in after `cfg` steps, over
// all linearizations of the operations invoked by then. Operations without a
// response by `cfg` count as pending there even if they respond later; pending
// read-only operations are dropped since they cannot move the state. An empty
// complete set means the history prefix itself is not linearizable.
StateSet possible_states_at(const seq::SequentialSpec& spec, const Execution& e,
                            int cfg, const StateSetOptions& opt = {});

}  // namespace hi::chk
