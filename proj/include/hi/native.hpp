#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hi/engine.hpp"

namespace hi::nat {

struct NativeOptions {
  // Relative service rates for the two strands of an interleaved block.
  int left_ratio = 1;
  int right_ratio = 1;
};

struct NativeRun {
  // Responses per process, in program order.
  std::vector<std::vector<std::pair<seq::Op, std::int64_t>>> responses;
  mem::MemorySnapshot final_memory;
  std::uint64_t ops = 0;
};

// Drives one OS thread per process against hardware atomics. The algorithm
// coroutines are the ones engine mode explores; only the scheduler differs.
// Interleavings are whatever the machine produces, so this is a stress and
// sanity harness, not an exhaustive checker.
NativeRun run_native(AlgorithmObject& obj,
                     const std::vector<std::vector<seq::Op>>& programs,
                     const NativeOptions& opt = {});

}  // namespace hi::nat
