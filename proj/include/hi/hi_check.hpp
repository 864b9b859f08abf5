#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hi/checker.hpp"
#include "hi/engine.hpp"

namespace hi::chk {

enum class HiMode {
  // Compare memory against the object's declared canonical representation of
  // some state consistent with the history so far.
  analytic,
  // Learn the representation from the first visit to each state and flag any
  // later visit that shows different memory. Works without a declared
  // canonical map; the learned map persists across executions.
  learned,
};

struct HiViolation {
  int cfg = 0;
  std::string what;
  mem::MemorySnapshot snapshot;
  std::optional<mem::MemorySnapshot> expected;
  std::vector<std::uint64_t> states;  // candidate states at the point
};

// Checks history independence at observation points: the shared memory there
// must be a function of the abstract state alone. Feed every observation
// point of interest to observe(); the first failure is kept as a witness.
class HiChecker {
 public:
  HiChecker(const AlgorithmObject& obj, HiMode mode,
            StateSetOptions oracle = {});

  // Returns false when the observation violates history independence.
  bool observe(const Execution& e, int cfg, const mem::MemorySnapshot& m);

  bool ok() const { return !bad_.has_value(); }
  const std::optional<HiViolation>& violation() const { return bad_; }
  HiMode mode() const { return mode_; }
  std::uint64_t observations() const { return observations_; }
  // Observation points skipped because the state there was not uniquely
  // determined (learned mode) or the enumeration hit its cap.
  std::uint64_t skipped() const { return skipped_; }
  std::size_t learned_states() const { return learned_.size(); }

 private:
  const AlgorithmObject* obj_;
  HiMode mode_;
  StateSetOptions oracle_;
  std::map<std::uint64_t, mem::MemorySnapshot> learned_;
  std::optional<HiViolation> bad_;
  std::uint64_t observations_ = 0;
  std::uint64_t skipped_ = 0;
};

}  // namespace hi::chk
