#include "hi/hi_check.hpp"

#include <sstream>

namespace hi::chk {

namespace {

std::string print_snapshot(const mem::MemorySnapshot& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) os << " ";
    os << m[i].w.val;
    if (m[i].w.context) os << "/" << m[i].w.context;
  }
  os << "]";
  return os.str();
}

}  // namespace

HiChecker::HiChecker(const AlgorithmObject& obj, HiMode mode,
                     StateSetOptions oracle)
    : obj_(&obj), mode_(mode), oracle_(oracle) {}

bool HiChecker::observe(const Execution& e, int cfg,
                        const mem::MemorySnapshot& m) {
  if (bad_) return false;
  ++observations_;
  StateSet s = possible_states_at(obj_->spec(), e, cfg, oracle_);
  if (s.states.empty() && s.complete) {
    bad_ = HiViolation{cfg, "no spec state is consistent with the history", m,
                       std::nullopt, {}};
    return false;
  }
  if (mode_ == HiMode::analytic) {
    if (!s.complete) {
      ++skipped_;
      return true;
    }
    std::optional<mem::MemorySnapshot> first;
    for (std::uint64_t q : s.states) {
      std::optional<mem::MemorySnapshot> can = obj_->canonical(q);
      if (!can)
        throw mem::EngineError(obj_->name() +
                               " declares no canonical form for state " +
                               obj_->spec().print_state(q));
      if (*can == m) return true;
      if (!first) first = std::move(can);
    }
    bad_ = HiViolation{
        cfg,
        "memory " + print_snapshot(m) +
            " is not canonical for any of the " +
            std::to_string(s.states.size()) + " state(s) consistent with " +
            "the history, e.g. state " + obj_->spec().print_state(s.states[0]) +
            " wants " + print_snapshot(*first),
        m, std::move(first), std::move(s.states)};
    return false;
  }
  // Learned mode needs the state pinned down exactly.
  if (!s.complete || s.states.size() != 1) {
    ++skipped_;
    return true;
  }
  std::uint64_t q = s.states[0];
  auto [it, inserted] = learned_.try_emplace(q, m);
  if (inserted || it->second == m) return true;
  bad_ = HiViolation{cfg,
                     "state " + obj_->spec().print_state(q) +
                         " was reached with memory " +
                         print_snapshot(it->second) + " before and " +
                         print_snapshot(m) + " now",
                     m, it->second, std::move(s.states)};
  return false;
}

}  // namespace hi::chk
