#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hi/coro.hpp"
#include "hi/memory.hpp"
#include "hi/seq_spec.hpp"

namespace hi {

class RoleViolation : public mem::EngineError {
 public:
  explicit RoleViolation(const std::string& what) : mem::EngineError(what) {}
};

struct OpInstance {
  int id = -1;
  int process = 0;
  seq::Op op{};
  int inv_step = 0;        // step index carrying the invocation
  int resp_step = -1;      // step index carrying the response, -1 while pending
  std::int64_t resp = 0;
  int own_steps = 0;       // steps taken by the invoking process for this op
};

struct StepRecord {
  int index = 0;  // 1-based
  int process = 0;
  Side side = Side::main;
  int op_id = -1;
  bool has_access = false;
  mem::Access acc{};
  mem::AccessOutcome out{};
  mem::CasWord after{};  // cell state after the step
  const char* label = "";
  bool invoked = false;
  bool responded = false;
  std::int64_t resp = 0;
};

struct Choice {
  int process = 0;
  Side side = Side::main;

  friend bool operator==(const Choice&, const Choice&) = default;
};

struct ScheduleEntry {
  bool marker = false;  // marker entries record a snapshot instead of stepping
  Choice c{};
};
using Schedule = std::vector<ScheduleEntry>;

inline ScheduleEntry step_of(int process, Side side = Side::main) {
  return ScheduleEntry{false, Choice{process, side}};
}
inline ScheduleEntry marker() { return ScheduleEntry{true, {}}; }

struct Execution {
  mem::MemorySnapshot initial;
  std::vector<StepRecord> steps;
  std::vector<OpInstance> ops;
  std::vector<std::pair<int, mem::MemorySnapshot>> markers;

  int num_steps() const { return static_cast<int>(steps.size()); }
  // Memory after step `cfg` (cfg = 0 is the initial configuration).
  mem::MemorySnapshot snapshot_at(int cfg) const;
  bool pending_at(const OpInstance& o, int cfg) const {
    return o.inv_step <= cfg && (o.resp_step < 0 || o.resp_step > cfg);
  }
  // Completed + pending ops as (op, resp) events ordered by step.
  std::vector<std::pair<seq::Op, std::int64_t>> completed_in_order() const;
};

// A concurrent object implementation: fixed memory layout plus one coroutine
// per operation, checkable against its sequential spec.
class AlgorithmObject {
 public:
  virtual ~AlgorithmObject() = default;
  virtual std::string name() const = 0;
  virtual int num_procs() const = 0;
  virtual void allocate(mem::Memory& m) = 0;
  // Clears process-local state between executions.
  virtual void reset_local() {}
  virtual task<std::int64_t> run_op(Proc& p, seq::Op op) = 0;
  virtual const seq::SequentialSpec& spec() const = 0;
  // Canonical memory for abstract state q, when the object defines one.
  virtual std::optional<mem::MemorySnapshot> canonical(std::uint64_t) const {
    return std::nullopt;
  }
};

enum class Predicate { every_step, state_quiescent, quiescent };

const char* predicate_name(Predicate p);

struct ObsPoint {
  int cfg = 0;
  mem::MemorySnapshot snap;
};

// Deterministic stepper: one schedule entry advances one process by exactly
// one shared-memory access (operation invocation rides along with the first
// access; an operation that needs no access completes on its invoking step).
class Engine {
 public:
  Engine(AlgorithmObject& obj, mem::Memory& m,
         std::vector<std::vector<seq::Op>> programs, int section_fair_cap = 3);

  // Enabled choices, deterministic order. Inside an interleaved block a side
  // that has run `section_fair_cap` consecutive steps is masked while the
  // other side is enabled.
  const std::vector<Choice>& options();
  void step(const Choice& c);
  void mark_snapshot();
  bool done() const;

  int steps_taken() const { return exec_.num_steps(); }
  const Execution& execution() const { return exec_; }
  const mem::MemorySnapshot& current_snapshot() const { return current_; }

  bool op_active(int process) const;
  // Any operation pending in the current configuration?
  bool any_pending(bool state_changing_only) const;
  bool predicate_holds(Predicate p) const;

 private:
  struct ProcRt {
    Proc ctx;
    std::vector<seq::Op> program;
    std::size_t next_op = 0;
    std::optional<task<std::int64_t>> active;
    int active_op_id = -1;
    Side last_side = Side::main;
    int streak = 0;
  };

  void finish_op(ProcRt& p, StepRecord& rec);

  AlgorithmObject& obj_;
  mem::Memory& mem_;
  std::vector<ProcRt> procs_;
  Execution exec_;
  mem::MemorySnapshot current_;
  std::vector<Choice> opts_;
  int section_fair_cap_;
  int pending_ops_ = 0;
  int pending_state_changing_ = 0;
};

Execution run(AlgorithmObject& obj, mem::Memory& m,
              std::vector<std::vector<seq::Op>> programs, const Schedule& s,
              int section_fair_cap = 3);

}  // namespace hi
