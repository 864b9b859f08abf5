#include "hi/engine.hpp"

namespace hi {

const char* predicate_name(Predicate p) {
  switch (p) {
    case Predicate::every_step: return "every_step";
    case Predicate::state_quiescent: return "state_quiescent";
    case Predicate::quiescent: return "quiescent";
  }
  return "?";
}

mem::MemorySnapshot Execution::snapshot_at(int cfg) const {
  if (cfg < 0 || cfg > num_steps())
    throw mem::EngineError("snapshot index out of range");
  mem::MemorySnapshot snap = initial;
  for (int i = 0; i < cfg; ++i) {
    const StepRecord& r = steps[i];
    if (r.has_access) snap[r.acc.obj.index].w = r.after;
  }
  return snap;
}

std::vector<std::pair<seq::Op, std::int64_t>> Execution::completed_in_order() const {
  std::vector<std::pair<seq::Op, std::int64_t>> out;
  for (const StepRecord& r : steps)
    if (r.responded) out.emplace_back(ops[r.op_id].op, r.resp);
  return out;
}

Engine::Engine(AlgorithmObject& obj, mem::Memory& m,
               std::vector<std::vector<seq::Op>> programs, int section_fair_cap)
    : obj_(obj), mem_(m), section_fair_cap_(section_fair_cap) {
  if (!m.sealed()) throw mem::EngineError("engine needs sealed memory");
  if (static_cast<int>(programs.size()) != obj.num_procs())
    throw mem::EngineError("program count must match process count");
  mem_.reset();
  obj_.reset_local();
  procs_.reserve(programs.size());
  for (std::size_t i = 0; i < programs.size(); ++i) {
    procs_.push_back(ProcRt{});
    procs_.back().ctx.id = static_cast<int>(i) + 1;
    procs_.back().program = std::move(programs[i]);
  }
  current_ = mem_.snapshot();
  exec_.initial = current_;
}

const std::vector<Choice>& Engine::options() {
  opts_.clear();
  for (const ProcRt& p : procs_) {
    int pid = p.ctx.id;
    if (p.active) {
      if (p.ctx.in_section) {
        bool l = p.ctx.has_pending(Side::left);
        bool r = p.ctx.has_pending(Side::right);
        bool cap_l = l && r && p.last_side == Side::left && p.streak >= section_fair_cap_;
        bool cap_r = l && r && p.last_side == Side::right && p.streak >= section_fair_cap_;
        if (l && !cap_l) opts_.push_back(Choice{pid, Side::left});
        if (r && !cap_r) opts_.push_back(Choice{pid, Side::right});
      } else if (p.ctx.has_pending(Side::main)) {
        opts_.push_back(Choice{pid, Side::main});
      }
    } else if (p.next_op < p.program.size()) {
      opts_.push_back(Choice{pid, Side::main});
    }
  }
  return opts_;
}

bool Engine::done() const {
  for (const ProcRt& p : procs_)
    if (p.active || p.next_op < p.program.size()) return false;
  return true;
}

bool Engine::op_active(int process) const {
  return procs_.at(process - 1).active.has_value();
}

bool Engine::any_pending(bool state_changing_only) const {
  return state_changing_only ? pending_state_changing_ > 0 : pending_ops_ > 0;
}

bool Engine::predicate_holds(Predicate p) const {
  switch (p) {
    case Predicate::every_step: return true;
    case Predicate::state_quiescent: return pending_state_changing_ == 0;
    case Predicate::quiescent: return pending_ops_ == 0;
  }
  return false;
}

void Engine::finish_op(ProcRt& p, StepRecord& rec) {
  std::int64_t resp = p.active->result();  // rethrows operation errors
  OpInstance& inst = exec_.ops[p.active_op_id];
  inst.resp_step = rec.index;
  inst.resp = resp;
  rec.responded = true;
  rec.resp = resp;
  --pending_ops_;
  if (obj_.spec().state_changing(inst.op)) --pending_state_changing_;
  p.active.reset();
  p.active_op_id = -1;
}

void Engine::step(const Choice& c) {
  if (c.process < 1 || c.process > static_cast<int>(procs_.size()))
    throw mem::EngineError("schedule references unknown process");
  ProcRt& p = procs_[c.process - 1];

  StepRecord rec;
  rec.index = exec_.num_steps() + 1;
  rec.process = c.process;
  rec.side = c.side;

  if (!p.active) {
    if (p.next_op >= p.program.size())
      throw mem::EngineError("scheduled process has no runnable step");
    if (c.side != Side::main)
      throw mem::EngineError("operation invocation must run on the main strand");
    seq::Op op = p.program[p.next_op++];
    OpInstance inst;
    inst.id = static_cast<int>(exec_.ops.size());
    inst.process = c.process;
    inst.op = op;
    inst.inv_step = rec.index;
    exec_.ops.push_back(inst);
    p.active_op_id = inst.id;
    rec.invoked = true;
    rec.op_id = inst.id;
    ++pending_ops_;
    if (obj_.spec().state_changing(op)) ++pending_state_changing_;

    p.active.emplace(obj_.run_op(p.ctx, op));
    p.ctx.cur = Side::main;
    p.active->start();
    if (p.active->done()) {
      // No shared access needed; the op completes on its invoking step.
      exec_.ops[rec.op_id].own_steps = 1;
      finish_op(p, rec);
      p.last_side = Side::main;
      p.streak = 0;
      exec_.steps.push_back(rec);
      return;
    }
    if (p.ctx.in_section && !p.ctx.has_pending(Side::main)) {
      // The op's first suspension forked an interleaved block; the invoking
      // step carries no access and the strands become schedulable.
      exec_.ops[rec.op_id].own_steps = 1;
      p.last_side = Side::main;
      p.streak = 0;
      exec_.steps.push_back(rec);
      return;
    }
  }

  rec.op_id = p.active_op_id;
  if (!p.ctx.has_pending(c.side))
    throw mem::EngineError("scheduled strand has no runnable step");
  PendingStep st = p.ctx.take_pending(c.side);
  rec.has_access = true;
  rec.acc = st.acc;
  rec.label = st.label;

  mem::AccessOutcome out = mem_.perform(st.acc);
  *st.out = out;
  rec.out = out;
  mem::ObjState& cell = current_[st.acc.obj.index];
  switch (st.acc.kind) {
    case mem::AccessKind::read: break;
    case mem::AccessKind::write: cell.w = st.acc.arg0; break;
    case mem::AccessKind::cas:
      if (out.ok) cell.w = st.acc.arg1;
      break;
  }
  rec.after = cell.w;

  exec_.ops[p.active_op_id].own_steps++;
  p.ctx.cur = c.side;
  st.k.resume();

  if (p.active->done()) finish_op(p, rec);

  if (p.ctx.in_section && c.side == p.last_side)
    ++p.streak;
  else
    p.streak = 1;
  p.last_side = c.side;
  if (!p.ctx.in_section) p.streak = 0;

  exec_.steps.push_back(rec);
}

void Engine::mark_snapshot() {
  exec_.markers.emplace_back(exec_.num_steps(), current_);
}

Execution run(AlgorithmObject& obj, mem::Memory& m,
              std::vector<std::vector<seq::Op>> programs, const Schedule& s,
              int section_fair_cap) {
  Engine e(obj, m, std::move(programs), section_fair_cap);
  for (const ScheduleEntry& entry : s) {
    if (entry.marker)
      e.mark_snapshot();
    else
      e.step(entry.c);
  }
  return e.execution();
}

}  // namespace hi
