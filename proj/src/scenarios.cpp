#include "hi/scenarios.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "hi/checker.hpp"
#include "hi/explorer.hpp"
#include "hi/hi_check.hpp"
#include "hi/native.hpp"
#include "hi/registers.hpp"
#include "hi/rllsc.hpp"
#include "hi/trace_io.hpp"
#include "hi/universal.hpp"

namespace hi::sc {

namespace {

std::pair<std::string, std::string> split_head(const std::string& d) {
  auto pos = d.find(':');
  if (pos == std::string::npos) return {d, ""};
  return {d.substr(0, pos), d.substr(pos + 1)};
}

std::map<std::string, std::string> parse_fields(const std::string& body,
                                                char sep) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i < body.size()) {
    std::size_t end = body.find(sep, i);
    if (end == std::string::npos) end = body.size();
    std::string item = body.substr(i, end - i);
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw mem::EngineError("bad descriptor field '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
    i = end + 1;
  }
  return out;
}

int field_int(const std::map<std::string, std::string>& f, const std::string& k,
              int dflt) {
  auto it = f.find(k);
  if (it == f.end()) return dflt;
  try {
    std::size_t used = 0;
    int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw mem::EngineError("bad integer value for descriptor field '" + k +
                           "'");
  }
}

void expect_keys(const std::map<std::string, std::string>& f,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : f) {
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) ok = true;
    if (!ok) throw mem::EngineError("unknown descriptor field '" + k + "'");
  }
}

// Accumulates pass/fail lines into a ScenarioResult.
class Report {
 public:
  explicit Report(ScenarioResult& r) : r_(r) { r_.ok = true; }

  void line(const std::string& s) {
    if (!r_.detail.empty()) r_.detail += '\n';
    r_.detail += s;
  }
  void verdict(const std::string& label, chk::Verdict want, chk::Verdict got,
               const std::string& note = "") {
    std::string s = label + ": expected " + chk::verdict_name(want) + ", got " +
                    chk::verdict_name(got);
    if (!note.empty()) s += " (" + note + ")";
    line(s);
    if (want != got) r_.ok = false;
  }
  void require(const std::string& label, bool cond,
               const std::string& note = "") {
    std::string s = label + ": " + (cond ? "ok" : "FAILED");
    if (!note.empty()) s += " (" + note + ")";
    line(s);
    if (!cond) r_.ok = false;
  }

 private:
  ScenarioResult& r_;
};

xpl::Bounds bounds_for(const RunOptions& opt, xpl::Bounds base) {
  if (opt.max_steps) base.max_steps = *opt.max_steps;
  if (opt.max_preemptions) base.max_preemptions = *opt.max_preemptions;
  if (opt.max_executions) base.max_executions = *opt.max_executions;
  return base;
}

void dump_execution(const RunOptions& opt, const AlgorithmObject& obj,
                    const std::string& descriptor,
                    const xpl::ProgramSet& programs, const Execution& e,
                    Report& rep) {
  if (opt.trace_path.empty()) return;
  tio::write_trace_file(opt.trace_path,
                        tio::make_trace(obj, descriptor, programs, e));
  rep.line("trace written to " + opt.trace_path);
}

std::string stat_note(const xpl::Result& r) {
  std::ostringstream os;
  os << r.stats.executions << " executions, " << r.stats.obs_points
     << " observation points";
  if (r.stats.truncated) os << ", " << r.stats.truncated << " truncated";
  if (r.stats.lin_unknown) os << ", " << r.stats.lin_unknown << " undecided";
  if (r.witness) os << "; witness: " << r.witness->what;
  return os.str();
}

// One bounded exploration with an expected verdict.
struct ExpRun {
  std::string label;
  std::string descriptor;
  xpl::ProgramSet programs;
  Predicate at = Predicate::quiescent;
  chk::HiMode mode = chk::HiMode::analytic;
  chk::Verdict want = chk::Verdict::yes;
  xpl::Bounds bounds{};
  std::function<std::optional<std::string>(const Execution&)> finish;
};

xpl::Result run_exploration(const ExpRun& run, const RunOptions& opt,
                            Report& rep, ScenarioResult& r) {
  auto obj = object_from_descriptor(run.descriptor);
  chk::HiChecker hi(*obj, run.mode);
  xpl::Checks checks;
  checks.hi = &hi;
  checks.observe_at = run.at;
  checks.finish_check = run.finish;
  xpl::Result res =
      xpl::explore(*obj, run.programs, bounds_for(opt, run.bounds), checks);
  rep.verdict(run.label, run.want, res.verdict, stat_note(res));
  r.executions += res.stats.executions;
  if (res.witness && run.want == chk::Verdict::no)
    dump_execution(opt, *obj, run.descriptor, run.programs,
                   res.witness->execution, rep);
  return res;
}

int cell_distance(const mem::MemorySnapshot& a, const mem::MemorySnapshot& b) {
  if (a.size() != b.size()) throw mem::EngineError("layout size mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) ++d;
  return d;
}

// Largest per-operation canonical-memory distance over the whole state space.
int max_step_distance(const AlgorithmObject& obj) {
  const seq::SequentialSpec& spec = obj.spec();
  auto states = spec.enumerate_states();
  if (!states) throw mem::EngineError("state space not enumerable");
  int mx = 0;
  for (std::uint64_t q : *states) {
    auto from = obj.canonical(q);
    if (!from) throw mem::EngineError("object has no canonical layout");
    for (const seq::Op& op : spec.op_universe(obj.num_procs())) {
      seq::Applied next = spec.apply(q, op);
      auto to = obj.canonical(next.state);
      if (!to) throw mem::EngineError("object has no canonical layout");
      mx = std::max(mx, cell_distance(*from, *to));
    }
  }
  return mx;
}

seq::Op W(int v) { return seq::reg_op::make_write(v); }
seq::Op R() { return seq::reg_op::make_read(); }

// A full write prefixed by a flag/help probe has a fixed shape here: the
// schedule below interleaves one reader with four writes so that both A-scans
// of the read miss every set cell and the read must fall back to the helped
// value. Derived by stepping the helping register's access sequence by hand.
ScenarioResult s_alg4_bread(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "alg4_bread";
  r.claim =
      "a read overlapped by writes finishes via helping, returns the value "
      "held at its start, and memory is canonical afterwards";
  Report rep(r);

  auto obj = object_from_descriptor("alg4:K=3,v0=1");
  xpl::ProgramSet programs = {{W(2), W(1), W(2), W(1)}, {R()}};

  Schedule s;
  auto w_steps = [&s](int k) {
    for (int i = 0; i < k; ++i) s.push_back(step_of(1));
  };
  auto r_steps = [&s](int k) {
    for (int i = 0; i < k; ++i) s.push_back(step_of(2));
  };
  r_steps(1);   // raise flag[1]
  w_steps(10);  // W(2): probe B, see the flag, help with value 1, move the bit
  r_steps(1);   // scan A[1], miss
  w_steps(4);   // W(1): bit moves below the scan front
  r_steps(2);   // scan A[2], A[3], miss twice; first scan fails
  w_steps(4);   // W(2): bit moves back up
  r_steps(1);   // scan A[1], miss
  w_steps(4);   // W(1)
  r_steps(11);  // scan A[2], A[3]; B-scan finds the help; clean up

  mem::EngineMemory m;
  obj->allocate(m);
  m.seal();
  Execution e = run(*obj, m, programs, s);

  rep.require("schedule ran to completion", e.num_steps() == 38,
              std::to_string(e.num_steps()) + " steps");
  r.executions = 1;

  const OpInstance* read = nullptr;
  std::vector<int> write_steps;
  for (const OpInstance& o : e.ops) {
    if (o.process == 2) read = &o;
    else write_steps.push_back(o.own_steps);
  }
  rep.require("read completed with the helped value",
              read && read->resp_step == 38 && read->resp == 1);
  rep.require("read used exactly its helped-path step count",
              read && read->own_steps == 16,
              read ? std::to_string(read->own_steps) + " steps" : "missing");
  rep.require("helping write paid the extra probe steps",
              write_steps == std::vector<int>{10, 4, 4, 4});

  int helps = 0, unhelps = 0, bscans = 0;
  for (const StepRecord& st : e.steps) {
    std::string l = st.label;
    if (l == "help") ++helps;
    if (l == "unhelp") ++unhelps;
    if (l == "bscan") ++bscans;
  }
  rep.require("exactly one help write, never undone",
              helps == 1 && unhelps == 0);
  rep.require("read fell back to the help cells", bscans == 3);

  chk::LinResult lin = chk::check_linearizable(obj->spec(), e);
  rep.verdict("linearizability", chk::Verdict::yes, lin.verdict);

  auto canon = obj->canonical(1);
  rep.require("final memory is canonical for the last written value",
              canon && e.snapshot_at(e.num_steps()) == *canon);

  dump_execution(opt, *obj, "alg4:K=3,v0=1", programs, e, rep);
  return r;
}

ScenarioResult s_alg2_starvation(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "alg2_starvation";
  r.claim =
      "a reader can be starved forever by alternating writes while every "
      "write completes in its fixed step count";
  Report rep(r);

  auto obj = object_from_descriptor("alg2:K=3,v0=2");
  const int cycles = 334;
  xpl::ProgramSet programs(2);
  for (int i = 0; i < cycles; ++i) {
    programs[0].push_back(W(1));
    programs[0].push_back(W(2));
  }
  programs[1] = {R()};

  // Writes hold the set cell one position behind the reader's scan front, so
  // every scan sees only zeroes and the read never returns.
  Schedule s;
  s.push_back(step_of(2));  // scan A[1] while the cell sits at 2
  for (int i = 0; i < cycles; ++i) {
    for (int k = 0; k < 3; ++k) s.push_back(step_of(1));  // W(1)
    s.push_back(step_of(2));                              // scan A[2], miss
    for (int k = 0; k < 3; ++k) s.push_back(step_of(1));  // W(2)
    s.push_back(step_of(2));  // scan A[3], miss; scan fails
    s.push_back(step_of(2));  // next scan A[1], miss
  }

  mem::EngineMemory m;
  obj->allocate(m);
  m.seal();
  Execution e = run(*obj, m, programs, s);

  rep.require("schedule ran to completion", e.num_steps() == 3007,
              std::to_string(e.num_steps()) + " steps");
  r.executions = 1;

  const OpInstance* read = nullptr;
  int writes_done = 0;
  bool writes_ordered = true;
  int next_resp = 0;
  for (const OpInstance& o : e.ops) {
    if (o.process == 2) {
      read = &o;
      continue;
    }
    if (o.resp_step >= 0) {
      ++writes_done;
      if (o.resp != seq::kAck) writes_ordered = false;
      if (o.resp_step < next_resp) writes_ordered = false;
      next_resp = o.resp_step;
    }
  }
  rep.require("every write completed in order and acknowledged",
              writes_done == 2 * cycles && writes_ordered);
  rep.require("the read is still pending", read && read->resp_step < 0);
  rep.require("the read took over a thousand steps",
              read && read->own_steps == 1003,
              read ? std::to_string(read->own_steps) + " steps" : "missing");

  bool all_miss = true;
  for (const StepRecord& st : e.steps)
    if (st.process == 2 && st.out.value.val != 0) all_miss = false;
  rep.require("every reader scan step saw a cleared cell", all_miss);

  // Too many operations for the linearizability search; fold the completed
  // writes through the sequential object instead.
  std::vector<std::pair<seq::Op, std::int64_t>> hist;
  for (const auto& done : e.completed_in_order()) hist.push_back(done);
  std::uint64_t q = seq::seq_state(obj->spec(), hist);
  rep.require("completed writes form a legal sequential history", q == 2,
              "final state " + std::to_string(q));

  auto canon = obj->canonical(q);
  rep.require("final memory is canonical for the last written value",
              canon && e.snapshot_at(e.num_steps()) == *canon);

  dump_execution(opt, *obj, "alg2:K=3,v0=2", programs, e, rep);
  return r;
}

std::vector<std::uint64_t> cell_vals(const mem::MemorySnapshot& s) {
  std::vector<std::uint64_t> out;
  for (const mem::ObjState& c : s) out.push_back(c.w.val);
  return out;
}

ScenarioResult s_alg1_counterexample(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "alg1_counterexample";
  r.claim =
      "writing 2 then 1 over the set-and-clear-down register leaves the "
      "stale upper cell set, so state 1 shows [1,1,0] against the initial "
      "[1,0,0] even at quiescence";
  Report rep(r);

  auto obj = object_from_descriptor("alg1:K=3,v0=1");
  xpl::ProgramSet programs = {{W(2), W(1)}, {R()}};
  chk::HiChecker hi(*obj, chk::HiMode::learned);
  xpl::Checks checks;
  checks.hi = &hi;
  checks.observe_at = Predicate::quiescent;
  xpl::Result res = xpl::explore(*obj, programs, bounds_for(opt, {}), checks);
  r.executions = res.stats.executions;
  rep.verdict("quiescent history-independence", chk::Verdict::no, res.verdict,
              stat_note(res));
  rep.require("violation carries a witness execution", res.witness.has_value());
  if (hi.violation()) {
    const chk::HiViolation& v = *hi.violation();
    rep.require("the two quiescent snapshots are exactly [1,0,0] and [1,1,0]",
                v.expected &&
                    cell_vals(*v.expected) ==
                        std::vector<std::uint64_t>{1, 0, 0} &&
                    cell_vals(v.snapshot) == std::vector<std::uint64_t>{1, 1, 0});
  } else {
    rep.require("checker holds the violation", false);
  }
  if (res.witness)
    dump_execution(opt, *obj, "alg1:K=3,v0=1", programs,
                   res.witness->execution, rep);
  return r;
}

ScenarioResult s_alg2_exhaustive(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "alg2_exhaustive";
  r.claim =
      "the clear-both-ways register is history-independent at points without "
      "pending writes, but not at every step";
  Report rep(r);

  ExpRun a;
  a.label = "state-quiescent history-independence, two writes vs one read";
  a.descriptor = "alg2:K=3,v0=1";
  a.programs = {{W(2), W(3)}, {R()}};
  a.at = Predicate::state_quiescent;
  a.want = chk::Verdict::yes;
  run_exploration(a, opt, rep, r);

  ExpRun b = a;
  b.label = "state-quiescent history-independence, longer programs";
  b.programs = {{W(2), W(3), W(1)}, {R(), R()}};
  run_exploration(b, opt, rep, r);

  ExpRun c = a;
  c.label = "every-step history-independence";
  c.at = Predicate::every_step;
  c.want = chk::Verdict::no;
  run_exploration(c, opt, rep, r);
  return r;
}

ScenarioResult s_alg4_exhaustive(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "alg4_exhaustive";
  r.claim =
      "the helping register is history-independent at quiescence but a "
      "pending read's raised flag already breaks state-quiescent "
      "independence";
  Report rep(r);

  const int K = 3;
  auto step_bounds = [K](const Execution& e) -> std::optional<std::string> {
    for (const OpInstance& o : e.ops) {
      int cap = o.op.code == seq::reg_op::read
                    ? regs::HelpingRegister::read_step_bound(K)
                    : regs::HelpingRegister::write_step_bound(K);
      if (o.own_steps > cap)
        return "op " + std::to_string(o.id) + " took " +
               std::to_string(o.own_steps) + " steps, bound " +
               std::to_string(cap);
    }
    return std::nullopt;
  };

  ExpRun a;
  a.label = "quiescent history-independence and per-op step bounds";
  a.descriptor = "alg4:K=3,v0=1";
  a.programs = {{W(2), W(3)}, {R()}};
  a.at = Predicate::quiescent;
  a.want = chk::Verdict::yes;
  a.finish = step_bounds;
  run_exploration(a, opt, rep, r);

  ExpRun b = a;
  b.label = "state-quiescent history-independence";
  b.at = Predicate::state_quiescent;
  b.want = chk::Verdict::no;
  b.finish = {};
  run_exploration(b, opt, rep, r);
  return r;
}

ScenarioResult s_maxreg_exhaustive(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "maxreg_exhaustive";
  r.claim =
      "the max-register is history-independent at points without pending "
      "writes and suppressed writes touch no shared memory";
  Report rep(r);

  auto suppressed_silent = [](const Execution& e) -> std::optional<std::string> {
    for (const OpInstance& o : e.ops) {
      if (o.op.code != seq::reg_op::write || o.op.arg != 1) continue;
      if (o.resp_step < 0) return "suppressed write did not complete";
      if (e.steps[static_cast<std::size_t>(o.inv_step) - 1].has_access)
        return "suppressed write touched shared memory";
    }
    return std::nullopt;
  };

  ExpRun a;
  a.label = "state-quiescent history-independence";
  a.descriptor = "maxreg:K=3,v0=1";
  a.programs = {{W(2), W(1), W(3)}, {R(), R()}};
  a.at = Predicate::state_quiescent;
  a.want = chk::Verdict::yes;
  a.finish = suppressed_silent;
  run_exploration(a, opt, rep, r);

  ExpRun b = a;
  b.label = "every-step history-independence";
  b.at = Predicate::every_step;
  b.want = chk::Verdict::no;
  run_exploration(b, opt, rep, r);
  return r;
}

ScenarioResult s_hiset_exhaustive(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "hiset_exhaustive";
  r.claim =
      "the bit-per-element set is history-independent at every step of every "
      "interleaving";
  Report rep(r);
  ExpRun run;
  run.label = "every-step history-independence";
  run.descriptor = "hiset:t=3,procs=2";
  run.programs = {{seq::set_op::make_insert(1), seq::set_op::make_remove(2),
                   seq::set_op::make_insert(3)},
                  {seq::set_op::make_insert(2), seq::set_op::make_lookup(1),
                   seq::set_op::make_remove(3)}};
  run.at = Predicate::every_step;
  run.want = chk::Verdict::yes;
  run_exploration(run, opt, rep, r);
  return r;
}

ScenarioResult s_hi_set_distance(const RunOptions&) {
  ScenarioResult r;
  r.name = "hi_set_distance";
  r.claim =
      "one operation moves the set's canonical memory by at most one cell, "
      "while a one-hot register must always move two";
  Report rep(r);

  auto set = object_from_descriptor("hiset:t=6,procs=2");
  int ds = max_step_distance(*set);
  rep.require("set updates touch at most one cell", ds == 1,
              "max distance " + std::to_string(ds));

  auto reg = object_from_descriptor("alg2:K=6,v0=1");
  int dr = max_step_distance(*reg);
  rep.require("one-hot register updates move two cells", dr == 2,
              "max distance " + std::to_string(dr));
  r.executions = 0;
  return r;
}

ScenarioResult s_table1_matrix(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "table1_matrix";
  r.claim =
      "per-object classification under the three observation predicates "
      "matches the expected matrix";
  Report rep(r);

  struct Row {
    const char* tag;
    std::string descriptor;
    xpl::ProgramSet programs;
    chk::HiMode mode;
    chk::Verdict want[3];  // every_step, state_quiescent, quiescent
  };
  using V = chk::Verdict;
  std::vector<Row> rows = {
      {"alg1", "alg1:K=2,v0=1", {{W(2), W(1)}, {R()}},
       chk::HiMode::learned, {V::no, V::no, V::no}},
      {"alg2", "alg2:K=2,v0=1", {{W(2)}, {R()}},
       chk::HiMode::analytic, {V::no, V::yes, V::yes}},
      {"alg4", "alg4:K=2,v0=1", {{W(2)}, {R()}},
       chk::HiMode::analytic, {V::no, V::no, V::yes}},
      {"maxreg", "maxreg:K=2,v0=1", {{W(2)}, {R()}},
       chk::HiMode::analytic, {V::no, V::yes, V::yes}},
      {"hiset", "hiset:t=2,procs=2",
       {{seq::set_op::make_insert(2)}, {seq::set_op::make_remove(2)}},
       chk::HiMode::analytic, {V::yes, V::yes, V::yes}},
  };
  const Predicate preds[3] = {Predicate::every_step, Predicate::state_quiescent,
                              Predicate::quiescent};
  const char* pred_names[3] = {"every step", "no pending writes",
                               "no pending ops"};

  for (const Row& row : rows) {
    for (int i = 0; i < 3; ++i) {
      ExpRun run;
      run.label = std::string(row.tag) + " / " + pred_names[i];
      run.descriptor = row.descriptor;
      run.programs = row.programs;
      run.at = preds[i];
      run.mode = row.mode;
      run.want = row.want[i];
      run.bounds.max_preemptions = 4;
      run_exploration(run, opt, rep, r);
    }
  }
  return r;
}

// Checks every shared-memory transition of an execution against the
// sequential load-link/store-conditional contract, one access at a time.
std::optional<std::string> rllsc_word_oracle(const Execution& e) {
  if (e.initial.size() != 1) return "expected a single shared cell";
  mem::CasWord w = e.initial[0].w;
  auto fail = [](const StepRecord& st, const std::string& msg) {
    return "step " + std::to_string(st.index) + " (" + st.label + "): " + msg;
  };
  for (const StepRecord& st : e.steps) {
    if (!st.has_access) return fail(st, "step without a shared access");
    const mem::CasWord before = w;
    const std::uint64_t bit = std::uint64_t{1} << (st.process - 1);
    const std::string label = st.label;

    if (st.acc.kind == mem::AccessKind::read) {
      if (!(st.out.value == before)) return fail(st, "read saw a stale word");
      if (!(st.after == before)) return fail(st, "read changed the cell");
    } else if (st.acc.kind == mem::AccessKind::cas) {
      if (!(st.out.value == before)) return fail(st, "cas saw a stale word");
      if (st.out.ok != (st.acc.arg0 == before))
        return fail(st, "cas success flag is wrong");
      if (st.out.ok && !(st.after == st.acc.arg1))
        return fail(st, "successful cas installed the wrong word");
      if (!st.out.ok && !(st.after == before))
        return fail(st, "failed cas changed the cell");
    } else {
      if (!(st.after == st.acc.arg0))
        return fail(st, "write installed the wrong word");
    }

    bool cas_ok = st.acc.kind == mem::AccessKind::cas && st.out.ok;
    if (label == "ll") {
      if (cas_ok &&
          !(st.after.val == before.val &&
            st.after.context == (before.context | bit)))
        return fail(st, "link must only raise the caller's context bit");
    } else if (label == "vl" || label == "load") {
      if (st.acc.kind != mem::AccessKind::read)
        return fail(st, "validate and load may only read");
    } else if (label == "sc") {
      if (cas_ok && st.after.context != 0)
        return fail(st, "store-conditional must clear the whole context");
    } else if (label == "rl") {
      if (cas_ok && !(st.after.val == before.val &&
                      st.after.context == (before.context & ~bit)))
        return fail(st, "release must only clear the caller's context bit");
    } else if (label == "store") {
      if (st.after.context != 0) return fail(st, "store must clear the context");
    } else {
      return fail(st, "unexpected step label");
    }

    if (st.responded) {
      const OpInstance& o = e.ops[static_cast<std::size_t>(st.op_id)];
      switch (o.op.code) {
        case seq::llsc_op::ll:
          if (!cas_ok) return fail(st, "link must respond at its linking cas");
          if (o.resp != static_cast<std::int64_t>(before.val))
            return fail(st, "link returned a value it never saw");
          break;
        case seq::llsc_op::vl:
          if (o.resp != ((before.context & bit) ? 1 : 0))
            return fail(st, "validate disagrees with the context bit");
          break;
        case seq::llsc_op::sc:
          if (o.resp == 1 && !cas_ok)
            return fail(st, "successful sc must respond at its cas");
          if (o.resp == 0 && (st.out.value.context & bit))
            return fail(st, "sc failed while its link was still held");
          if (o.resp != 0 && o.resp != 1) return fail(st, "sc response range");
          break;
        case seq::llsc_op::rl:
          if (o.resp != 1) return fail(st, "release must acknowledge");
          break;
        case seq::llsc_op::load:
          if (o.resp != static_cast<std::int64_t>(before.val))
            return fail(st, "load returned a value it never saw");
          break;
        case seq::llsc_op::store:
          if (o.resp != 1) return fail(st, "store must acknowledge");
          break;
        default:
          return fail(st, "unknown operation code");
      }
    }
    w = st.after;
  }
  return std::nullopt;
}

ScenarioResult s_rllsc_oracle_equiv(const RunOptions& opt) {
  ScenarioResult r;
  r.name = "rllsc_oracle_equiv";
  r.claim =
      "every interleaving of the releasable-link cell is linearizable, "
      "history-independent at every step, matches the word-transition "
      "contract, and keeps each primitive within a small step bound";
  Report rep(r);

  std::map<int, int> max_steps;
  auto oracle = [&max_steps](const Execution& e) -> std::optional<std::string> {
    if (auto bad = rllsc_word_oracle(e)) return bad;
    for (const OpInstance& o : e.ops) {
      if (o.resp_step < 0) return "an operation failed to complete";
      int& mx = max_steps[o.op.code];
      mx = std::max(mx, o.own_steps);
    }
    return std::nullopt;
  };

  namespace lo = seq::llsc_op;
  struct Mix {
    const char* label;
    const char* descriptor;
    xpl::ProgramSet programs;
  };
  const char* two = "rllsc:n=2,vmax=3,v0=0";
  std::vector<Mix> mixes = {
      {"contended link and store-conditional", two,
       {{lo::make_ll(1), lo::make_sc(1, 2)},
        {lo::make_ll(2), lo::make_sc(2, 3)}}},
      {"release and validate against store and load", two,
       {{lo::make_ll(1), lo::make_rl(1), lo::make_vl(1)},
        {lo::make_store(2), lo::make_load()}}},
      {"store-conditional against unlinked peers", two,
       {{lo::make_ll(1), lo::make_sc(1, 1)}, {lo::make_load(), lo::make_rl(2)}}},
      {"double link with a failing second sc", two,
       {{lo::make_ll(1), lo::make_sc(1, 2), lo::make_sc(1, 3)},
        {lo::make_vl(2), lo::make_ll(2)}}},
      {"three processes racing on one cell", "rllsc:n=3,vmax=3,v0=0",
       {{lo::make_ll(1), lo::make_sc(1, 2)},
        {lo::make_ll(2), lo::make_rl(2)},
        {lo::make_store(3), lo::make_vl(3)}}},
  };

  std::uint64_t truncated = 0;
  for (const Mix& mix : mixes) {
    ExpRun run;
    run.label = mix.label;
    run.descriptor = mix.descriptor;
    run.programs = mix.programs;
    run.at = Predicate::every_step;
    run.want = chk::Verdict::yes;
    run.finish = oracle;
    xpl::Result res = run_exploration(run, opt, rep, r);
    truncated += res.stats.truncated;
  }
  rep.require("no execution was cut off", truncated == 0);

  auto bound = [&](const char* what, int code, int want) {
    auto it = max_steps.find(code);
    rep.require(std::string(what) + " stays within its step bound",
                it != max_steps.end() && it->second <= want,
                it == max_steps.end()
                    ? "never exercised"
                    : "worst case " + std::to_string(it->second) + " of " +
                          std::to_string(want));
  };
  // Exhaustively measured worst cases over the mixes above; the cas retry
  // loops grow by one defeat per extra rival, never with history length.
  bound("link", lo::ll, 5);
  bound("validate", lo::vl, 1);
  bound("store-conditional", lo::sc, 4);
  bound("release", lo::rl, 3);
  bound("load", lo::load, 1);
  bound("store", lo::store, 1);
  return r;
}

xpl::ProgramSet universal_programs(const seq::SequentialSpec& spec) {
  std::vector<seq::Op> changers, readers;
  for (const seq::Op& op : spec.op_universe(2)) {
    if (op.proc != 0) continue;
    (spec.state_changing(op) ? changers : readers).push_back(op);
  }
  if (changers.empty() || readers.empty())
    throw mem::EngineError(
        "universal scenario needs an untagged state-changing and read-only "
        "operation");
  seq::Op second = changers.size() > 1 ? changers[1] : changers[0];
  return {{changers[0]}, {second, readers[0]}};
}

ScenarioResult s_universal_quiescent(const std::string& spec_desc,
                                     const RunOptions& opt) {
  ScenarioResult r;
  r.name = "universal_quiescent:spec=" + spec_desc;
  r.claim =
      "with fast reads the construction's memory is canonical whenever no "
      "state-changing operation is pending; applying reads through the full "
      "protocol keeps quiescent independence but loses the state-quiescent "
      "form";
  Report rep(r);

  seq::SpecPtr spec = seq::make_spec(spec_desc);
  xpl::ProgramSet programs = universal_programs(*spec);
  // The audit decodes head and announce cells by their allocated ids, so it
  // needs an object with a laid-out memory; one decoder is shared per run.
  // Its transition chain is the order the construction applied the ops in, so
  // passing it plus landing the head on the chain's final state pins the
  // final memory to a real linearization of the completed operations.
  auto audited = [](const std::string& desc) {
    std::shared_ptr<AlgorithmObject> fresh(object_from_descriptor(desc));
    auto layout = std::make_shared<mem::EngineMemory>();
    fresh->allocate(*layout);
    layout->seal();
    return [fresh, layout](const Execution& e) -> std::optional<std::string> {
      uni::UniversalAudit a =
          uni::audit_universal(static_cast<const uni::Universal&>(*fresh), e);
      if (!a.ok) return a.detail;
      uni::HeadView head = uni::head_state(e.snapshot_at(e.num_steps()));
      if (head.has_r) return "head still carries a pending response";
      if (head.q != a.final_q)
        return "head state " + std::to_string(head.q) +
               " differs from the audited transition chain's final state " +
               std::to_string(a.final_q);
      return std::nullopt;
    };
  };

  std::string fast = "universal:procs=2;fast=1;spec=" + spec_desc;
  std::string slow = "universal:procs=2;fast=0;spec=" + spec_desc;

  ExpRun a;
  a.label = "fast reads / no pending writes";
  a.descriptor = fast;
  a.programs = programs;
  a.at = Predicate::state_quiescent;
  a.want = chk::Verdict::yes;
  a.bounds.max_preemptions = 2;
  a.finish = audited(fast);
  run_exploration(a, opt, rep, r);

  ExpRun b;
  b.label = "applied reads / no pending ops";
  b.descriptor = slow;
  b.programs = programs;
  b.at = Predicate::quiescent;
  b.want = chk::Verdict::yes;
  b.bounds.max_preemptions = 2;
  b.finish = audited(slow);
  run_exploration(b, opt, rep, r);

  ExpRun c = b;
  c.label = "applied reads / no pending writes";
  c.at = Predicate::state_quiescent;
  c.want = chk::Verdict::no;
  run_exploration(c, opt, rep, r);

  // Same checks with a third process in the race.
  xpl::ProgramSet wide = programs;
  wide.push_back({programs[1][1]});
  std::string fast3 = "universal:procs=3;fast=1;spec=" + spec_desc;
  ExpRun d;
  d.label = "three processes / no pending writes";
  d.descriptor = fast3;
  d.programs = wide;
  d.at = Predicate::state_quiescent;
  d.want = chk::Verdict::yes;
  d.bounds.max_preemptions = 1;
  d.finish = audited(fast3);
  run_exploration(d, opt, rep, r);
  return r;
}

ScenarioResult s_universal_native_stress(const RunOptions&) {
  ScenarioResult r;
  r.name = "universal_native_stress";
  r.claim =
      "four os threads pushing ten thousand operations through the "
      "construction agree with the operation balance and leave canonical "
      "memory";
  Report rep(r);

  auto obj =
      object_from_descriptor("universal:procs=4;fast=1;spec=counter:cap=128");
  namespace co = seq::ctr_op;
  std::vector<std::vector<seq::Op>> programs(4);
  for (int i = 0; i < 2500; ++i) programs[0].push_back(co::make_inc());
  for (int i = 0; i < 1250; ++i) {
    programs[1].push_back(co::make_inc());
    programs[1].push_back(co::make_dec());
  }
  for (int i = 0; i < 2500; ++i) programs[2].push_back(co::make_dec());
  for (int i = 0; i < 1300; ++i) programs[3].push_back(co::make_inc());
  for (int i = 0; i < 1200; ++i) programs[3].push_back(co::make_dec());

  nat::NativeRun run = nat::run_native(*obj, programs);
  rep.require("all operations completed", run.ops == 10000,
              std::to_string(run.ops) + " completed");

  bool acked = true;
  for (const auto& per_proc : run.responses)
    for (const auto& [op, resp] : per_proc)
      if (resp != seq::kAck) acked = false;
  rep.require("every operation acknowledged", acked);

  // 5050 increments and 4950 decrements from a zero start.
  uni::HeadView head = uni::head_state(run.final_memory);
  rep.require("head settled on the operation balance",
              !head.has_r && head.q == 100,
              "state " + std::to_string(head.q));
  auto canon = obj->canonical(100);
  rep.require("final memory is canonical", canon && run.final_memory == *canon);
  r.executions = 1;
  return r;
}

using ScenarioFn = ScenarioResult (*)(const RunOptions&);

struct Entry {
  const char* name;
  ScenarioFn fn;
};

const Entry kEntries[] = {
    {"alg1_counterexample", s_alg1_counterexample},
    {"alg2_exhaustive", s_alg2_exhaustive},
    {"alg2_starvation", s_alg2_starvation},
    {"alg4_bread", s_alg4_bread},
    {"alg4_exhaustive", s_alg4_exhaustive},
    {"maxreg_exhaustive", s_maxreg_exhaustive},
    {"hiset_exhaustive", s_hiset_exhaustive},
    {"hi_set_distance", s_hi_set_distance},
    {"table1_matrix", s_table1_matrix},
    {"rllsc_oracle_equiv", s_rllsc_oracle_equiv},
    {"universal_native_stress", s_universal_native_stress},
};

constexpr const char* kUniversalPrefix = "universal_quiescent:";
constexpr const char* kDefaultUniversal = "universal_quiescent:spec=counter:cap=4";

std::optional<std::string> universal_spec_of(const std::string& name) {
  std::string prefix = kUniversalPrefix;
  if (name.rfind(prefix, 0) != 0) return std::nullopt;
  std::string rest = name.substr(prefix.size());
  if (rest.rfind("spec=", 0) != 0) return std::nullopt;
  return rest.substr(5);
}

}  // namespace

std::unique_ptr<AlgorithmObject> object_from_descriptor(const std::string& d) {
  auto [head, body] = split_head(d);
  if (head == "universal") {
    auto f = parse_fields(body, ';');
    expect_keys(f, {"procs", "fast", "spec"});
    auto it = f.find("spec");
    if (it == f.end())
      throw mem::EngineError("universal descriptor needs a spec field");
    return uni::make_universal(seq::make_spec(it->second),
                               field_int(f, "procs", 2),
                               field_int(f, "fast", 1) == 0);
  }
  auto f = parse_fields(body, ',');
  if (head == "alg1" || head == "alg2" || head == "alg4" || head == "maxreg") {
    expect_keys(f, {"K", "v0"});
    int K = field_int(f, "K", 3);
    int v0 = field_int(f, "v0", 1);
    if (head == "alg1") return regs::make_baseline_register(K, v0);
    if (head == "alg2") return regs::make_lockfree_register(K, v0);
    if (head == "alg4") return regs::make_helping_register(K, v0);
    return regs::make_max_register(K, v0);
  }
  if (head == "hiset") {
    expect_keys(f, {"t", "procs"});
    return regs::make_bit_set(field_int(f, "t", 3), field_int(f, "procs", 2));
  }
  if (head == "rllsc") {
    expect_keys(f, {"n", "vmax", "v0"});
    return rllsc::make_rllsc(field_int(f, "n", 2),
                             static_cast<std::uint64_t>(field_int(f, "vmax", 3)),
                             static_cast<std::uint64_t>(field_int(f, "v0", 0)));
  }
  throw mem::EngineError("unknown object descriptor '" + d + "'");
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const Entry& e : kEntries) out.push_back(e.name);
  out.push_back(kDefaultUniversal);
  std::sort(out.begin(), out.end());
  return out;
}

bool scenario_exists(const std::string& name) {
  if (universal_spec_of(name)) return true;
  for (const Entry& e : kEntries)
    if (name == e.name) return true;
  return false;
}

ScenarioResult run_scenario(const std::string& name, const RunOptions& opt) {
  if (auto spec = universal_spec_of(name))
    return s_universal_quiescent(*spec, opt);
  for (const Entry& e : kEntries)
    if (name == e.name) return e.fn(opt);
  throw mem::EngineError("unknown scenario '" + name + "'");
}

ScenarioResult replay_file(const std::string& path) {
  ScenarioResult r;
  r.name = "replay:" + path;
  r.claim = "the recorded schedule reproduces the trace step for step";
  Report rep(r);
  tio::TraceDoc doc = tio::read_trace_file(path);
  auto obj = object_from_descriptor(doc.descriptor);
  tio::ReplayResult res = tio::replay_trace(doc, *obj);
  rep.require("replay matches the recording", res.ok, res.detail);
  r.executions = 1;
  return r;
}

}  // namespace hi::sc
