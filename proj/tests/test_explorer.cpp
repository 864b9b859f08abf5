#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hi/explorer.hpp"
#include "hi/hi_check.hpp"
#include "hi/registers.hpp"
#include "hi/trace_io.hpp"

using namespace hi;

namespace {

seq::Op W(int v) { return seq::reg_op::make_write(v); }
seq::Op R() { return seq::reg_op::make_read(); }

}  // namespace

TEST_CASE("exploration enumerates exactly the distinct schedules") {
  // One 2-step write against one read: the read resolves in a single step
  // unless it starts after the write finished, giving three interleavings.
  regs::LockFreeRegister obj(2, 1);
  xpl::Result r = xpl::explore(obj, {{W(2)}, {R()}}, {}, {});
  CHECK(r.verdict == chk::Verdict::yes);
  CHECK(r.stats.executions == 3);
  CHECK(r.stats.truncated == 0);

  // With no preemptions allowed only the initial choice branches.
  xpl::Bounds pinned;
  pinned.max_preemptions = 0;
  xpl::Result p = xpl::explore(obj, {{W(2)}, {R()}}, pinned, {});
  CHECK(p.verdict == chk::Verdict::yes);
  CHECK(p.stats.executions == 2);
}

TEST_CASE("an execution cap stops the search undecided") {
  regs::LockFreeRegister obj(2, 1);
  xpl::Bounds b;
  b.max_executions = 2;
  xpl::Result r = xpl::explore(obj, {{W(2)}, {R()}}, b, {});
  CHECK(r.verdict == chk::Verdict::unknown);
  CHECK(r.stats.stopped_early);
  CHECK(r.stats.executions == 2);
}

TEST_CASE("a step cap truncates executions and the verdict stays open") {
  regs::LockFreeRegister obj(2, 1);
  xpl::Bounds b;
  b.max_steps = 1;
  xpl::Result r = xpl::explore(obj, {{W(2)}, {R()}}, b, {});
  CHECK(r.verdict == chk::Verdict::unknown);
  CHECK(r.stats.truncated == r.stats.executions);
  CHECK(r.stats.truncated > 0);
}

TEST_CASE("a learned checker carries state between explorations") {
  regs::BaselineRegister obj(3, 1);

  chk::HiChecker shared(obj, chk::HiMode::learned);
  xpl::Checks checks;
  checks.hi = &shared;
  checks.observe_at = Predicate::quiescent;

  // First run learns state 2 as the memory left by a direct W(2).
  xpl::Result a = xpl::explore(obj, {{W(2)}, {}}, {}, checks);
  CHECK(a.verdict == chk::Verdict::yes);
  CHECK(shared.learned_states() >= 2);

  // W(3); W(2) reaches state 2 with a stale top cell, contradicting the
  // learned snapshot.
  xpl::Result b = xpl::explore(obj, {{W(3), W(2)}, {}}, {}, checks);
  CHECK(b.verdict == chk::Verdict::no);
  REQUIRE(shared.violation().has_value());
  CHECK(shared.violation()->expected.has_value());

  // The same programs are self-consistent under a fresh checker: each state
  // is visited with one memory only.
  chk::HiChecker fresh(obj, chk::HiMode::learned);
  xpl::Checks checks2;
  checks2.hi = &fresh;
  checks2.observe_at = Predicate::quiescent;
  xpl::Result c = xpl::explore(obj, {{W(3), W(2)}, {}}, {}, checks2);
  CHECK(c.verdict == chk::Verdict::yes);
}

TEST_CASE("a violated checker refuses further exploration") {
  regs::BaselineRegister obj(3, 1);
  chk::HiChecker hi(obj, chk::HiMode::learned);
  xpl::Checks checks;
  checks.hi = &hi;
  checks.observe_at = Predicate::quiescent;
  REQUIRE(xpl::explore(obj, {{W(2), W(1)}, {}}, {}, checks).verdict ==
          chk::Verdict::no);

  xpl::Result again = xpl::explore(obj, {{W(2)}, {}}, {}, checks);
  CHECK(again.verdict == chk::Verdict::no);
  CHECK(again.detail ==
        "history-independence checker already holds a violation");
  CHECK(again.stats.executions == 0);
}

TEST_CASE("witness executions replay to the recorded trace") {
  regs::BaselineRegister obj(3, 1);
  chk::HiChecker hi(obj, chk::HiMode::learned);
  xpl::Checks checks;
  checks.hi = &hi;
  checks.observe_at = Predicate::quiescent;
  xpl::Result r = xpl::explore(obj, {{W(2), W(1)}, {R()}}, {}, checks);
  REQUIRE(r.verdict == chk::Verdict::no);
  REQUIRE(r.witness.has_value());
  CHECK_FALSE(r.witness->what.empty());

  tio::TraceDoc doc =
      tio::make_trace(obj, "alg1:K=3,v0=1", {{W(2), W(1)}, {R()}},
                      r.witness->execution);
  regs::BaselineRegister fresh(3, 1);
  tio::ReplayResult rr = tio::replay_trace(doc, fresh);
  INFO(rr.detail);
  CHECK(rr.ok);
}

TEST_CASE("a finish check failure is reported with its witness") {
  regs::LockFreeRegister obj(2, 1);
  xpl::Checks checks;
  checks.finish_check = [](const Execution& e) -> std::optional<std::string> {
    if (e.ops.size() == 2) return "two ops finished";
    return std::nullopt;
  };
  xpl::Result r = xpl::explore(obj, {{W(2)}, {R()}}, {}, checks);
  CHECK(r.verdict == chk::Verdict::no);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->what == "two ops finished");
  CHECK(r.stats.executions == 1);
}

TEST_CASE("hi violations abort the run and surface the witness schedule") {
  regs::BaselineRegister obj(3, 1);
  chk::HiChecker hi(obj, chk::HiMode::learned);
  xpl::Checks checks;
  checks.hi = &hi;
  checks.observe_at = Predicate::quiescent;
  xpl::Result r = xpl::explore(obj, {{W(2), W(1)}, {}}, {}, checks);
  REQUIRE(r.verdict == chk::Verdict::no);
  REQUIRE(r.witness.has_value());

  // Re-running the witness schedule reproduces the flagged memory.
  mem::EngineMemory m;
  regs::BaselineRegister fresh(3, 1);
  fresh.allocate(m);
  m.seal();
  Execution e = run(fresh, m, {{W(2), W(1)}, {}}, r.witness->schedule);
  CHECK(e.snapshot_at(e.num_steps()) ==
        r.witness->execution.snapshot_at(r.witness->execution.num_steps()));
  CHECK(hi.violation()->snapshot ==
        r.witness->execution.snapshot_at(hi.violation()->cfg));
}
