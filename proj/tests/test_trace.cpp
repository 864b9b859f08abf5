#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "hi/registers.hpp"
#include "hi/trace_io.hpp"

using namespace hi;

namespace {

// A completed run with overlap and snapshot markers, exercising every record
// type. The schedule is recorded from a round-robin pass, then rerun with a
// marker up front, one after the third step, and one at the end.
tio::TraceDoc sample_trace(regs::HelpingRegister& obj) {
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  std::vector<std::vector<seq::Op>> progs{
      {seq::reg_op::make_write(2)}, {seq::reg_op::make_read()}};
  Schedule s{marker()};
  {
    Engine eng(obj, m, progs);
    int turn = 0;
    while (!eng.done()) {
      Choice c = eng.options()[turn++ % eng.options().size()];
      s.push_back(ScheduleEntry{false, c});
      if (eng.steps_taken() == 2) s.push_back(marker());
      eng.step(c);
    }
  }
  s.push_back(marker());
  Execution e = run(obj, m, progs, s);
  return tio::make_trace(obj, "alg4:K=2,v0=1", progs, e);
}

}  // namespace

TEST_CASE("serialization is canonical") {
  regs::HelpingRegister obj(2, 1);
  tio::TraceDoc doc = sample_trace(obj);
  std::string text = tio::to_jsonl(doc);
  tio::TraceDoc back = tio::from_jsonl(text);
  CHECK(tio::to_jsonl(back) == text);

  CHECK(back.object == doc.object);
  CHECK(back.descriptor == "alg4:K=2,v0=1");
  CHECK(back.spec == doc.spec);
  CHECK(back.procs == 2);
  CHECK(back.programs == doc.programs);
  CHECK(back.execution.num_steps() == doc.execution.num_steps());
  CHECK(back.execution.initial == doc.execution.initial);
  CHECK(back.execution.markers == doc.execution.markers);
  for (int i = 0; i < doc.execution.num_steps(); ++i) {
    const StepRecord& a = doc.execution.steps[i];
    const StepRecord& b = back.execution.steps[i];
    CHECK(a.process == b.process);
    CHECK(a.op_id == b.op_id);
    CHECK(a.has_access == b.has_access);
    CHECK(a.after == b.after);
    CHECK(std::string(a.label) == std::string(b.label));
  }
}

TEST_CASE("a recorded trace replays cleanly against a fresh object") {
  regs::HelpingRegister obj(2, 1);
  tio::TraceDoc doc = sample_trace(obj);
  regs::HelpingRegister fresh(2, 1);
  tio::ReplayResult r = tio::replay_trace(doc, fresh);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("replay flags a tampered step and a tampered response") {
  regs::HelpingRegister obj(2, 1);
  tio::TraceDoc doc = sample_trace(obj);

  tio::TraceDoc bad_step = doc;
  bad_step.execution.steps.at(3).after.val ^= 1;
  regs::HelpingRegister f1(2, 1);
  tio::ReplayResult r1 = tio::replay_trace(bad_step, f1);
  CHECK_FALSE(r1.ok);
  CHECK_FALSE(r1.detail.empty());

  tio::TraceDoc bad_resp = doc;
  for (OpInstance& o : bad_resp.execution.ops)
    if (o.resp_step >= 0) o.resp += 1;
  regs::HelpingRegister f2(2, 1);
  tio::ReplayResult r2 = tio::replay_trace(bad_resp, f2);
  CHECK_FALSE(r2.ok);
}

TEST_CASE("trace files round-trip through the filesystem") {
  regs::HelpingRegister obj(2, 1);
  tio::TraceDoc doc = sample_trace(obj);
  const char* path = "trace_roundtrip_test.jsonl";
  tio::write_trace_file(path, doc);
  tio::TraceDoc back = tio::read_trace_file(path);
  CHECK(tio::to_jsonl(back) == tio::to_jsonl(doc));
  std::remove(path);
}

TEST_CASE("garbage input is rejected") {
  CHECK_THROWS_AS(tio::from_jsonl(""), mem::EngineError);
  CHECK_THROWS_AS(tio::from_jsonl("not json\n"), mem::EngineError);
  CHECK_THROWS_AS(tio::from_jsonl("{\"kind\":\"step\"}\n"), mem::EngineError);
  CHECK_THROWS_AS(tio::read_trace_file("no_such_trace_file.jsonl"),
                  mem::EngineError);
}

TEST_CASE("the extracted schedule weaves markers back in place") {
  regs::HelpingRegister obj(2, 1);
  tio::TraceDoc doc = sample_trace(obj);
  Schedule s = tio::schedule_of(doc.execution);
  REQUIRE(s.size() == doc.execution.steps.size() + 3);
  CHECK(s.front().marker);
  CHECK(s.back().marker);
  CHECK(s.at(4).marker);  // after step 3

  regs::HelpingRegister fresh(2, 1);
  mem::EngineMemory m;
  fresh.allocate(m);
  m.seal();
  Execution e = run(fresh, m, doc.programs, s);
  CHECK(e.markers == doc.execution.markers);
  CHECK(e.snapshot_at(e.num_steps()) ==
        doc.execution.snapshot_at(doc.execution.num_steps()));
}
