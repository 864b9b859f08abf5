#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hi/scenarios.hpp"
#include "hi/universal.hpp"

using namespace hi;

namespace {

struct Rig {
  std::unique_ptr<uni::Universal> obj;
  mem::EngineMemory m;

  Rig(const std::string& spec, int procs, bool apply_all = false)
      : obj(uni::make_universal(seq::make_spec(spec), procs, apply_all)) {
    obj->allocate(m);
    m.seal();
  }

  Execution drive(std::vector<std::vector<seq::Op>> progs) {
    Engine eng(*obj, m, std::move(progs));
    int turn = 0;
    while (!eng.done()) {
      auto opts = eng.options();
      REQUIRE_FALSE(opts.empty());
      eng.step(opts[turn++ % opts.size()]);
    }
    return eng.execution();
  }
};

}  // namespace

TEST_CASE("head words round-trip through packing") {
  uni::HeadView h = uni::head_view(uni::head_pack(7));
  CHECK(h.q == 7);
  CHECK_FALSE(h.has_r);

  uni::HeadView g = uni::head_view(uni::head_pack(3, 9, 2));
  CHECK(g.q == 3);
  CHECK(g.has_r);
  CHECK(g.rsp == 9);
  CHECK(g.invoker == 2);
}

TEST_CASE("announce words round-trip through packing") {
  CHECK(uni::ann_tag(0) == uni::ann_bottom);
  seq::Op op = seq::ctr_op::make_dec();
  std::uint64_t w = uni::ann_pack_op(op);
  CHECK(uni::ann_tag(w) == uni::ann_op);
  CHECK(uni::ann_unpack_op(w).code == op.code);
  CHECK(uni::ann_unpack_op(w).arg == op.arg);
  CHECK(uni::ann_tag(uni::ann_pack_rsp(5)) == uni::ann_rsp);
  CHECK(uni::ann_unpack_rsp(uni::ann_pack_rsp(5)) == 5);
}

TEST_CASE("canonical memory is the bare state plus empty announces") {
  Rig rig("counter:cap=8", 3);
  auto canon = rig.obj->canonical(5);
  REQUIRE(canon.has_value());
  REQUIRE(canon->size() == 4);
  CHECK(uni::head_state(*canon).q == 5);
  CHECK_FALSE(uni::head_state(*canon).has_r);
  for (int j = 1; j <= 3; ++j)
    CHECK(canon->at(rig.obj->announce(j).index).w == mem::CasWord{});
}

TEST_CASE("a solo state-changing op installs once and cleans up") {
  Rig rig("counter:cap=4", 2);
  Execution e = rig.drive({{seq::ctr_op::make_inc()}, {}});
  CHECK(e.ops[0].resp == seq::kAck);

  uni::UniversalAudit a = uni::audit_universal(*rig.obj, e);
  INFO(a.detail);
  CHECK(a.ok);
  CHECK(a.transitions == 1);
  CHECK(a.final_q == 1);
  uni::HeadView head = uni::head_state(e.snapshot_at(e.num_steps()));
  CHECK(head.q == 1);
  CHECK_FALSE(head.has_r);
  CHECK(e.snapshot_at(e.num_steps()) == *rig.obj->canonical(1));
}

TEST_CASE("fast reads are one silent load") {
  Rig rig("counter:cap=4", 2);
  Execution e = rig.drive({{seq::ctr_op::make_read()}, {}});
  CHECK(e.ops[0].own_steps == 1);
  CHECK(e.ops[0].resp == 0);
  CHECK(e.snapshot_at(e.num_steps()) == e.initial);
  uni::UniversalAudit a = uni::audit_universal(*rig.obj, e);
  CHECK(a.ok);
  CHECK(a.transitions == 0);
}

TEST_CASE("applied reads go through the full protocol and leave no trace") {
  Rig rig("counter:cap=4", 2, true);
  Execution e = rig.drive({{seq::ctr_op::make_read()}, {}});
  CHECK(e.ops[0].own_steps > 1);
  CHECK(e.ops[0].resp == 0);
  CHECK(e.snapshot_at(e.num_steps()) == *rig.obj->canonical(0));
  uni::UniversalAudit a = uni::audit_universal(*rig.obj, e);
  INFO(a.detail);
  CHECK(a.ok);
  CHECK(a.transitions == 1);
}

TEST_CASE("interleaved writers agree with the audit and land on the balance") {
  Rig rig("counter:cap=4", 2);
  Execution e = rig.drive({{seq::ctr_op::make_inc(), seq::ctr_op::make_inc()},
                           {seq::ctr_op::make_dec()}});
  for (const OpInstance& o : e.ops) {
    CHECK(o.resp_step >= 0);
    CHECK(o.resp == seq::kAck);
  }
  uni::UniversalAudit a = uni::audit_universal(*rig.obj, e);
  INFO(a.detail);
  CHECK(a.ok);
  CHECK(a.transitions == 3);
  CHECK(a.final_q == 1);
  CHECK(e.snapshot_at(e.num_steps()) == *rig.obj->canonical(1));
}

TEST_CASE("the audit rejects a tampered response") {
  Rig rig("counter:cap=4", 2);
  Execution e = rig.drive({{seq::ctr_op::make_inc()}, {}});
  REQUIRE(uni::audit_universal(*rig.obj, e).ok);
  e.ops[0].resp = 1;
  uni::UniversalAudit a = uni::audit_universal(*rig.obj, e);
  CHECK_FALSE(a.ok);
  CHECK_FALSE(a.detail.empty());
}

TEST_CASE("process-tagged ops are refused") {
  Rig rig("counter:cap=4", 2);
  seq::Op tagged{seq::ctr_op::inc, 0, 1};
  Engine eng(*rig.obj, rig.m, {{tagged}, {}});
  CHECK_THROWS_AS(eng.step(Choice{1, Side::main}), mem::EngineError);
}

TEST_CASE("native stress scenario holds") {
  sc::ScenarioResult r = sc::run_scenario("universal_native_stress");
  INFO(r.detail);
  CHECK(r.ok);
}
