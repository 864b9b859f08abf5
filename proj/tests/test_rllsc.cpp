#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hi/rllsc.hpp"
#include "hi/scenarios.hpp"

using namespace hi;
using namespace hi::seq::llsc_op;

namespace {

// Solo run of one process' ops, stepping only that process.
Execution run_ops(rllsc::RllscObject& obj, int proc, std::vector<seq::Op> ops) {
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  std::vector<std::vector<seq::Op>> progs(obj.num_procs());
  progs[proc - 1] = std::move(ops);
  Engine eng(obj, m, progs);
  while (!eng.done()) eng.step(Choice{proc, Side::main});
  return eng.execution();
}

mem::CasWord word_after(const Execution& e) {
  return e.snapshot_at(e.num_steps()).at(0).w;
}

}  // namespace

TEST_CASE("solo link reads the value and marks its context bit") {
  rllsc::RllscObject obj(2, 3, 1);
  Execution e = run_ops(obj, 2, {make_ll(2)});
  CHECK(e.ops[0].resp == 1);
  CHECK(e.ops[0].own_steps == 2);  // read, then the marking cas
  CHECK(word_after(e) == mem::CasWord{1, rllsc::ctx_bit(2)});
}

TEST_CASE("validate is one step and reports only the own mark") {
  rllsc::RllscObject obj(2, 3, 0);
  Execution a = run_ops(obj, 1, {make_vl(1)});
  CHECK(a.ops[0].resp == 0);
  CHECK(a.ops[0].own_steps == 1);

  rllsc::RllscObject obj2(2, 3, 0);
  Execution b = run_ops(obj2, 1, {make_ll(1), make_vl(1)});
  CHECK(b.ops[1].resp == 1);
  CHECK(b.ops[1].own_steps == 1);
}

TEST_CASE("store-conditional succeeds only while linked and clears all marks") {
  rllsc::RllscObject obj(2, 3, 0);
  Execution e = run_ops(obj, 1, {make_ll(1), make_sc(1, 2)});
  CHECK(e.ops[1].resp == 1);
  CHECK(e.ops[1].own_steps == 2);
  CHECK(word_after(e) == mem::CasWord{2, 0});

  rllsc::RllscObject obj2(2, 3, 0);
  Execution f = run_ops(obj2, 1, {make_sc(1, 2)});
  CHECK(f.ops[0].resp == 0);
  CHECK(f.ops[0].own_steps == 1);  // one read shows the missing mark
  CHECK(word_after(f) == mem::CasWord{0, 0});
}

TEST_CASE("release withdraws only the caller's mark and always acks") {
  rllsc::RllscObject obj(3, 3, 0);
  Execution e = run_ops(obj, 2, {make_ll(2), make_rl(2)});
  CHECK(e.ops[1].resp == 1);
  CHECK(word_after(e) == mem::CasWord{0, 0});

  // Releasing without a mark is a single silent read.
  rllsc::RllscObject obj2(3, 3, 0);
  Execution f = run_ops(obj2, 2, {make_rl(2)});
  CHECK(f.ops[0].resp == 1);
  CHECK(f.ops[0].own_steps == 1);
}

TEST_CASE("load and store are single accesses") {
  rllsc::RllscObject obj(2, 3, 1);
  Execution e = run_ops(obj, 1, {make_store(3), make_load()});
  CHECK(e.ops[0].resp == 1);
  CHECK(e.ops[0].own_steps == 1);
  CHECK(e.ops[1].resp == 3);
  CHECK(e.ops[1].own_steps == 1);
  CHECK(word_after(e) == mem::CasWord{3, 0});
}

TEST_CASE("store defeats a concurrent link's cas once") {
  rllsc::RllscObject obj(2, 3, 0);
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  // p1 reads 0, p2's store changes the word, p1's cas misses once and the
  // retry marks the word the failed cas observed.
  Schedule s{step_of(1), step_of(2), step_of(1), step_of(1)};
  Execution e =
      run(obj, m, {{make_ll(1)}, {make_store(2)}}, s);
  const OpInstance& link = e.ops[0];
  CHECK(link.op.code == ll);
  CHECK(link.resp == 2);
  CHECK(link.own_steps == 3);
  CHECK(word_after(e) == mem::CasWord{2, rllsc::ctx_bit(1)});
}

TEST_CASE("the cell word is the canonical form of the abstract state") {
  rllsc::RllscObject obj(2, 3, 0);
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  for (std::uint64_t v = 0; v <= 3; ++v)
    for (std::uint64_t ctx = 0; ctx < 4; ++ctx) {
      auto canon = obj.canonical(pack_state(v, ctx));
      REQUIRE(canon.has_value());
      REQUIRE(canon->size() == 1);
      CHECK(canon->at(0).w == mem::CasWord{v, ctx});
      CHECK(canon->at(0).kind == mem::ObjKind::cas_cell);
    }
}

TEST_CASE("process-tagged primitives refuse other callers") {
  rllsc::RllscObject obj(2, 3, 0);
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  Engine eng(obj, m, {{}, {make_ll(1)}});
  CHECK_THROWS_AS(eng.step(Choice{2, Side::main}), RoleViolation);
}

TEST_CASE("out-of-range store values are rejected") {
  rllsc::RllscObject obj(2, 3, 0);
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  Engine eng(obj, m, {{make_store(4)}, {}});
  CHECK_THROWS_AS(eng.step(Choice{1, Side::main}), mem::EngineError);
}

TEST_CASE("llsc scenario holds") {
  sc::ScenarioResult r = sc::run_scenario("rllsc_oracle_equiv");
  INFO(r.detail);
  CHECK(r.ok);
}
