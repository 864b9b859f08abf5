#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "hi/seq_spec.hpp"

using namespace hi::seq;

namespace {

// Reachability oracle: BFS over op_universe from the initial state.
std::set<std::uint64_t> reachable(const SequentialSpec& s, int nprocs) {
  std::set<std::uint64_t> seen{s.initial_state()};
  std::vector<std::uint64_t> frontier{s.initial_state()};
  auto ops = s.op_universe(nprocs);
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t q : frontier)
      for (const Op& o : ops) {
        std::uint64_t q2 = s.apply(q, o).state;
        if (seen.insert(q2).second) next.push_back(q2);
      }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

TEST_CASE("register spec transitions") {
  SpecPtr s = register_spec(3, 1);
  CHECK(s->initial_state() == 1);
  Applied w = s->apply(1, reg_op::make_write(2));
  CHECK(w.state == 2);
  CHECK(w.resp == kAck);
  Applied r = s->apply(2, reg_op::make_read());
  CHECK(r.state == 2);
  CHECK(r.resp == 2);
  CHECK(s->state_changing(reg_op::make_write(1)));
  CHECK_FALSE(s->state_changing(reg_op::make_read()));
  CHECK_THROWS(s->apply(1, reg_op::make_write(4)));
  CHECK_THROWS(register_spec(1, 1));
  CHECK_THROWS(register_spec(3, 0));
}

TEST_CASE("sequential history folding checks responses") {
  SpecPtr s = register_spec(3, 1);
  std::vector<std::pair<Op, std::int64_t>> ok = {
      {reg_op::make_write(2), kAck},
      {reg_op::make_write(1), kAck},
      {reg_op::make_read(), 1},
  };
  CHECK(seq_state(*s, ok) == 1);

  std::vector<std::pair<Op, std::int64_t>> bad = {
      {reg_op::make_write(2), kAck},
      {reg_op::make_read(), 1},
  };
  CHECK_THROWS_AS(seq_state(*s, bad), SpecViolation);
  try {
    seq_state(*s, bad);
  } catch (const SpecViolation& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("counter wraps at cap") {
  SpecPtr s = counter_spec(64);
  CHECK(s->apply(63, ctr_op::make_inc()).state == 0);
  CHECK(s->apply(0, ctr_op::make_dec()).state == 63);
  CHECK(s->apply(7, ctr_op::make_read()).resp == 7);
  CHECK_THROWS(counter_spec(1));
}

TEST_CASE("queue encodes digits with the head lowest") {
  SpecPtr s = queue_spec(2, 3);
  // {1} followed by Enqueue(2) is {1,2}: digits 1 + 2*3.
  Applied enq = s->apply(1, queue_op::make_enqueue(2));
  CHECK(enq.state == 7);
  CHECK(enq.resp == 0);
  Applied deq = s->apply(7, queue_op::make_dequeue());
  CHECK(deq.state == 2);
  CHECK(deq.resp == 1);
  CHECK(s->apply(7, queue_op::make_peek()).resp == 1);
  CHECK(s->apply(0, queue_op::make_dequeue()).resp == 0);
  CHECK(s->apply(0, queue_op::make_peek()).resp == 0);

  // Enqueue onto a full queue leaves it unchanged.
  std::uint64_t full = 1 + 2 * 3 + 1 * 9;
  Applied stuck = s->apply(full, queue_op::make_enqueue(2));
  CHECK(stuck.state == full);
  CHECK(stuck.resp == 0);

  // 1 + t + t^2 + t^3 states for t=2, cap=3.
  CHECK(s->enumerate_states()->size() == 15);
  CHECK_THROWS(queue_spec(2, 13));
}

TEST_CASE("test-and-set set vs blind set") {
  SpecPtr ts = set_spec(3);
  CHECK(ts->apply(0, set_op::make_insert(3)).state == 0b100);
  CHECK(ts->apply(0, set_op::make_insert(3)).resp == set_op::success);
  CHECK(ts->apply(0b100, set_op::make_insert(3)).resp == set_op::failure);
  CHECK(ts->apply(0b100, set_op::make_remove(3)).resp == set_op::success);
  CHECK(ts->apply(0, set_op::make_remove(3)).resp == set_op::failure);
  CHECK(ts->apply(0b100, set_op::make_lookup(3)).resp == set_op::success);
  CHECK(ts->apply(0b100, set_op::make_lookup(1)).resp == set_op::failure);

  SpecPtr blind = hi_set_spec(3);
  CHECK(blind->apply(0b100, set_op::make_insert(3)).resp == set_op::success);
  CHECK(blind->apply(0, set_op::make_remove(3)).resp == set_op::success);
  CHECK(blind->apply(0b100, set_op::make_insert(3)).state == 0b100);
  CHECK(blind->apply(0b101, set_op::make_remove(1)).state == 0b100);
  CHECK_THROWS(set_spec(0));
  CHECK_THROWS(blind->apply(0, set_op::make_insert(4)));
}

TEST_CASE("max register keeps the running maximum") {
  SpecPtr s = max_register_spec(3, 1);
  CHECK(s->apply(2, reg_op::make_write(1)).state == 2);
  CHECK(s->apply(1, reg_op::make_write(3)).state == 3);
  CHECK(s->apply(2, reg_op::make_read()).resp == 2);
  CHECK(s->enumerate_states()->size() == 3);
}

TEST_CASE("llsc spec context semantics") {
  SpecPtr s = llsc_spec(2, 3, 0);
  std::uint64_t q0 = s->initial_state();
  CHECK(q0 == 0);

  Applied ll = s->apply(q0, llsc_op::make_ll(1));
  CHECK(ll.resp == 0);
  std::uint64_t linked = ll.state;
  CHECK(linked == (std::uint64_t{1} << 32));

  CHECK(s->apply(linked, llsc_op::make_vl(1)).resp == 1);
  CHECK(s->apply(linked, llsc_op::make_vl(2)).resp == 0);

  Applied sc = s->apply(linked, llsc_op::make_sc(1, 2));
  CHECK(sc.resp == 1);
  CHECK(sc.state == 2);  // success clears every context bit

  CHECK(s->apply(q0, llsc_op::make_sc(1, 2)).resp == 0);
  CHECK(s->apply(q0, llsc_op::make_sc(1, 2)).state == q0);

  Applied rl = s->apply(linked, llsc_op::make_rl(1));
  CHECK(rl.resp == 1);
  CHECK(rl.state == 0);

  // Store clears contexts of both processes.
  std::uint64_t both = s->apply(linked, llsc_op::make_ll(2)).state;
  CHECK(s->apply(both, llsc_op::make_store(3)).state == 3);
  CHECK(s->apply(both, llsc_op::make_load()).resp == 0);

  CHECK(s->enumerate_states()->size() == 16);
  CHECK_THROWS(s->apply(q0, llsc_op::make_ll(3)));
  CHECK_THROWS(s->apply(q0, llsc_op::make_sc(1, 4)));
}

TEST_CASE("read-only ops preserve every state") {
  for (const char* d : {"register:K=4,v0=2", "counter:cap=8", "queue:t=2,cap=2",
                        "set:t=3", "hiset:t=3", "maxreg:K=3,v0=1",
                        "llsc:n=2,vmax=2,v0=0"}) {
    SpecPtr s = make_spec(d);
    auto states = s->enumerate_states();
    REQUIRE(states.has_value());
    for (std::uint64_t q : *states)
      for (const Op& o : s->op_universe(2))
        if (!s->state_changing(o)) CHECK(s->apply(q, o).state == q);
  }
}

TEST_CASE("declared state spaces are exactly the reachable ones") {
  for (const char* d : {"register:K=3,v0=1", "counter:cap=8", "queue:t=2,cap=3",
                        "set:t=4", "hiset:t=4", "llsc:n=2,vmax=2,v0=1"}) {
    SpecPtr s = make_spec(d);
    auto declared = s->enumerate_states();
    REQUIRE(declared.has_value());
    std::set<std::uint64_t> want(declared->begin(), declared->end());
    CHECK(reachable(*s, 2) == want);
    for (std::uint64_t q : want) CHECK(q < s->state_bound());
  }
}

TEST_CASE("every state can get back to the initial state") {
  // The state-quiescent checker leans on re-reachability, not just closure.
  for (const char* d : {"register:K=4,v0=1", "counter:cap=8", "set:t=3",
                        "maxreg:K=3,v0=1"}) {
    SpecPtr s = make_spec(d);
    bool monotone = std::string(d).rfind("maxreg", 0) == 0;
    auto states = *s->enumerate_states();
    for (std::uint64_t q : states) {
      std::set<std::uint64_t> back;
      std::vector<std::uint64_t> frontier{q};
      back.insert(q);
      while (!frontier.empty()) {
        std::vector<std::uint64_t> next;
        for (std::uint64_t x : frontier)
          for (const Op& o : s->op_universe(2)) {
            std::uint64_t y = s->apply(x, o).state;
            if (back.insert(y).second) next.push_back(y);
          }
        frontier = std::move(next);
      }
      if (monotone)
        CHECK(back.count(states.back()) == 1);
      else
        CHECK(back.count(s->initial_state()) == 1);
    }
  }
}

TEST_CASE("spec registry parses descriptors") {
  CHECK(make_spec("register:K=4,v0=2")->name() == "register:K=4,v0=2");
  CHECK(make_spec("register")->name() == "register:K=3,v0=1");
  CHECK(make_spec("counter:cap=10")->name() == "counter:cap=10");
  CHECK(make_spec("queue")->name() == "queue:t=2,cap=3");
  CHECK(make_spec("hiset:t=5")->name() == "hiset:t=5");
  CHECK(make_spec("llsc:n=3,vmax=1,v0=1")->name() == "llsc:n=3,vmax=1,v0=1");
  CHECK_THROWS(make_spec("stack"));
  CHECK_THROWS(make_spec("register:K"));
}

TEST_CASE("op printing for reports") {
  SpecPtr s = make_spec("queue:t=2,cap=3");
  CHECK(s->print_op(queue_op::make_enqueue(2)) == "Enqueue(2)");
  CHECK(s->print_op(queue_op::make_dequeue()) == "Dequeue");
  SpecPtr l = make_spec("llsc:n=2,vmax=3,v0=0");
  CHECK(l->print_op(llsc_op::make_sc(2, 1)) == "sc(1)@p2");
  CHECK(l->print_state(2 | (std::uint64_t{1} << 32)) == "(2,ctx=1)");
}
