// Release gate: every criterion below must pass, each within its pinned wall
// clock budget. One line is printed per criterion; the exit code is the
// number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hi/scenarios.hpp"

namespace {

struct Outcome {
  bool ok = false;
  std::uint64_t executions = 0;
  std::string detail;
};

Outcome scenario(const std::string& name) {
  hi::sc::ScenarioResult r = hi::sc::run_scenario(name);
  return {r.ok, r.executions, r.detail};
}

struct Criterion {
  const char* what;
  double budget_s;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"a stale-cell register shows two different quiescent memories for one "
     "state, [1,0,0] against [1,1,0]",
     1.0, [] { return scenario("alg1_counterexample"); }},

    {"the clear-both-ways register keeps every no-pending-write snapshot "
     "canonical and every history linearizable over an exhaustive two-write "
     "one-read space of at most a million interleavings",
     60.0,
     [] {
       Outcome o = scenario("alg2_exhaustive");
       if (o.executions > 1'000'000) {
         o.ok = false;
         o.detail += "\nexplored more than a million interleavings";
       }
       return o;
     }},

    {"a reader can be held unreturned for a thousand of its own steps while "
     "a hundred writes complete around it",
     60.0, [] { return scenario("alg2_starvation"); }},

    {"the helping register keeps every quiescent snapshot canonical, every "
     "read within 6K+8 and every write within 2K+7 steps of its caller, and "
     "shows a non-canonical snapshot under a pending read",
     120.0, [] { return scenario("alg4_exhaustive"); }},

    {"the releasable-link cell matches its word-transition oracle, "
     "linearizes, and stays history-independent at every step across "
     "two- and three-process mixes",
     120.0, [] { return scenario("rllsc_oracle_equiv"); }},

    {"the universal construction over a counter and a register linearizes, "
     "lands the head on the applied-operation chain, returns from every "
     "operation, alternates install and clear swaps, serves each operation "
     "exactly once, and keeps no-pending-write snapshots canonical with "
     "fast reads",
     600.0,
     [] {
       Outcome a = scenario("universal_quiescent:spec=counter:cap=4");
       Outcome b = scenario("universal_quiescent:spec=register:K=2,v0=1");
       return Outcome{a.ok && b.ok, a.executions + b.executions,
                      a.detail + "\n" + b.detail};
     }},

    {"every single operation of the bit-per-element set moves at most one "
     "base object between canonical memories",
     1.0, [] { return scenario("hi_set_distance"); }},

    {"four native threads drive ten thousand operations through the "
     "universal counter and settle on the increment-decrement balance with "
     "canonical memory",
     30.0, [] { return scenario("universal_native_stress"); }},
};

}  // namespace

int main() {
  int failures = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    const Criterion& c = kCriteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o.ok = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    bool in_budget = secs <= c.budget_s;
    bool pass = o.ok && in_budget;
    if (!pass) ++failures;
    std::printf("criterion %zu: %s  %s (%.2fs of %.0fs budget, %llu executions)\n",
                i + 1, pass ? "PASS" : "FAIL", c.what, secs, c.budget_s,
                static_cast<unsigned long long>(o.executions));
    if (!pass) {
      if (!in_budget) std::printf("  over budget\n");
      std::printf("  %s\n", o.detail.c_str());
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
