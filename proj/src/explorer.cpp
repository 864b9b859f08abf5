#include "hi/explorer.hpp"

#include <algorithm>

namespace hi::xpl {

namespace {

Schedule schedule_of(const std::vector<Choice>& choices) {
  Schedule s;
  s.reserve(choices.size());
  for (const Choice& c : choices) s.push_back(step_of(c.process, c.side));
  return s;
}

}  // namespace

Result explore(AlgorithmObject& obj, const ProgramSet& programs,
               const Bounds& bounds, const Checks& checks) {
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();

  Result res;
  if (checks.hi && !checks.hi->ok()) {
    res.verdict = chk::Verdict::no;
    res.detail = "history-independence checker already holds a violation";
    return res;
  }
  std::vector<std::size_t> path;

  for (;;) {
    if (bounds.max_executions &&
        res.stats.executions >= bounds.max_executions) {
      res.stats.stopped_early = true;
      break;
    }

    Engine eng(obj, m, programs, bounds.section_fair_cap);
    std::vector<std::size_t> counts;
    std::vector<Choice> taken;
    std::optional<Choice> prev;
    int preemptions = 0;
    bool violated = false;

    auto observe = [&](int cfg) {
      if (!checks.hi) return true;
      if (!eng.predicate_holds(checks.observe_at)) return true;
      ++res.stats.obs_points;
      if (checks.hi->observe(eng.execution(), cfg, eng.current_snapshot()))
        return true;
      const chk::HiViolation& v = *checks.hi->violation();
      res.witness = Witness{schedule_of(taken), eng.execution(), v.what, v.cfg};
      res.verdict = chk::Verdict::no;
      ++res.stats.executions;  // count the aborted execution
      violated = true;
      return false;
    };

    if (!observe(0)) return res;

    while (!eng.done() &&
           eng.steps_taken() < static_cast<int>(bounds.max_steps)) {
      std::vector<Choice> allowed = eng.options();
      // A preemption is scheduling away from the strand that took the
      // previous step: another process while the previous one still has any
      // enabled strand, or the sibling strand of an interleaved block while
      // the previous strand could continue. Forced moves (the strand
      // finished, its block resolved, or the fairness cap masked it) are
      // free. A spent budget pins the schedule to the previous strand,
      // falling back to the same process and only then to a free switch.
      bool cont_present =
          prev && std::find(allowed.begin(), allowed.end(), *prev) !=
                      allowed.end();
      bool proc_live = false;
      if (prev)
        for (const Choice& c : allowed)
          if (c.process == prev->process) proc_live = true;
      if (prev && bounds.max_preemptions >= 0 &&
          preemptions >= bounds.max_preemptions) {
        if (cont_present) {
          allowed = {*prev};
        } else if (proc_live) {
          std::vector<Choice> same;
          for (const Choice& c : allowed)
            if (c.process == prev->process) same.push_back(c);
          allowed = std::move(same);
        }
      }
      std::size_t k = counts.size();
      if (k >= path.size()) path.push_back(0);
      counts.push_back(allowed.size());
      Choice c = allowed.at(path[k]);
      if (prev) {
        bool charged = c.process != prev->process
                           ? proc_live
                           : cont_present && !(c == *prev);
        if (charged) ++preemptions;
      }
      eng.step(c);
      taken.push_back(c);
      prev = c;
      if (!observe(eng.steps_taken())) return res;
    }

    ++res.stats.executions;
    if (!eng.done()) ++res.stats.truncated;

    if (checks.linearizability && !violated) {
      chk::LinResult lr =
          chk::check_linearizable(obj.spec(), eng.execution(), checks.lin);
      if (lr.verdict == chk::Verdict::no) {
        res.witness = Witness{schedule_of(taken), eng.execution(), lr.detail,
                              eng.steps_taken()};
        res.verdict = chk::Verdict::no;
        return res;
      }
      if (lr.verdict == chk::Verdict::unknown) ++res.stats.lin_unknown;
    }
    if (checks.finish_check && !violated) {
      if (std::optional<std::string> what = checks.finish_check(eng.execution())) {
        res.witness = Witness{schedule_of(taken), eng.execution(), *what,
                              eng.steps_taken()};
        res.verdict = chk::Verdict::no;
        return res;
      }
    }

    while (!path.empty() && path.back() + 1 >= counts[path.size() - 1])
      path.pop_back();
    if (path.empty()) break;
    ++path.back();
  }

  if (res.stats.truncated || res.stats.stopped_early ||
      res.stats.lin_unknown) {
    res.verdict = chk::Verdict::unknown;
    res.detail = "explored " + std::to_string(res.stats.executions) +
                 " executions, " + std::to_string(res.stats.truncated) +
                 " truncated, " + std::to_string(res.stats.lin_unknown) +
                 " undecided" + (res.stats.stopped_early ? ", stopped early" : "");
  } else {
    res.verdict = chk::Verdict::yes;
    res.detail =
        "explored " + std::to_string(res.stats.executions) + " executions";
  }
  return res;
}

}  // namespace hi::xpl
