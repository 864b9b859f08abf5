#include "hi/checker.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace hi::chk {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    case Verdict::unknown:
      return "unknown";
  }
  return "?";
}

bool StateSet::contains(std::uint64_t q) const {
  return std::binary_search(states.begin(), states.end(), q);
}

namespace {

struct SearchItem {
  seq::Op op{};
  int inv_step = 0;
  int resp_step = -1;      // -1: pending within the considered window
  std::int64_t resp = 0;   // required response when resp_step >= 0
  int op_index = -1;       // index into Execution::ops
};

struct Key {
  std::uint64_t mask = 0;
  std::uint64_t q = 0;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = k.q + 0x9e3779b97f4a7c15ull;
    h ^= k.mask + 0x632be59bd9b4e019ull + (h << 6) + (h >> 2);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    return static_cast<std::size_t>(h);
  }
};

// Shared Wing-Gong style search state. A candidate for the next linearization
// point is any unlinearized operation not real-time-preceded by another
// unlinearized completed operation.
struct Search {
  const seq::SequentialSpec* spec = nullptr;
  std::vector<SearchItem> items;
  std::uint64_t completed_mask = 0;
  std::uint64_t all_mask = 0;
  std::uint64_t node_cap = 0;
  std::uint64_t nodes = 0;
  bool capped = false;
  std::unordered_set<Key, KeyHash> seen;

  int min_unlinearized_resp(std::uint64_t mask) const {
    int m = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (mask & (std::uint64_t{1} << i)) continue;
      if (items[i].resp_step >= 0) m = std::min(m, items[i].resp_step);
    }
    return m;
  }
};

struct LinSearch : Search {
  bool include_pending = false;
  std::vector<LinStep> path;

  bool dfs(std::uint64_t mask, std::uint64_t q) {
    if ((mask & completed_mask) == completed_mask) return true;
    if (++nodes > node_cap) {
      capped = true;
      return false;
    }
    if (!seen.insert({mask, q}).second) return false;
    int min_resp = min_unlinearized_resp(mask);
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      const SearchItem& it = items[i];
      if (it.inv_step > min_resp) continue;
      if (it.resp_step < 0 && !include_pending) continue;
      seq::Applied a = spec->apply(q, it.op);
      if (it.resp_step >= 0 && a.resp != it.resp) continue;
      path.push_back({it.op_index, a.state, a.resp});
      if (dfs(mask | bit, a.state)) return true;
      path.pop_back();
      if (capped) return false;
    }
    return false;
  }
};

struct StateSearch : Search {
  std::unordered_set<std::uint64_t> found;

  void dfs(std::uint64_t mask, std::uint64_t q) {
    if (capped) return;
    if (++nodes > node_cap) {
      capped = true;
      return;
    }
    if (!seen.insert({mask, q}).second) return;
    if ((mask & completed_mask) == completed_mask) found.insert(q);
    int min_resp = min_unlinearized_resp(mask);
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      const SearchItem& it = items[i];
      if (it.inv_step > min_resp) continue;
      seq::Applied a = spec->apply(q, it.op);
      if (it.resp_step >= 0 && a.resp != it.resp) continue;
      dfs(mask | bit, a.state);
    }
  }
};

}  // namespace

LinResult check_linearizable(const seq::SequentialSpec& spec,
                             const Execution& e, const LinOptions& opt) {
  if (e.ops.size() > 64)
    throw mem::EngineError("linearizability check supports at most 64 ops");
  LinSearch s;
  s.spec = &spec;
  s.node_cap = opt.node_cap;
  s.include_pending = opt.include_pending;
  for (std::size_t i = 0; i < e.ops.size(); ++i) {
    const OpInstance& o = e.ops[i];
    s.items.push_back(
        {o.op, o.inv_step, o.resp_step, o.resp, static_cast<int>(i)});
    s.all_mask |= std::uint64_t{1} << i;
    if (o.resp_step >= 0) s.completed_mask |= std::uint64_t{1} << i;
  }
  LinResult r;
  bool ok = s.dfs(0, spec.initial_state());
  r.nodes = s.nodes;
  if (ok) {
    r.verdict = Verdict::yes;
    r.order = std::move(s.path);
  } else if (s.capped) {
    r.verdict = Verdict::unknown;
    r.detail = "node cap of " + std::to_string(opt.node_cap) + " reached";
  } else {
    r.verdict = Verdict::no;
    r.detail = "no linearization of " + std::to_string(e.ops.size()) +
               " ops against " + spec.name();
  }
  return r;
}

StateSet possible_states_at(const seq::SequentialSpec& spec, const Execution& e,
                            int cfg, const StateSetOptions& opt) {
  if (cfg < 0 || cfg > e.num_steps())
    throw mem::EngineError("configuration index out of range");
  StateSearch s;
  s.spec = &spec;
  s.node_cap = opt.node_cap;
  std::size_t considered = 0;
  for (std::size_t i = 0; i < e.ops.size(); ++i) {
    const OpInstance& o = e.ops[i];
    if (o.inv_step > cfg) continue;
    bool done_by_cfg = o.resp_step >= 0 && o.resp_step <= cfg;
    if (!done_by_cfg && !spec.state_changing(o.op)) continue;
    if (considered >= 64)
      throw mem::EngineError("state enumeration supports at most 64 ops");
    s.items.push_back({o.op, o.inv_step, done_by_cfg ? o.resp_step : -1,
                       done_by_cfg ? o.resp : 0, static_cast<int>(i)});
    if (done_by_cfg) s.completed_mask |= std::uint64_t{1} << considered;
    ++considered;
  }
  s.dfs(0, spec.initial_state());
  StateSet out;
  out.complete = !s.capped;
  out.nodes = s.nodes;
  out.states.assign(s.found.begin(), s.found.end());
  std::sort(out.states.begin(), out.states.end());
  return out;
}

}  // namespace hi::chk
