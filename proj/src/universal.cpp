#include "hi/universal.hpp"

namespace hi::uni {

Universal::Universal(seq::SpecPtr spec, int n, bool apply_all)
    : spec_(std::move(spec)), n_(n), apply_all_(apply_all) {
  if (n < 1 || n > 16)
    throw mem::EngineError("universal: processes must be in [1,16]");
  if (spec_->state_bound() > (std::uint64_t{1} << kStateBits))
    throw mem::EngineError("universal: state space too large for the head word");
  if (spec_->resp_bound() > (std::int64_t{1} << kRspBits))
    throw mem::EngineError("universal: responses too large for the head word");
  reset_local();
}

std::string Universal::name() const {
  return "universal(" + spec_->name() + ",n=" + std::to_string(n_) +
         (apply_all_ ? ",apply_all" : "") + ")";
}

void Universal::reset_local() {
  priority_.resize(n_);
  for (int i = 0; i < n_; ++i) priority_[i] = i + 1;
}

void Universal::allocate(mem::Memory& m) {
  head_ = m.alloc("head", mem::ObjKind::cas_cell,
                  mem::CasWord{head_pack(spec_->initial_state()), 0});
  ann_.clear();
  for (int i = 1; i <= n_; ++i)
    ann_.push_back(m.alloc("announce[" + std::to_string(i) + "]",
                           mem::ObjKind::cas_cell, mem::CasWord{}));
}

std::optional<mem::MemorySnapshot> Universal::canonical(std::uint64_t q) const {
  if (q >= spec_->state_bound()) return std::nullopt;
  mem::MemorySnapshot snap;
  snap.push_back({mem::ObjKind::cas_cell, mem::CasWord{head_pack(q), 0}});
  for (int i = 0; i < n_; ++i)
    snap.push_back({mem::ObjKind::cas_cell, mem::CasWord{}});
  return snap;
}

task<std::int64_t> Universal::run_op(Proc& p, seq::Op op) {
  if (op.proc != 0)
    throw mem::EngineError("universal ops must not carry a process tag");
  if (op.code < 0 || op.code > 0xff || op.arg < 0 || op.arg > 0xffffffffll)
    throw mem::EngineError("op does not fit the announce encoding");
  if (!apply_all_ && !spec_->state_changing(op)) return apply_read_only(p, op);
  return apply(p, op);
}

task<std::int64_t> Universal::run_read_only(Proc& p, seq::Op op) {
  if (spec_->state_changing(op))
    throw RoleViolation("state-changing op on the read-only path");
  return apply_read_only(p, op);
}

task<std::int64_t> Universal::apply_read_only(Proc& p, seq::Op op) {
  auto w = static_cast<std::uint64_t>(co_await rllsc::load(p, head_));
  co_return spec_->apply(head_view(w).q, op).resp;
}

task<std::int64_t> Universal::poll_own_rsp(Proc& p, mem::ObjId own) {
  for (;;) {
    auto w = static_cast<std::uint64_t>(co_await rllsc::load(p, own));
    if (ann_tag(w) == ann_rsp) co_return static_cast<std::int64_t>(w);
  }
}

task<std::int64_t> Universal::poll_own_rsp_then_rl(Proc& p, mem::ObjId own,
                                                   mem::ObjId helped) {
  for (;;) {
    auto w = static_cast<std::uint64_t>(co_await rllsc::load(p, own));
    if (ann_tag(w) == ann_rsp) break;
  }
  co_await rllsc::rl(p, helped);
  co_return 0;
}

task<std::int64_t> Universal::poll_head_not_mine(Proc& p, int i) {
  for (;;) {
    auto w = static_cast<std::uint64_t>(co_await rllsc::load(p, head_));
    HeadView h = head_view(w);
    if (!(h.has_r && h.invoker == i)) co_return 0;
  }
}

task<std::int64_t> Universal::apply(Proc& p, seq::Op op) {
  const int i = p.id;
  const mem::ObjId own = ann_[i - 1];
  co_await rllsc::store(p, own, ann_pack_op(op));
  for (;;) {
    auto w = static_cast<std::uint64_t>(co_await rllsc::load(p, own));
    if (ann_tag(w) == ann_rsp) break;

    // Take the state; if someone answers us meanwhile, stop competing.
    auto fork = co_await section(p, rllsc::ll(p, head_), poll_own_rsp(p, own));
    if (!fork.left_done) break;
    HeadView h = head_view(static_cast<std::uint64_t>(*fork.left));

    if (!h.has_r) {
      // The last transition is paid off; propose the next one, preferring
      // the announce slot the priority counter points at.
      int j = priority_[i - 1];
      auto cand = static_cast<std::uint64_t>(co_await rllsc::load(p, ann_[j - 1]));
      seq::Op apply_op;
      if (ann_tag(cand) == ann_op) {
        apply_op = ann_unpack_op(cand);
      } else {
        auto mine = static_cast<std::uint64_t>(co_await rllsc::load(p, own));
        if (ann_tag(mine) != ann_op) continue;
        apply_op = op;
        j = i;
      }
      seq::Applied d = spec_->apply(h.q, apply_op);
      if (co_await rllsc::sc(p, head_, head_pack(d.state, d.resp, j)))
        priority_[i - 1] = priority_[i - 1] % n_ + 1;
    } else {
      // Pay off the pending transition: hand the response to its invoker,
      // then clear the head. The link on the invoker's announce cell must
      // be withdrawn on every path out.
      const mem::ObjId helped = ann_[h.invoker - 1];
      auto svc = co_await section(p, rllsc::ll(p, helped),
                                  poll_own_rsp_then_rl(p, own, helped));
      if (!svc.left_done) break;
      auto a = static_cast<std::uint64_t>(*svc.left);
      if (co_await rllsc::vl(p, head_)) {
        if (ann_tag(a) == ann_op)
          co_await rllsc::sc(p, helped, ann_pack_rsp(h.rsp));
        co_await rllsc::sc(p, head_, head_pack(h.q));
      }
      if (ann_tag(a) == ann_bottom) co_await rllsc::rl(p, helped);
    }
  }

  auto rw = static_cast<std::uint64_t>(co_await rllsc::load(p, own));
  if (ann_tag(rw) != ann_rsp)
    throw mem::EngineError("announce cell lost its response");

  // Clear our own transition record off the head, releasing any link the
  // abandoned head LL above may have left behind.
  auto tidy = co_await section(p, rllsc::ll(p, head_), poll_head_not_mine(p, i));
  if (tidy.left_done) {
    HeadView h = head_view(static_cast<std::uint64_t>(*tidy.left));
    if (h.has_r && h.invoker == i)
      co_await rllsc::sc(p, head_, head_pack(h.q));
    else
      co_await rllsc::rl(p, head_);
  } else {
    co_await rllsc::rl(p, head_);
  }
  co_await rllsc::store(p, own, ann_bottom);
  co_return ann_unpack_rsp(rw);
}

std::unique_ptr<Universal> make_universal(seq::SpecPtr spec, int n,
                                          bool apply_all) {
  return std::make_unique<Universal>(std::move(spec), n, apply_all);
}

HeadView head_state(const mem::MemorySnapshot& snap) {
  if (snap.empty() || snap[0].kind != mem::ObjKind::cas_cell)
    throw mem::EngineError("snapshot does not start with a head cell");
  return head_view(snap[0].w.val);
}

UniversalAudit audit_universal(const Universal& u, const Execution& e) {
  UniversalAudit out;
  auto fail = [&](const std::string& d, int step) {
    if (out.ok) {
      out.ok = false;
      out.detail = d + " (step " + std::to_string(step) + ")";
    }
  };

  const int head_idx = u.head().index;
  const int n = u.num_procs();

  bool expect_install = true;
  std::uint64_t q = head_view(e.initial.at(head_idx).w.val).q;
  std::vector<int> served_by_op(e.ops.size(), 0);
  std::vector<std::uint64_t> ann_val(n);
  for (int j = 1; j <= n; ++j) ann_val[j - 1] = e.initial.at(u.announce(j).index).w.val;

  auto op_of_serve = [&](int proc, int step) -> int {
    for (std::size_t k = 0; k < e.ops.size(); ++k) {
      const OpInstance& o = e.ops[k];
      if (o.process == proc && o.inv_step <= step &&
          (o.resp_step < 0 || step <= o.resp_step))
        return static_cast<int>(k);
    }
    return -1;
  };

  for (const StepRecord& r : e.steps) {
    if (!r.has_access) continue;
    const bool wrote =
        r.acc.kind == mem::AccessKind::write ||
        (r.acc.kind == mem::AccessKind::cas && r.out.ok);
    if (!wrote) continue;
    std::uint64_t old_val =
        r.acc.kind == mem::AccessKind::write ? 0 : r.acc.arg0.val;
    std::uint64_t new_val =
        r.acc.kind == mem::AccessKind::write ? r.acc.arg0.val : r.acc.arg1.val;

    if (r.acc.obj.index == head_idx) {
      if (r.acc.kind == mem::AccessKind::write)
        fail("plain write on the head cell", r.index);
      if (std::string(r.label) != "sc") {
        if (new_val != old_val)
          fail("a non-swap access moved the head value", r.index);
        continue;
      }
      HeadView prev = head_view(old_val);
      HeadView next = head_view(new_val);
      if (next.has_r != expect_install)
        fail("head swaps stopped alternating", r.index);
      if (prev.q != q) fail("transition started from a stale state", r.index);
      if (expect_install) {
        ++out.transitions;
        int k = op_of_serve(next.invoker, r.index);
        if (k < 0)
          fail("transition serves no op window of its invoker", r.index);
        else {
          ++served_by_op[k];
          const OpInstance& o = e.ops[k];
          seq::Applied d = u.spec().apply(prev.q, o.op);
          if (d.state != next.q || d.resp != next.rsp)
            fail("transition disagrees with the spec for the served op", r.index);
          if (o.resp_step >= 0 && o.resp != next.rsp)
            fail("op returned a different response than its transition", r.index);
        }
        q = next.q;
      } else {
        if (next.q != q) fail("clearing the record moved the state", r.index);
      }
      expect_install = !expect_install;
      continue;
    }

    for (int j = 1; j <= n; ++j) {
      if (r.acc.obj.index != u.announce(j).index) continue;
      if (new_val == ann_val[j - 1]) break;
      int from = ann_tag(ann_val[j - 1]);
      int to = ann_tag(new_val);
      bool legal = (from == ann_bottom && to == ann_op &&
                    r.acc.kind == mem::AccessKind::write && r.process == j) ||
                   (from == ann_op && to == ann_rsp &&
                    r.acc.kind == mem::AccessKind::cas) ||
                   (from == ann_rsp && to == ann_bottom &&
                    r.acc.kind == mem::AccessKind::write && r.process == j);
      if (!legal) fail("announce cell left its lifecycle", r.index);
      ann_val[j - 1] = new_val;
      break;
    }
  }

  for (std::size_t k = 0; k < e.ops.size(); ++k) {
    const OpInstance& o = e.ops[k];
    if (o.resp_step >= 0) {
      int want = u.spec().state_changing(o.op) || u.applies_everything() ? 1 : 0;
      if (served_by_op[k] != want)
        fail("completed op served " + std::to_string(served_by_op[k]) +
                 " times, expected " + std::to_string(want),
             o.resp_step);
    }
    if (served_by_op[k] > 1)
      fail("op served more than once", e.num_steps());
  }
  out.final_q = q;
  return out;
}

}  // namespace hi::uni
