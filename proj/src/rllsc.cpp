#include "hi/rllsc.hpp"

namespace hi::rllsc {

task<std::int64_t> ll(Proc& p, mem::ObjId o) {
  LabelGuard g(p, "ll");
  mem::CasWord cur = (co_await p.read(o)).value;
  for (;;) {
    auto out = co_await p.cas(o, cur, {cur.val, cur.context | ctx_bit(p.id)});
    if (out.ok) co_return static_cast<std::int64_t>(cur.val);
    cur = out.value;
  }
}

task<std::int64_t> vl(Proc& p, mem::ObjId o) {
  LabelGuard g(p, "vl");
  mem::CasWord w = (co_await p.read(o)).value;
  co_return (w.context & ctx_bit(p.id)) ? 1 : 0;
}

task<std::int64_t> sc(Proc& p, mem::ObjId o, std::uint64_t v) {
  LabelGuard g(p, "sc");
  mem::CasWord cur = (co_await p.read(o)).value;
  while (cur.context & ctx_bit(p.id)) {
    auto out = co_await p.cas(o, cur, {v, 0});
    if (out.ok) co_return 1;
    cur = out.value;
  }
  co_return 0;
}

task<std::int64_t> rl(Proc& p, mem::ObjId o) {
  LabelGuard g(p, "rl");
  mem::CasWord cur = (co_await p.read(o)).value;
  while (cur.context & ctx_bit(p.id)) {
    auto out = co_await p.cas(o, cur, {cur.val, cur.context & ~ctx_bit(p.id)});
    if (out.ok) co_return 1;
    cur = out.value;
  }
  co_return 1;
}

task<std::int64_t> load(Proc& p, mem::ObjId o) {
  LabelGuard g(p, "load");
  co_return static_cast<std::int64_t>((co_await p.read(o)).value.val);
}

task<std::int64_t> store(Proc& p, mem::ObjId o, std::uint64_t v) {
  LabelGuard g(p, "store");
  co_await p.write(o, mem::CasWord{v, 0});
  co_return 1;
}

RllscObject::RllscObject(int n, std::uint64_t vmax, std::uint64_t v0)
    : n_(n), vmax_(vmax), v0_(v0), spec_(seq::llsc_spec(n, vmax, v0)) {}

std::string RllscObject::name() const {
  return "rllsc(n=" + std::to_string(n_) + ",vmax=" + std::to_string(vmax_) +
         ",v0=" + std::to_string(v0_) + ")";
}

void RllscObject::allocate(mem::Memory& m) {
  x_ = m.alloc("X", mem::ObjKind::cas_cell, mem::CasWord{v0_, 0});
}

task<std::int64_t> RllscObject::run_op(Proc& p, seq::Op op) {
  switch (op.code) {
    case seq::llsc_op::ll:
    case seq::llsc_op::vl:
    case seq::llsc_op::sc:
    case seq::llsc_op::rl:
      if (op.proc != p.id)
        throw RoleViolation("link op issued by a different process than tagged");
      break;
    case seq::llsc_op::load:
    case seq::llsc_op::store:
      break;
    default:
      throw mem::EngineError("unknown llsc op");
  }
  switch (op.code) {
    case seq::llsc_op::ll: return ll(p, x_);
    case seq::llsc_op::vl: return vl(p, x_);
    case seq::llsc_op::sc:
      if (op.arg < 0 || static_cast<std::uint64_t>(op.arg) > vmax_)
        throw mem::EngineError("llsc value out of range");
      return sc(p, x_, static_cast<std::uint64_t>(op.arg));
    case seq::llsc_op::rl: return rl(p, x_);
    case seq::llsc_op::load: return load(p, x_);
    default:
      if (op.arg < 0 || static_cast<std::uint64_t>(op.arg) > vmax_)
        throw mem::EngineError("llsc value out of range");
      return store(p, x_, static_cast<std::uint64_t>(op.arg));
  }
}

std::optional<mem::MemorySnapshot> RllscObject::canonical(
    std::uint64_t q) const {
  std::uint64_t val = seq::llsc_op::state_val(q);
  std::uint64_t ctx = seq::llsc_op::state_ctx(q);
  if (val > vmax_ || ctx >= (std::uint64_t{1} << n_)) return std::nullopt;
  return mem::MemorySnapshot{
      mem::ObjState{mem::ObjKind::cas_cell, mem::CasWord{val, ctx}}};
}

std::unique_ptr<AlgorithmObject> make_rllsc(int n, std::uint64_t vmax,
                                            std::uint64_t v0) {
  return std::make_unique<RllscObject>(n, vmax, v0);
}

}  // namespace hi::rllsc
