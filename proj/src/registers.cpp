#include "hi/registers.hpp"

#include <stdexcept>

namespace hi::regs {

namespace {

mem::MemorySnapshot one_hot(int n, int set_index) {
  mem::MemorySnapshot snap(static_cast<std::size_t>(n));
  if (set_index >= 0) snap[set_index].w.val = 1;
  return snap;
}

}  // namespace

ScanRegisterBase::ScanRegisterBase(int K, int v0)
    : K_(K), v0_(v0), spec_(seq::register_spec(K, v0)) {}

void ScanRegisterBase::allocate(mem::Memory& m) {
  A_.clear();
  for (int v = 1; v <= K_; ++v)
    A_.push_back(m.alloc("A[" + std::to_string(v) + "]",
                         mem::ObjKind::binary_register,
                         mem::CasWord{v == v0_ ? 1u : 0u, 0}));
}

task<std::int64_t> ScanRegisterBase::run_op(Proc& p, seq::Op op) {
  switch (op.code) {
    case seq::reg_op::write:
      if (p.id != 1) throw RoleViolation("register write by non-writer process");
      if (op.arg < 1 || op.arg > K_)
        throw mem::EngineError("register value out of range");
      return do_write(p, static_cast<int>(op.arg));
    case seq::reg_op::read:
      if (p.id != 2) throw RoleViolation("register read by non-reader process");
      return do_read(p);
    default:
      throw mem::EngineError("unknown register op");
  }
}

task<std::int64_t> ScanRegisterBase::try_read(Proc& p) {
  LabelGuard g(p, "tryread");
  int j = 0;
  for (int i = 1; i <= K_; ++i) {
    if ((co_await p.read(A(i))).value.val == 1) {
      j = i;
      break;
    }
  }
  if (j == 0) co_return 0;
  std::int64_t val = j;
  for (int i = j - 1; i >= 1; --i)
    if ((co_await p.read(A(i))).value.val == 1) val = i;
  co_return val;
}

std::string BaselineRegister::name() const {
  return "baseline_register(K=" + std::to_string(K_) +
         ",v0=" + std::to_string(v0_) + ")";
}

task<std::int64_t> BaselineRegister::do_write(Proc& p, int v) {
  co_await p.write(A(v), 1);
  for (int j = v - 1; j >= 1; --j) co_await p.write(A(j), 0);
  co_return seq::kAck;
}

task<std::int64_t> BaselineRegister::do_read(Proc& p) {
  int j = 0;
  for (int i = 1; i <= K_; ++i) {
    if ((co_await p.read(A(i))).value.val == 1) {
      j = i;
      break;
    }
  }
  if (j == 0) throw mem::EngineError("baseline read scan crossed no set cell");
  std::int64_t val = j;
  for (int i = j - 1; i >= 1; --i)
    if ((co_await p.read(A(i))).value.val == 1) val = i;
  co_return val;
}

std::string LockFreeRegister::name() const {
  return "lockfree_register(K=" + std::to_string(K_) +
         ",v0=" + std::to_string(v0_) + ")";
}

std::optional<mem::MemorySnapshot> LockFreeRegister::canonical(
    std::uint64_t q) const {
  if (q < 1 || q > static_cast<std::uint64_t>(K_)) return std::nullopt;
  return one_hot(K_, static_cast<int>(q) - 1);
}

task<std::int64_t> LockFreeRegister::do_write(Proc& p, int v) {
  co_await p.write(A(v), 1);
  for (int j = v - 1; j >= 1; --j) co_await p.write(A(j), 0);
  for (int j = v + 1; j <= K_; ++j) co_await p.write(A(j), 0);
  co_return seq::kAck;
}

task<std::int64_t> LockFreeRegister::do_read(Proc& p) {
  for (;;) {
    std::int64_t r = co_await try_read(p);
    if (r != 0) co_return r;
  }
}

HelpingRegister::HelpingRegister(int K, int v0)
    : ScanRegisterBase(K, v0), last_val_(v0) {}

std::string HelpingRegister::name() const {
  return "helping_register(K=" + std::to_string(K_) +
         ",v0=" + std::to_string(v0_) + ")";
}

void HelpingRegister::allocate(mem::Memory& m) {
  ScanRegisterBase::allocate(m);
  B_.clear();
  for (int v = 1; v <= K_; ++v)
    B_.push_back(m.alloc("B[" + std::to_string(v) + "]",
                         mem::ObjKind::binary_register, mem::CasWord{}));
  f1_ = m.alloc("flag[1]", mem::ObjKind::binary_register, mem::CasWord{});
  f2_ = m.alloc("flag[2]", mem::ObjKind::binary_register, mem::CasWord{});
}

std::optional<mem::MemorySnapshot> HelpingRegister::canonical(
    std::uint64_t q) const {
  if (q < 1 || q > static_cast<std::uint64_t>(K_)) return std::nullopt;
  return one_hot(2 * K_ + 2, static_cast<int>(q) - 1);
}

task<std::int64_t> HelpingRegister::do_read(Proc& p) {
  {
    LabelGuard g(p, "flag");
    co_await p.write(f1_, 1);
  }
  std::int64_t val = co_await try_read(p);
  if (val == 0) val = co_await try_read(p);
  if (val == 0) {
    LabelGuard g(p, "bscan");
    for (int j = 1; j <= K_; ++j)
      if ((co_await p.read(B(j))).value.val == 1) val = j;
  }
  if (val == 0) throw mem::EngineError("helped read crossed no set cell");
  {
    LabelGuard g(p, "flag");
    co_await p.write(f2_, 1);
  }
  {
    LabelGuard g(p, "bclear");
    for (int j = 1; j <= K_; ++j) co_await p.write(B(j), 0);
  }
  {
    LabelGuard g(p, "flag");
    co_await p.write(f1_, 0);
    co_await p.write(f2_, 0);
  }
  co_return val;
}

task<std::int64_t> HelpingRegister::do_write(Proc& p, int v) {
  bool b_empty = true;
  {
    LabelGuard g(p, "bcheck");
    for (int j = 1; j <= K_; ++j) {
      if ((co_await p.read(B(j))).value.val == 1) {
        b_empty = false;
        break;
      }
    }
  }
  if (b_empty && (co_await p.read(f1_)).value.val == 1) {
    {
      LabelGuard g(p, "help");
      co_await p.write(B(last_val_), 1);
    }
    bool undo = (co_await p.read(f2_)).value.val == 1;
    if (!undo) undo = (co_await p.read(f1_)).value.val == 0;
    if (undo) {
      LabelGuard g(p, "unhelp");
      co_await p.write(B(last_val_), 0);
    }
  }
  co_await p.write(A(v), 1);
  for (int j = v - 1; j >= 1; --j) co_await p.write(A(j), 0);
  for (int j = v + 1; j <= K_; ++j) co_await p.write(A(j), 0);
  last_val_ = v;
  co_return seq::kAck;
}

MaxRegister::MaxRegister(int K, int v0)
    : K_(K), v0_(v0), cur_(v0), spec_(seq::max_register_spec(K, v0)) {}

std::string MaxRegister::name() const {
  return "max_register(K=" + std::to_string(K_) + ",v0=" + std::to_string(v0_) +
         ")";
}

void MaxRegister::allocate(mem::Memory& m) {
  A_.clear();
  for (int v = 1; v <= K_; ++v)
    A_.push_back(m.alloc("A[" + std::to_string(v) + "]",
                         mem::ObjKind::binary_register,
                         mem::CasWord{v == v0_ ? 1u : 0u, 0}));
}

task<std::int64_t> MaxRegister::run_op(Proc& p, seq::Op op) {
  switch (op.code) {
    case seq::reg_op::write:
      if (p.id != 1) throw RoleViolation("register write by non-writer process");
      if (op.arg < 1 || op.arg > K_)
        throw mem::EngineError("register value out of range");
      return do_write(p, static_cast<int>(op.arg));
    case seq::reg_op::read:
      if (p.id != 2) throw RoleViolation("register read by non-reader process");
      return do_read(p);
    default:
      throw mem::EngineError("unknown register op");
  }
}

std::optional<mem::MemorySnapshot> MaxRegister::canonical(
    std::uint64_t q) const {
  if (q < 1 || q > static_cast<std::uint64_t>(K_)) return std::nullopt;
  return one_hot(K_, static_cast<int>(q) - 1);
}

task<std::int64_t> MaxRegister::do_write(Proc& p, int v) {
  if (v <= cur_) co_return seq::kAck;
  int old = cur_;
  co_await p.write(A(v), 1);
  co_await p.write(A(old), 0);
  cur_ = v;
  co_return seq::kAck;
}

task<std::int64_t> MaxRegister::do_read(Proc& p) {
  // Set cells only ever move upward, and a write raises the new cell before
  // clearing the old one, so an upward scan that keeps the last set index it
  // crossed always crosses at least one. A downward scan would race the
  // moving cell.
  int seen = 0;
  for (int j = 1; j <= K_; ++j)
    if ((co_await p.read(A(j))).value.val == 1) seen = j;
  if (seen == 0)
    throw mem::EngineError("max-register read scan crossed no set cell");
  co_return seen;
}

BitSet::BitSet(int t, int nprocs)
    : t_(t), nprocs_(nprocs), spec_(seq::hi_set_spec(t)) {
  if (nprocs < 1) throw mem::EngineError("set needs at least one process");
}

std::string BitSet::name() const {
  return "bit_set(t=" + std::to_string(t_) + ")";
}

void BitSet::allocate(mem::Memory& m) {
  S_.clear();
  for (int i = 1; i <= t_; ++i)
    S_.push_back(m.alloc("S[" + std::to_string(i) + "]",
                         mem::ObjKind::binary_register, mem::CasWord{}));
}

task<std::int64_t> BitSet::run_op(Proc& p, seq::Op op) {
  if (op.arg < 1 || op.arg > t_)
    throw mem::EngineError("set element out of range");
  int i = static_cast<int>(op.arg);
  switch (op.code) {
    case seq::set_op::insert: return do_insert(p, i);
    case seq::set_op::remove: return do_remove(p, i);
    case seq::set_op::lookup: return do_lookup(p, i);
    default: throw mem::EngineError("unknown set op");
  }
}

std::optional<mem::MemorySnapshot> BitSet::canonical(std::uint64_t q) const {
  if (q >= (std::uint64_t{1} << t_)) return std::nullopt;
  mem::MemorySnapshot snap(static_cast<std::size_t>(t_));
  for (int i = 0; i < t_; ++i) snap[i].w.val = (q >> i) & 1;
  return snap;
}

task<std::int64_t> BitSet::do_insert(Proc& p, int i) {
  co_await p.write(S(i), 1);
  co_return seq::set_op::success;
}

task<std::int64_t> BitSet::do_remove(Proc& p, int i) {
  co_await p.write(S(i), 0);
  co_return seq::set_op::success;
}

task<std::int64_t> BitSet::do_lookup(Proc& p, int i) {
  co_return static_cast<std::int64_t>((co_await p.read(S(i))).value.val);
}

std::unique_ptr<AlgorithmObject> make_baseline_register(int K, int v0) {
  return std::make_unique<BaselineRegister>(K, v0);
}
std::unique_ptr<AlgorithmObject> make_lockfree_register(int K, int v0) {
  return std::make_unique<LockFreeRegister>(K, v0);
}
std::unique_ptr<AlgorithmObject> make_helping_register(int K, int v0) {
  return std::make_unique<HelpingRegister>(K, v0);
}
std::unique_ptr<AlgorithmObject> make_max_register(int K, int v0) {
  return std::make_unique<MaxRegister>(K, v0);
}
std::unique_ptr<AlgorithmObject> make_bit_set(int t, int nprocs) {
  return std::make_unique<BitSet>(t, nprocs);
}

}  // namespace hi::regs
