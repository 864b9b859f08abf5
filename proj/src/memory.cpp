#include "hi/memory.hpp"

namespace hi::mem {

std::uint64_t pack_word(const CasWord& w) {
  if (w.val > kNativePayloadMask)
    throw EngineError("native payload exceeds 48 bits");
  if (w.context >> kNativeMaxProcs)
    throw EngineError("native context exceeds 16 processes");
  return (w.context << kNativePayloadBits) | w.val;
}

CasWord unpack_word(std::uint64_t bits) {
  return CasWord{bits & kNativePayloadMask, bits >> kNativePayloadBits};
}

ObjId Memory::alloc(std::string name, ObjKind kind, CasWord init) {
  if (sealed_) throw EngineError("alloc after scenario start: " + name);
  if (kind == ObjKind::binary_register) {
    if (init.val > 1 || init.context != 0)
      throw EngineError("binary register initial state out of domain: " + name);
  }
  ObjId id{size()};
  layout_.push_back(LayoutEntry{std::move(name), kind, init});
  on_alloc(layout_.back());
  return id;
}

void Memory::seal() { sealed_ = true; }

ObjId Memory::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (layout_[i].name == name) return ObjId{i};
  throw EngineError("no such object: " + name);
}

void Memory::check_access(const Access& a) const {
  if (!sealed_) throw EngineError("access before seal");
  if (a.obj.index < 0 || a.obj.index >= size())
    throw EngineError("access to unknown object");
  const LayoutEntry& e = layout_[a.obj.index];
  if (e.kind == ObjKind::binary_register) {
    if (a.kind == AccessKind::cas)
      throw EngineError("cas on binary register: " + e.name);
    if (a.kind == AccessKind::write && (a.arg0.val > 1 || a.arg0.context != 0))
      throw EngineError("binary register write out of domain: " + e.name);
  }
}

void EngineMemory::on_alloc(const LayoutEntry& e) {
  cells_.push_back(ObjState{e.kind, e.init});
}

void EngineMemory::reset() {
  for (int i = 0; i < size(); ++i) cells_[i] = ObjState{layout_[i].kind, layout_[i].init};
}

AccessOutcome EngineMemory::perform(const Access& a) {
  check_access(a);
  ObjState& cell = cells_[a.obj.index];
  switch (a.kind) {
    case AccessKind::read:
      return AccessOutcome{cell.w, false};
    case AccessKind::write:
      cell.w = a.arg0;
      return AccessOutcome{a.arg0, false};
    case AccessKind::cas: {
      AccessOutcome out{cell.w, cell.w == a.arg0};
      if (out.ok) cell.w = a.arg1;
      return out;
    }
  }
  throw EngineError("unreachable access kind");
}

NativeMemory::NativeMemory(int nprocs) : nprocs_(nprocs) {
  if (nprocs < 1 || nprocs > kNativeMaxProcs)
    throw EngineError("native mode supports 1..16 processes");
}

void NativeMemory::on_alloc(const LayoutEntry& e) {
  cells_.push_back(std::make_unique<std::atomic<std::uint64_t>>(pack_word(e.init)));
}

void NativeMemory::reset() {
  for (int i = 0; i < size(); ++i)
    cells_[i]->store(pack_word(layout_[i].init), std::memory_order_seq_cst);
}

AccessOutcome NativeMemory::perform(const Access& a) {
  check_access(a);
  std::atomic<std::uint64_t>& cell = *cells_[a.obj.index];
  switch (a.kind) {
    case AccessKind::read:
      return AccessOutcome{unpack_word(cell.load(std::memory_order_seq_cst)), false};
    case AccessKind::write:
      cell.store(pack_word(a.arg0), std::memory_order_seq_cst);
      return AccessOutcome{a.arg0, false};
    case AccessKind::cas: {
      std::uint64_t expected = pack_word(a.arg0);
      std::uint64_t desired = pack_word(a.arg1);
      std::uint64_t observed = expected;
      bool ok = cell.compare_exchange_strong(observed, desired,
                                             std::memory_order_seq_cst);
      return AccessOutcome{unpack_word(observed), ok};
    }
  }
  throw EngineError("unreachable access kind");
}

MemorySnapshot NativeMemory::snapshot() const {
  MemorySnapshot snap;
  snap.reserve(cells_.size());
  for (int i = 0; i < size(); ++i)
    snap.push_back(ObjState{layout_[i].kind,
                            unpack_word(cells_[i]->load(std::memory_order_seq_cst))});
  return snap;
}

}  // namespace hi::mem
