#pragma once

#include <memory>

#include "hi/engine.hpp"

namespace hi::rllsc {

inline std::uint64_t ctx_bit(int proc) { return std::uint64_t{1} << (proc - 1); }

// Releasable LL/SC primitives over one cas cell. Process p marks its link by
// setting context bit p-1; a successful sc or a store clears every mark, and
// rl withdraws just p's own mark. Each primitive's accesses carry its name as
// the step label.
task<std::int64_t> ll(Proc& p, mem::ObjId o);  // returns the value linked to
task<std::int64_t> vl(Proc& p, mem::ObjId o);  // 1 iff p is still linked
task<std::int64_t> sc(Proc& p, mem::ObjId o, std::uint64_t v);  // 1 on success
task<std::int64_t> rl(Proc& p, mem::ObjId o);  // always 1
task<std::int64_t> load(Proc& p, mem::ObjId o);
task<std::int64_t> store(Proc& p, mem::ObjId o, std::uint64_t v);  // always 1

// A standalone cell driven through the ops of its sequential spec. The cell
// word is the abstract state at every step: (value, link marks).
class RllscObject final : public AlgorithmObject {
 public:
  RllscObject(int n, std::uint64_t vmax, std::uint64_t v0);

  std::string name() const override;
  int num_procs() const override { return n_; }
  void allocate(mem::Memory& m) override;
  task<std::int64_t> run_op(Proc& p, seq::Op op) override;
  const seq::SequentialSpec& spec() const override { return *spec_; }
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

  mem::ObjId cell() const { return x_; }

 private:
  int n_;
  std::uint64_t vmax_;
  std::uint64_t v0_;
  seq::SpecPtr spec_;
  mem::ObjId x_;
};

std::unique_ptr<AlgorithmObject> make_rllsc(int n, std::uint64_t vmax,
                                            std::uint64_t v0);

}  // namespace hi::rllsc
