#pragma once

#include <memory>
#include <vector>

#include "hi/engine.hpp"
#include "hi/rllsc.hpp"

namespace hi::uni {

// Word layouts. The head cell holds the abstract state plus an optional
// (response, invoker) pair left by the last state transition; the canonical
// head word for state q is just q. Announce cells hold nothing (0), a tagged
// op, or a tagged response.
inline constexpr int kStateBits = 20;
inline constexpr int kRspBits = 16;
inline constexpr std::uint64_t kStateMask = (std::uint64_t{1} << kStateBits) - 1;

inline std::uint64_t head_pack(std::uint64_t q) { return q; }
inline std::uint64_t head_pack(std::uint64_t q, std::int64_t rsp, int invoker) {
  return q | (std::uint64_t{1} << kStateBits) |
         (static_cast<std::uint64_t>(rsp) << (kStateBits + 1)) |
         (static_cast<std::uint64_t>(invoker) << (kStateBits + 1 + kRspBits));
}

struct HeadView {
  std::uint64_t q = 0;
  bool has_r = false;
  std::int64_t rsp = 0;
  int invoker = 0;
};

inline HeadView head_view(std::uint64_t w) {
  HeadView h;
  h.q = w & kStateMask;
  h.has_r = (w >> kStateBits) & 1;
  h.rsp = static_cast<std::int64_t>((w >> (kStateBits + 1)) &
                                    ((std::uint64_t{1} << kRspBits) - 1));
  h.invoker = static_cast<int>(w >> (kStateBits + 1 + kRspBits));
  return h;
}

enum AnnTag { ann_bottom = 0, ann_op = 1, ann_rsp = 2 };

inline int ann_tag(std::uint64_t w) { return static_cast<int>(w & 3); }
inline std::uint64_t ann_pack_op(const seq::Op& o) {
  return ann_op | (static_cast<std::uint64_t>(o.code) << 2) |
         (static_cast<std::uint64_t>(o.arg) << 10);
}
inline std::uint64_t ann_pack_rsp(std::int64_t r) {
  return ann_rsp | (static_cast<std::uint64_t>(r) << 2);
}
inline seq::Op ann_unpack_op(std::uint64_t w) {
  return seq::Op{static_cast<int>((w >> 2) & 0xff),
                 static_cast<std::int64_t>((w >> 10) & 0xffffffffull), 0};
}
inline std::int64_t ann_unpack_rsp(std::uint64_t w) {
  return static_cast<std::int64_t>((w >> 2) & 0xffffffffull);
}

// Wait-free universal construction over releasable LL/SC cells: a head cell
// carrying the state and n announce cells for op hand-off. State-changing
// ops go through the announce/help protocol; read-only ops apply a single
// head load and write nothing, so only state-changing ops ever leave a
// footprint (`apply_all` forces everything through the full protocol).
class Universal final : public AlgorithmObject {
 public:
  Universal(seq::SpecPtr spec, int n, bool apply_all = false);

  std::string name() const override;
  int num_procs() const override { return n_; }
  void allocate(mem::Memory& m) override;
  void reset_local() override;
  task<std::int64_t> run_op(Proc& p, seq::Op op) override;
  const seq::SequentialSpec& spec() const override { return *spec_; }
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

  mem::ObjId head() const { return head_; }
  mem::ObjId announce(int proc) const { return ann_.at(proc - 1); }
  int priority_of(int proc) const { return priority_.at(proc - 1); }
  bool applies_everything() const { return apply_all_; }

  // The op must be read-only; the full protocol is never entered.
  task<std::int64_t> run_read_only(Proc& p, seq::Op op);

 private:
  task<std::int64_t> apply(Proc& p, seq::Op op);
  task<std::int64_t> apply_read_only(Proc& p, seq::Op op);
  task<std::int64_t> poll_own_rsp(Proc& p, mem::ObjId own);
  task<std::int64_t> poll_own_rsp_then_rl(Proc& p, mem::ObjId own,
                                          mem::ObjId helped);
  task<std::int64_t> poll_head_not_mine(Proc& p, int i);

  seq::SpecPtr spec_;
  int n_;
  bool apply_all_;
  mem::ObjId head_;
  std::vector<mem::ObjId> ann_;
  std::vector<int> priority_;
};

std::unique_ptr<Universal> make_universal(seq::SpecPtr spec, int n,
                                          bool apply_all = false);

// Decodes the head cell of a snapshot taken from a Universal layout.
HeadView head_state(const mem::MemorySnapshot& snap);

// Structural facts checked over an execution of a Universal object:
//  - successful head swaps alternate between installing a transition record
//    and clearing it, and only installing swaps move the state,
//  - every completed full-protocol op is served by exactly one transition,
//    inside its own invocation window, with the response the op returned,
//  - the chain of transitions replays the sequential spec from the initial
//    state,
//  - announce cells only cycle bottom -> op -> response -> bottom.
struct UniversalAudit {
  bool ok = true;
  std::string detail;  // first failed fact, empty when ok
  int transitions = 0;
  // State after the last audited transition; the head's final value when ok.
  std::uint64_t final_q = 0;
};
UniversalAudit audit_universal(const Universal& u, const Execution& e);

}  // namespace hi::uni
