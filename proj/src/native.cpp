#include "hi/native.hpp"

#include <barrier>
#include <thread>

namespace hi::nat {

namespace {

std::int64_t drive_op(AlgorithmObject& obj, mem::Memory& m, Proc& p,
                      const NativeOptions& opt, seq::Op op) {
  task<std::int64_t> t = obj.run_op(p, op);
  p.cur = Side::main;
  t.start();
  bool sectioned = false;
  int lr = 0;
  int rr = 0;
  while (!t.done()) {
    Side s = Side::main;
    if (p.in_section) {
      if (!sectioned) {
        sectioned = true;
        lr = rr = 0;
      }
      bool l = p.has_pending(Side::left);
      bool r = p.has_pending(Side::right);
      if (l && r) {
        if (lr * opt.right_ratio <= rr * opt.left_ratio) {
          s = Side::left;
          ++lr;
        } else {
          s = Side::right;
          ++rr;
        }
      } else {
        s = l ? Side::left : Side::right;
      }
    } else {
      sectioned = false;
    }
    PendingStep st = p.take_pending(s);
    mem::AccessOutcome out = m.perform(st.acc);
    *st.out = out;
    p.cur = s;
    st.k.resume();
  }
  return t.result();
}

}  // namespace

NativeRun run_native(AlgorithmObject& obj,
                     const std::vector<std::vector<seq::Op>>& programs,
                     const NativeOptions& opt) {
  int n = obj.num_procs();
  if (static_cast<int>(programs.size()) != n)
    throw mem::EngineError("native run needs one program per process");
  if (opt.left_ratio < 1 || opt.right_ratio < 1)
    throw mem::EngineError("section ratios must be positive");
  mem::NativeMemory m(n);
  obj.allocate(m);
  m.seal();
  obj.reset_local();

  NativeRun out;
  out.responses.resize(n);
  std::barrier sync(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (int i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      Proc p;
      p.id = i + 1;
      sync.arrive_and_wait();
      try {
        for (const seq::Op& op : programs[i])
          out.responses[i].emplace_back(op, drive_op(obj, m, p, opt, op));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : out.responses) out.ops += r.size();
  out.final_memory = m.snapshot();
  return out;
}

}  // namespace hi::nat
