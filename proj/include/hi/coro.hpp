#pragma once

#include <cassert>
#include <coroutine>
#include <exception>
#include <optional>
#include <utility>
#include <vector>

#include "hi/memory.hpp"

namespace hi {

// Which strand of a process is executing. Operations run on `main`; inside a
// two-sided interleaved block the strands are `left` and `right`.
enum class Side : std::uint8_t { main = 0, left = 1, right = 2 };

inline const char* side_name(Side s) {
  switch (s) {
    case Side::main: return "M";
    case Side::left: return "L";
    case Side::right: return "R";
  }
  return "?";
}

struct PendingStep {
  mem::Access acc{};
  std::coroutine_handle<> k{};
  mem::AccessOutcome* out = nullptr;
  const char* label = "";
};

// Per-process execution context. An algorithm coroutine suspends at every
// shared-memory access; the pending access sits in `pend[side]` until a
// driver (engine scheduler or native runner) performs it and resumes.
class Proc {
 public:
  int id = 0;  // 1-based
  Side cur = Side::main;
  bool in_section = false;
  std::optional<PendingStep> pend[3];

  const char* label() const { return labels_.empty() ? "" : labels_.back(); }
  void push_label(const char* l) { labels_.push_back(l); }
  void pop_label() { labels_.pop_back(); }

  bool has_pending(Side s) const { return pend[static_cast<int>(s)].has_value(); }
  PendingStep take_pending(Side s) {
    auto& slot = pend[static_cast<int>(s)];
    assert(slot.has_value());
    PendingStep st = *slot;
    slot.reset();
    return st;
  }
  void drop_pending(Side s) { pend[static_cast<int>(s)].reset(); }

  struct AccessAwaiter {
    Proc* p;
    mem::Access acc;
    mem::AccessOutcome out{};

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> k) {
      auto& slot = p->pend[static_cast<int>(p->cur)];
      assert(!slot.has_value());
      slot = PendingStep{acc, k, &out, p->label()};
    }
    mem::AccessOutcome await_resume() const noexcept { return out; }
  };

  AccessAwaiter read(mem::ObjId o) {
    return AccessAwaiter{this, mem::Access{o, mem::AccessKind::read}};
  }
  AccessAwaiter write(mem::ObjId o, mem::CasWord v) {
    return AccessAwaiter{this, mem::Access{o, mem::AccessKind::write, v}};
  }
  AccessAwaiter write(mem::ObjId o, std::uint64_t v) {
    return write(o, mem::CasWord{v, 0});
  }
  AccessAwaiter cas(mem::ObjId o, mem::CasWord expect, mem::CasWord desired) {
    return AccessAwaiter{this, mem::Access{o, mem::AccessKind::cas, expect, desired}};
  }

 private:
  std::vector<const char*> labels_;
};

// Scoped sub-operation tag; shows up on step records for trace checks.
class LabelGuard {
 public:
  LabelGuard(Proc& p, const char* l) : p_(&p) { p_->push_label(l); }
  ~LabelGuard() { p_->pop_label(); }
  LabelGuard(const LabelGuard&) = delete;
  LabelGuard& operator=(const LabelGuard&) = delete;

 private:
  Proc* p_;
};

// Lazily started coroutine with continuation chaining. Nested awaits bubble
// their access suspensions up to the driver; completion resumes the awaiter
// by symmetric transfer.
template <typename T>
class [[nodiscard]] task {
 public:
  struct promise_type {
    std::optional<T> value;
    std::exception_ptr error;
    std::coroutine_handle<> cont;

    task get_return_object() {
      return task(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    struct FinalAwaiter {
      bool await_ready() const noexcept { return false; }
      std::coroutine_handle<> await_suspend(
          std::coroutine_handle<promise_type> h) noexcept {
        auto c = h.promise().cont;
        return c ? c : std::noop_coroutine();
      }
      void await_resume() const noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_value(T v) { value = std::move(v); }
    void unhandled_exception() { error = std::current_exception(); }
  };

  task() = default;
  explicit task(std::coroutine_handle<promise_type> h) : h_(h) {}
  task(task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  task& operator=(task&& o) noexcept {
    if (this != &o) {
      destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  task(const task&) = delete;
  task& operator=(const task&) = delete;
  ~task() { destroy(); }

  bool valid() const { return static_cast<bool>(h_); }
  bool done() const { return h_ && h_.done(); }
  void set_continuation(std::coroutine_handle<> c) { h_.promise().cont = c; }
  void start() { h_.resume(); }

  T result() {
    auto& p = h_.promise();
    if (p.error) std::rethrow_exception(p.error);
    return std::move(*p.value);
  }

  auto operator co_await() && noexcept {
    struct Awaiter {
      std::coroutine_handle<promise_type> h;
      bool await_ready() const noexcept { return h.done(); }
      std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) noexcept {
        h.promise().cont = parent;
        return h;
      }
      T await_resume() {
        auto& p = h.promise();
        if (p.error) std::rethrow_exception(p.error);
        return std::move(*p.value);
      }
    };
    return Awaiter{h_};
  }

 private:
  void destroy() {
    if (h_) {
      h_.destroy();
      h_ = {};
    }
  }
  std::coroutine_handle<promise_type> h_;
};

template <typename L, typename R>
struct SectionOutcome {
  bool left_done = false;
  std::optional<L> left;
  std::optional<R> right;
};

// Two-sided interleaved block. Both strands start immediately and each
// engine step advances the strand the scheduler picks; the block resolves
// when either strand's program completes, abandoning the other strand at its
// current suspension point with no further memory steps.
template <typename L, typename R>
struct SectionAwaiter {
  Proc* p;
  task<L> lt;
  task<R> rt;

  bool await_ready() const noexcept { return false; }

  void await_suspend(std::coroutine_handle<> main) {
    lt.set_continuation(main);
    rt.set_continuation(main);
    p->in_section = true;
    p->cur = Side::left;
    lt.start();
    assert(!lt.done() && p->has_pending(Side::left));
    p->cur = Side::right;
    rt.start();
    assert(!rt.done() && p->has_pending(Side::right));
  }

  SectionOutcome<L, R> await_resume() {
    p->in_section = false;
    p->cur = Side::main;
    SectionOutcome<L, R> out;
    if (lt.done() && !rt.done()) {
      p->drop_pending(Side::right);
      out.left_done = true;
      out.left = lt.result();
    } else {
      assert(rt.done() && !lt.done());
      p->drop_pending(Side::left);
      out.left_done = false;
      out.right = rt.result();
    }
    return out;
  }
};

template <typename L, typename R>
SectionAwaiter<L, R> section(Proc& p, task<L> lt, task<R> rt) {
  assert(!p.in_section);
  return SectionAwaiter<L, R>{&p, std::move(lt), std::move(rt)};
}

}  // namespace hi
