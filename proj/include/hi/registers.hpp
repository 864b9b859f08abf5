#pragma once

#include <memory>
#include <vector>

#include "hi/engine.hpp"

namespace hi::regs {

// Family of K-valued single-writer single-reader registers built from binary
// cells A[1..K]; value v is represented by A[v] = 1. Process 1 is the writer,
// process 2 the reader; an op issued by the wrong process is a RoleViolation.
class ScanRegisterBase : public AlgorithmObject {
 public:
  ScanRegisterBase(int K, int v0);

  int num_procs() const override { return 2; }
  void allocate(mem::Memory& m) override;
  const seq::SequentialSpec& spec() const override { return *spec_; }
  task<std::int64_t> run_op(Proc& p, seq::Op op) override;

  int values() const { return K_; }
  int initial_value() const { return v0_; }

 protected:
  mem::ObjId A(int v) const { return A_.at(v - 1); }

  // One bounded scan over A: up to the first set cell, then back down keeping
  // the lowest set cell seen. Returns 0 when the scan crossed no set cell.
  task<std::int64_t> try_read(Proc& p);

  virtual task<std::int64_t> do_write(Proc& p, int v) = 0;
  virtual task<std::int64_t> do_read(Proc& p) = 0;

  int K_;
  int v0_;
  seq::SpecPtr spec_;
  std::vector<mem::ObjId> A_;
};

// Set A[v], then clear only downward. Wait-free on both sides (a read takes
// at most 2K-1 steps) but stale set cells above the current value survive, so
// the memory remembers past writes.
class BaselineRegister final : public ScanRegisterBase {
 public:
  using ScanRegisterBase::ScanRegisterBase;
  std::string name() const override;

  static int read_step_bound(int K) { return 2 * K - 1; }

 protected:
  task<std::int64_t> do_write(Proc& p, int v) override;
  task<std::int64_t> do_read(Proc& p) override;
};

// Set A[v], clear downward, then clear upward: after a write only A[v] is
// set. Readers retry the scan until it crosses a set cell, so reads are
// lock-free but can starve under a steady stream of writes.
class LockFreeRegister final : public ScanRegisterBase {
 public:
  using ScanRegisterBase::ScanRegisterBase;
  std::string name() const override;
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

  static int write_steps(int K) { return K; }

 protected:
  task<std::int64_t> do_write(Proc& p, int v) override;
  task<std::int64_t> do_read(Proc& p) override;
};

// Wait-free variant: a reader that fails two scans is handed the value by the
// writer through a side array B guarded by two flags. All helper state is
// cleared before the read returns, so quiescent memory is again canonical.
class HelpingRegister final : public ScanRegisterBase {
 public:
  HelpingRegister(int K, int v0);
  std::string name() const override;
  void allocate(mem::Memory& m) override;
  void reset_local() override { last_val_ = v0_; }
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

  static int read_step_bound(int K) { return 6 * K + 8; }
  static int write_step_bound(int K) { return 2 * K + 7; }

 protected:
  task<std::int64_t> do_write(Proc& p, int v) override;
  task<std::int64_t> do_read(Proc& p) override;

 private:
  mem::ObjId B(int v) const { return B_.at(v - 1); }

  std::vector<mem::ObjId> B_;
  mem::ObjId f1_;
  mem::ObjId f2_;
  int last_val_;
};

// Max-register over [1,K]: writes not above the running maximum touch no
// shared cell, so only effective writes take steps (set the new cell, clear
// the old one). Reads scan upward and return the last set cell crossed.
class MaxRegister final : public AlgorithmObject {
 public:
  MaxRegister(int K, int v0);

  std::string name() const override;
  int num_procs() const override { return 2; }
  void allocate(mem::Memory& m) override;
  void reset_local() override { cur_ = v0_; }
  task<std::int64_t> run_op(Proc& p, seq::Op op) override;
  const seq::SequentialSpec& spec() const override { return *spec_; }
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

 private:
  mem::ObjId A(int v) const { return A_.at(v - 1); }
  task<std::int64_t> do_write(Proc& p, int v);
  task<std::int64_t> do_read(Proc& p);

  int K_;
  int v0_;
  int cur_;
  seq::SpecPtr spec_;
  std::vector<mem::ObjId> A_;
};

// Set over [1,t] with one binary cell per element. Every operation is a
// single shared access, so the memory equals the canonical form after every
// step. Any process may issue any op.
class BitSet final : public AlgorithmObject {
 public:
  explicit BitSet(int t, int nprocs = 2);

  std::string name() const override;
  int num_procs() const override { return nprocs_; }
  void allocate(mem::Memory& m) override;
  task<std::int64_t> run_op(Proc& p, seq::Op op) override;
  const seq::SequentialSpec& spec() const override { return *spec_; }
  std::optional<mem::MemorySnapshot> canonical(std::uint64_t q) const override;

 private:
  mem::ObjId S(int i) const { return S_.at(i - 1); }
  task<std::int64_t> do_insert(Proc& p, int i);
  task<std::int64_t> do_remove(Proc& p, int i);
  task<std::int64_t> do_lookup(Proc& p, int i);

  int t_;
  int nprocs_;
  seq::SpecPtr spec_;
  std::vector<mem::ObjId> S_;
};

std::unique_ptr<AlgorithmObject> make_baseline_register(int K, int v0);
std::unique_ptr<AlgorithmObject> make_lockfree_register(int K, int v0);
std::unique_ptr<AlgorithmObject> make_helping_register(int K, int v0);
std::unique_ptr<AlgorithmObject> make_max_register(int K, int v0);
std::unique_ptr<AlgorithmObject> make_bit_set(int t, int nprocs = 2);

}  // namespace hi::regs
