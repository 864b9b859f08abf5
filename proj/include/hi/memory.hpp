#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hi::mem {

class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

enum class ObjKind : std::uint8_t { binary_register, cas_cell };

// One shared word. Binary registers use val in {0,1} and context == 0.
// CAS cells carry a payload plus one context bit per process (bit i-1 for
// process i). Equality is structural over both fields.
struct CasWord {
  std::uint64_t val = 0;
  std::uint64_t context = 0;

  friend bool operator==(const CasWord&, const CasWord&) = default;
};

struct ObjId {
  int index = -1;
  bool valid() const { return index >= 0; }
  friend bool operator==(const ObjId&, const ObjId&) = default;
};

struct ObjState {
  ObjKind kind = ObjKind::binary_register;
  CasWord w{};

  friend bool operator==(const ObjState&, const ObjState&) = default;
};

// Per-step observable memory: the state of every base object, no local state.
using MemorySnapshot = std::vector<ObjState>;

enum class AccessKind : std::uint8_t { read, write, cas };

struct Access {
  ObjId obj{};
  AccessKind kind = AccessKind::read;
  CasWord arg0{};  // write: new word; cas: expected word
  CasWord arg1{};  // cas: desired word
};

struct AccessOutcome {
  CasWord value{};  // read: word read; cas: word observed before the swap
  bool ok = false;  // cas: whether the swap happened
};

struct LayoutEntry {
  std::string name;
  ObjKind kind;
  CasWord init;
};

// Native packing: context bits sit above a 48-bit payload, in process-index
// order (process i owns bit 48 + i - 1). At most 16 processes.
inline constexpr int kNativePayloadBits = 48;
inline constexpr int kNativeMaxProcs = 16;
inline constexpr std::uint64_t kNativePayloadMask =
    (std::uint64_t{1} << kNativePayloadBits) - 1;

std::uint64_t pack_word(const CasWord& w);
CasWord unpack_word(std::uint64_t bits);

// Fixed-layout shared memory. All objects are allocated before the first
// access; allocation after seal() is an error. reset() restores every object
// to its initial state so a machine set can be re-run from scratch.
class Memory {
 public:
  virtual ~Memory() = default;

  ObjId alloc(std::string name, ObjKind kind, CasWord init);
  void seal();
  bool sealed() const { return sealed_; }

  int size() const { return static_cast<int>(layout_.size()); }
  const LayoutEntry& entry(int index) const { return layout_.at(index); }
  const std::vector<LayoutEntry>& layout() const { return layout_; }
  ObjId find(const std::string& name) const;

  virtual AccessOutcome perform(const Access& a) = 0;
  virtual MemorySnapshot snapshot() const = 0;
  virtual void reset() = 0;

 protected:
  void check_access(const Access& a) const;
  virtual void on_alloc(const LayoutEntry& e) = 0;

  std::vector<LayoutEntry> layout_;
  bool sealed_ = false;
};

// Deterministic single-threaded backing store for engine mode.
class EngineMemory final : public Memory {
 public:
  AccessOutcome perform(const Access& a) override;
  MemorySnapshot snapshot() const override { return cells_; }
  void reset() override;

  const ObjState& peek(ObjId o) const { return cells_.at(o.index); }

 protected:
  void on_alloc(const LayoutEntry& e) override;

 private:
  MemorySnapshot cells_;
};

// One atomic word per object; accesses map to seq_cst hardware atomics.
// snapshot() is only meaningful while no other thread is accessing memory.
class NativeMemory final : public Memory {
 public:
  explicit NativeMemory(int nprocs);

  AccessOutcome perform(const Access& a) override;
  MemorySnapshot snapshot() const override;
  void reset() override;

 protected:
  void on_alloc(const LayoutEntry& e) override;

 private:
  int nprocs_;
  std::vector<std::unique_ptr<std::atomic<std::uint64_t>>> cells_;
};

}  // namespace hi::mem
