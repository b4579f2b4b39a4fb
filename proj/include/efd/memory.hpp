#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "efd/value.hpp"

namespace efd {

// Interned symbolic name. Id 0 is the empty label.
class Label {
 public:
  Label() = default;
  explicit Label(std::string_view name);
  const std::string& name() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }
  friend bool operator==(Label, Label) = default;

 private:
  std::uint32_t id_ = 0;
};

// A register name plus up to three index components (absent components are -1).
// Single-index registers model arrays such as R_1..R_n; the extra components
// address per-instance families like DEC[j][l].
struct RegisterId {
  Label name;
  std::array<std::int64_t, 3> index{-1, -1, -1};

  RegisterId() = default;
  explicit RegisterId(Label l) : name(l) {}
  RegisterId(Label l, std::int64_t i) : name(l), index{i, -1, -1} {}
  RegisterId(Label l, std::int64_t i, std::int64_t j) : name(l), index{i, j, -1} {}
  RegisterId(Label l, std::int64_t i, std::int64_t j, std::int64_t k) : name(l), index{i, j, k} {}

  bool valid() const { return !name.empty(); }
  std::int64_t first() const { return index[0]; }
  std::string str() const;
  static RegisterId parse(std::string_view text);

  friend bool operator==(const RegisterId&, const RegisterId&) = default;
};

struct RegisterIdHash {
  std::size_t operator()(const RegisterId& r) const {
    std::uint64_t h = mix64(r.name.id(), static_cast<std::uint64_t>(r.index[0]));
    h = mix64(h, static_cast<std::uint64_t>(r.index[1]));
    return mix64(h, static_cast<std::uint64_t>(r.index[2]));
  }
};

class MemoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AllocationRecord {
  Label name;
  std::int64_t count = 0;  // -1 for an unbounded family
  Value init;
};

class MemoryStore {
 public:
  // Allocates name[0..count-1], each holding init.
  std::vector<RegisterId> allocate(std::string_view name, std::size_t count, Value init = {});
  // Allocates every register with this name regardless of index (per-instance
  // registers whose index range is not known up front).
  void allocate_family(std::string_view name, Value init = {});

  bool is_allocated(const RegisterId& r) const;
  const Value& read(const RegisterId& r) const;
  void write(const RegisterId& r, Value v);
  // One read per register in list order.
  std::vector<Value> collect(const std::vector<RegisterId>& regs) const;

  const std::vector<AllocationRecord>& allocation_log() const { return log_; }
  std::size_t written_count() const { return cells_.size(); }

 private:
  const Value* family_init(Label l) const;

  std::unordered_map<RegisterId, Value, RegisterIdHash> cells_;
  std::unordered_map<std::uint32_t, Value> families_;
  std::vector<AllocationRecord> log_;
};

}  // namespace efd
