#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace efd {

enum class Role : std::uint8_t { C, S };

struct ProcessId {
  Role role = Role::C;
  int index = 0;  // 1-based

  friend bool operator==(const ProcessId&, const ProcessId&) = default;
  friend auto operator<=>(const ProcessId&, const ProcessId&) = default;
};

inline ProcessId cproc(int i) { return {Role::C, i}; }
inline ProcessId sproc(int i) { return {Role::S, i}; }
std::string to_string(ProcessId p);

// Deterministic 64-bit mixing used for digests and counter-based randomness.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

class Hasher {
 public:
  Hasher& add(std::uint64_t x) {
    h_ = mix64(h_, x);
    return *this;
  }
  Hasher& add_str(std::string_view s);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0x5eed;
};

// Opaque immutable payload: automaton states and composite register contents.
class Blob {
 public:
  virtual ~Blob() = default;
  virtual bool equals(const Blob& other) const = 0;
  virtual std::uint64_t digest() const = 0;
};

struct Bottom {
  friend bool operator==(Bottom, Bottom) { return true; }
};

class Value {
 public:
  using Tuple = std::vector<Value>;

  Value() = default;
  Value(std::int64_t i) : v_(i) {}  // NOLINT(google-explicit-constructor)
  Value(int i) : v_(std::int64_t{i}) {}  // NOLINT(google-explicit-constructor)
  Value(ProcessId p) : v_(p) {}  // NOLINT(google-explicit-constructor)
  Value(bool) = delete;

  static Value bottom() { return {}; }
  static Value tuple(Tuple items);
  static Value blob(std::shared_ptr<const Blob> b);

  bool is_bottom() const { return v_.index() == 0; }
  bool is_int() const { return v_.index() == 1; }
  bool is_pid() const { return v_.index() == 2; }
  bool is_tuple() const { return v_.index() == 3; }
  bool is_blob() const { return v_.index() == 4; }

  std::int64_t as_int() const;
  ProcessId as_pid() const;
  const Tuple& as_tuple() const;
  const Blob& as_blob() const;
  const std::shared_ptr<const Blob>& blob_ptr() const;

  std::size_t size() const { return as_tuple().size(); }
  const Value& operator[](std::size_t i) const { return as_tuple()[i]; }

  std::uint64_t digest() const;
  // Canonical text: `_`, `5`, `p3`, `q2`, `(a,b)`, `#<16 hex digits>`.
  std::string str() const;
  static Value parse(std::string_view text);

  friend bool operator==(const Value& a, const Value& b);
  // Total order: kind first, then content; blobs by digest.
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  std::variant<Bottom, std::int64_t, ProcessId, std::shared_ptr<const Tuple>,
               std::shared_ptr<const Blob>>
      v_;
};

// Placeholder for a blob read back from text; compares by digest only.
class DigestBlob final : public Blob {
 public:
  explicit DigestBlob(std::uint64_t d) : d_(d) {}
  bool equals(const Blob& other) const override { return other.digest() == d_; }
  std::uint64_t digest() const override { return d_; }

 private:
  std::uint64_t d_;
};

// Wraps a plain struct T as a blob. T needs operator== and hash(Hasher&).
template <class T>
class Boxed final : public Blob {
 public:
  explicit Boxed(T v) : v_(std::move(v)) {}
  const T& get() const { return v_; }
  bool equals(const Blob& other) const override {
    if (auto* o = dynamic_cast<const Boxed*>(&other)) return o->v_ == v_;
    return other.digest() == digest() && dynamic_cast<const DigestBlob*>(&other);
  }
  std::uint64_t digest() const override {
    if (!cached_) {
      Hasher h;
      h.add_str(T::kTag);
      v_.hash(h);
      digest_ = h.value();
      cached_ = true;
    }
    return digest_;
  }

 private:
  T v_;
  mutable std::uint64_t digest_ = 0;
  mutable bool cached_ = false;
};

template <class T>
Value box(T v) {
  return Value::blob(std::make_shared<const Boxed<T>>(std::move(v)));
}

template <class T>
const T* try_unbox(const Value& v) {
  if (!v.is_blob()) return nullptr;
  auto* b = dynamic_cast<const Boxed<T>*>(&v.as_blob());
  return b ? &b->get() : nullptr;
}

template <class T>
const T& unbox(const Value& v);

void hash_value(Hasher& h, const Value& v);
inline void hash_values(Hasher& h, const std::vector<Value>& vs) {
  h.add(vs.size());
  for (const auto& v : vs) hash_value(h, v);
}

class TypeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class T>
const T& unbox(const Value& v) {
  const T* p = try_unbox<T>(v);
  if (!p) throw TypeError(std::string("expected blob ") + T::kTag + ", got " + v.str());
  return *p;
}

}  // namespace efd

template <>
struct std::hash<efd::Value> {
  std::size_t operator()(const efd::Value& v) const { return v.digest(); }
};
