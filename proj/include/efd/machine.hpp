#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "efd/action.hpp"

namespace efd {

inline void hash_field(Hasher& h, const Value& v) { hash_value(h, v); }
inline void hash_field(Hasher& h, const RegisterId& r) {
  h.add(r.name.id());
  for (auto i : r.index) h.add(static_cast<std::uint64_t>(i));
}
inline void hash_field(Hasher& h, const Action& a) {
  h.add(static_cast<std::uint64_t>(a.kind)).add(a.layer);
  hash_field(h, a.reg);
  hash_value(h, a.value);
}
inline void hash_field(Hasher& h, ProcessId p) { h.add(static_cast<std::uint64_t>(p.role)).add(p.index); }
template <class T>
  requires std::is_integral_v<T> || std::is_enum_v<T>
void hash_field(Hasher& h, T v) {
  h.add(static_cast<std::uint64_t>(v));
}
template <class T>
void hash_field(Hasher& h, const std::vector<T>& v);
template <class A, class B>
void hash_field(Hasher& h, const std::pair<A, B>& p);
template <class T>
void hash_field(Hasher& h, const std::optional<T>& o);
template <class T>
  requires requires(const T& t, Hasher& h) { t.hash(h); }
void hash_field(Hasher& h, const T& v) {
  v.hash(h);
}

template <class T>
void hash_field(Hasher& h, const std::vector<T>& v) {
  h.add(v.size());
  for (const auto& x : v) hash_field(h, x);
}
template <class A, class B>
void hash_field(Hasher& h, const std::pair<A, B>& p) {
  hash_field(h, p.first);
  hash_field(h, p.second);
}
template <class T>
void hash_field(Hasher& h, const std::optional<T>& o) {
  h.add(o.has_value());
  if (o) hash_field(h, *o);
}

inline bool operator==(const Action& a, const Action& b) {
  return a.kind == b.kind && a.layer == b.layer && a.reg == b.reg && a.value == b.value;
}

// CRTP mixin: equality and hashing from `auto fields() const { return std::tie(...); }`.
template <class D>
struct Fields {
  friend bool operator==(const D& a, const D& b) { return a.fields() == b.fields(); }
  void hash(Hasher& h) const {
    std::apply([&](const auto&... f) { (hash_field(h, f), ...); }, static_cast<const D*>(this)->fields());
  }
};

// Explicit automaton over a plain state struct S (boxed as the state Value).
// step() receives the observation of the previous action and returns the next.
template <class S>
class Machine : public Automaton {
 public:
  Value init(const Value& input) const override { return box(start(input)); }
  Transition resume(const Value& state, const Value& obs) const override {
    S s = unbox<S>(state);
    Action a = step(s, obs);
    return {std::move(a), box(std::move(s))};
  }

 protected:
  virtual S start(const Value& input) const = 0;
  virtual Action step(S& s, const Value& obs) const = 0;
};

// Sorted register -> value map kept inside automaton states.
struct RegMap : Fields<RegMap> {
  std::vector<std::pair<RegisterId, Value>> items;

  const Value* find(const RegisterId& r) const;
  void set(const RegisterId& r, Value v);
  auto fields() const { return std::tie(items); }
};

bool reg_less(const RegisterId& a, const RegisterId& b);

}  // namespace efd
