#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "efd/memory.hpp"
#include "efd/value.hpp"

namespace efd {

enum class ActionKind : std::uint8_t { Read, Write, QueryFd, Decide, Null };

const char* action_name(ActionKind k);
ActionKind parse_action_name(std::string_view s);

// One step of a process. `layer` > 0 tags steps issued on behalf of a wrapped
// inner protocol; a Decide at layer > 0 is bookkeeping for that inner run and
// is a null step as far as the executor is concerned.
struct Action {
  ActionKind kind = ActionKind::Null;
  RegisterId reg;
  Value value;
  std::uint8_t layer = 0;

  static Action read(RegisterId r) { return {ActionKind::Read, r, {}, 0}; }
  static Action write(RegisterId r, Value v) { return {ActionKind::Write, r, std::move(v), 0}; }
  static Action query() { return {ActionKind::QueryFd, {}, {}, 0}; }
  static Action decide(Value v) { return {ActionKind::Decide, {}, std::move(v), 0}; }
  static Action null() { return {}; }

  Action lifted(std::uint8_t by = 1) const {
    Action a = *this;
    a.layer = static_cast<std::uint8_t>(a.layer + by);
    return a;
  }

  std::string str() const;
};

struct Transition {
  Action action;
  Value state;
};

// Deterministic process program. The executor calls init once, then resume
// with the observation of the previous action (⊥ for the first call, for
// writes, decides and null steps; the read value or FD output otherwise).
class Automaton {
 public:
  virtual ~Automaton() = default;
  virtual Role role() const = 0;
  virtual Value init(const Value& input) const = 0;
  virtual Transition resume(const Value& state, const Value& observation) const = 0;
};

using AutomatonPtr = std::shared_ptr<const Automaton>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efd
