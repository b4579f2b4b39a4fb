#pragma once

#include <cstdint>

#include "efd/machine.hpp"

namespace efd {

// Registers of one consensus instance: REG[owner] = (lre, lrww, val), with the
// instance's coordinates as leading indices.
struct AlphaRegs {
  Label label;
  std::int64_t a = -1;
  std::int64_t b = -1;
  int owners = 0;

  RegisterId reg(int owner) const {
    if (a < 0) return RegisterId(label, owner);
    if (b < 0) return RegisterId(label, a, owner);
    return RegisterId(label, a, b, owner);
  }
};

// One attempt of round-based register consensus (the classic "alpha"
// abstraction): announce round r, collect, adopt the value accepted in the
// highest round, accept it, collect again. Any higher round seen aborts the
// attempt. Rounds are unique per owner (r mod owners == owner).
struct AlphaState : Fields<AlphaState> {
  enum Outcome : std::uint8_t { Running, Decided, Aborted };

  int phase = 0;
  int self = 0;
  std::int64_t r = 0;
  std::int64_t lrww = 0;
  Value val;
  Value est;
  int idx = 0;
  std::int64_t best = 0;
  Value best_val;
  std::int64_t hint = 0;  // highest round seen so far
  Outcome outcome = Aborted;
  Value decided;

  auto fields() const { return std::tie(phase, self, r, lrww, val, est, idx, best, best_val, hint, outcome, decided); }
};

void alpha_begin(AlphaState& s, int self, Value est);
// Given the observation of the previous alpha action, returns the next one.
// Returns a null action once s.outcome is no longer Running.
Action alpha_next(AlphaState& s, const AlphaRegs& regs, const Value& obs);

}  // namespace efd
