#include "efd/alpha.hpp"

namespace efd {

void alpha_begin(AlphaState& s, int self, Value est) {
  s.phase = 1;
  s.self = self;
  s.est = std::move(est);
  s.outcome = AlphaState::Running;
  s.decided = Value();
}

namespace {

// Folds one collected register into the attempt; false on a higher round.
bool absorb(AlphaState& s, const Value& v) {
  if (v.is_bottom()) return true;
  std::int64_t lre = v[0].as_int(), lrww = v[1].as_int();
  if (lre > s.hint) s.hint = lre;
  if (lre > s.r) return false;
  if (lrww > s.best) {
    s.best = lrww;
    s.best_val = v[2];
  }
  return true;
}

Value entry(std::int64_t lre, std::int64_t lrww, const Value& v) { return Value::tuple({lre, lrww, v}); }

int next_owner(const AlphaState& s, int from, int owners) {
  int o = from;
  if (o == s.self) ++o;
  return o < owners ? o : -1;
}

}  // namespace

Action alpha_next(AlphaState& s, const AlphaRegs& regs, const Value& obs) {
  int w = regs.owners;
  auto finish = [&](AlphaState::Outcome o) {
    s.outcome = o;
    s.phase = 0;
    if (o == AlphaState::Decided) s.decided = s.val;
    return Action::null();
  };
  switch (s.phase) {
    case 1:
      s.phase = 2;
      return Action::read(regs.reg(s.self));
    case 2: {
      std::int64_t lre0 = 0;
      s.lrww = 0;
      s.val = Value();
      if (!obs.is_bottom()) {
        lre0 = obs[0].as_int();
        s.lrww = obs[1].as_int();
        s.val = obs[2];
      }
      std::int64_t top = std::max(lre0, s.hint);
      s.r = (top / w + 1) * w + s.self;
      s.best = s.lrww;
      s.best_val = s.val;
      s.phase = 3;
      return Action::write(regs.reg(s.self), entry(s.r, s.lrww, s.val));
    }
    case 3:
    case 5:
      s.idx = next_owner(s, 0, w);
      if (s.idx < 0) {
        if (s.phase == 5) return finish(AlphaState::Decided);
        s.phase = 4;
        return alpha_next(s, regs, Value());
      }
      ++s.phase;
      return Action::read(regs.reg(s.idx));
    case 4:
    case 6: {
      if (s.idx >= 0 && !absorb(s, obs)) return finish(AlphaState::Aborted);
      s.idx = s.idx < 0 ? -1 : next_owner(s, s.idx + 1, w);
      if (s.idx >= 0) return Action::read(regs.reg(s.idx));
      if (s.phase == 6) return finish(AlphaState::Decided);
      s.val = s.best > 0 ? s.best_val : s.est;
      s.lrww = s.r;
      s.phase = 5;
      return Action::write(regs.reg(s.self), entry(s.r, s.r, s.val));
    }
    default:
      return Action::null();
  }
}

}  // namespace efd
