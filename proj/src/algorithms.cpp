#include "efd/algorithms.hpp"

#include <algorithm>

#include "efd/alpha.hpp"

namespace efd {

bool Protocol::owns(const RegisterId& r) const {
  return std::find(owned.begin(), owned.end(), r.name) != owned.end();
}

const Value* RegMap::find(const RegisterId& r) const {
  auto it = std::lower_bound(items.begin(), items.end(), r,
                             [](const auto& p, const RegisterId& x) { return reg_less(p.first, x); });
  return it != items.end() && it->first == r ? &it->second : nullptr;
}

void RegMap::set(const RegisterId& r, Value v) {
  auto it = std::lower_bound(items.begin(), items.end(), r,
                             [](const auto& p, const RegisterId& x) { return reg_less(p.first, x); });
  if (it != items.end() && it->first == r)
    it->second = std::move(v);
  else
    items.insert(it, {r, std::move(v)});
}

bool reg_less(const RegisterId& a, const RegisterId& b) {
  if (a.name.id() != b.name.id()) return a.name.id() < b.name.id();
  return a.index < b.index;
}

namespace {

template <class M, class... Args>
std::vector<AutomatonPtr> family(int m, Args&&... args) {
  std::vector<AutomatonPtr> out;
  for (int i = 1; i <= m; ++i) out.push_back(std::make_shared<M>(i, args...));
  return out;
}

// ---------------------------------------------------------------------------
// Universal 1-concurrent solver

struct UniState : Fields<UniState> {
  int pc = 0;
  int idx = 0;
  Value input;
  Vec in, out;
  auto fields() const { return std::tie(pc, idx, input, in, out); }
  static constexpr const char* kTag = "universal";
};

class Universal final : public Machine<UniState> {
 public:
  Universal(int i, std::shared_ptr<const TaskSpec> spec) : i_(i), spec_(std::move(spec)) {}
  Role role() const override { return Role::C; }

 protected:
  UniState start(const Value& input) const override {
    UniState s;
    s.input = input;
    return s;
  }
  Action step(UniState& s, const Value& obs) const override {
    static const Label kIn("U.IN"), kOut("U.OUT");
    int m = spec_->m;
    switch (s.pc) {
      case 0:
        s.pc = 1;
        return Action::write({kIn, i_ - 1}, s.input);
      case 1:
        s.in.assign(m, Value());
        s.out.assign(m, Value());
        s.idx = 0;
        s.pc = 2;
        return Action::read({kIn, 0});
      case 2:
        s.in[s.idx++] = obs;
        if (s.idx < m) return Action::read({kIn, s.idx});
        s.idx = 0;
        s.pc = 3;
        return Action::read({kOut, 0});
      case 3: {
        s.out[s.idx++] = obs;
        if (s.idx < m) return Action::read({kOut, s.idx});
        s.in[i_ - 1] = s.input;
        s.out[i_ - 1] = Value();
        for (const auto& v : spec_->output_domain[i_ - 1]) {
          Vec o = s.out;
          o[i_ - 1] = v;
          if (spec_->delta(s.in, o)) {
            s.out = std::move(o);
            s.pc = 4;
            return Action::write({kOut, i_ - 1}, v);
          }
        }
        throw ProtocolError("no output extends " + vec_str(s.out) + " for inputs " + vec_str(s.in));
      }
      default:
        return Action::decide(s.out[i_ - 1]);
    }
  }

 private:
  int i_;
  std::shared_ptr<const TaskSpec> spec_;
};

// ---------------------------------------------------------------------------
// k-concurrent renaming

struct RenState : Fields<RenState> {
  int pc = 0;
  int idx = 0;
  std::int64_t s = 1;
  Vec seen;
  auto fields() const { return std::tie(pc, idx, s, seen); }
  static constexpr const char* kTag = "kconc_renaming";
};

class Renaming final : public Machine<RenState> {
 public:
  Renaming(int i, int n, int k, bool broken) : i_(i), n_(n), k_(k), broken_(broken) {}
  Role role() const override { return Role::C; }

 protected:
  RenState start(const Value&) const override { return {}; }
  Action step(RenState& st, const Value& obs) const override {
    static const Label kIn("KR.IN"), kR("KR.R");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, Value(i_));
      case 1:
        st.pc = 2;
        return Action::write({kR, i_ - 1}, Value::tuple({i_, st.s, 1}));
      case 2:
        st.seen.assign(n_, Value());
        st.idx = 0;
        st.pc = 3;
        return Action::read({kR, 0});
      case 3: {
        st.seen[st.idx++] = obs;
        if (st.idx < n_) return Action::read({kR, st.idx});
        st.seen[i_ - 1] = Value::tuple({i_, st.s, 1});
        bool conflict = false;
        std::vector<std::int64_t> taken;
        int rank = 0;
        for (int l = 1; l <= n_; ++l) {
          const auto& e = st.seen[l - 1];
          if (e.is_bottom()) continue;
          if (e[2].as_int() == 1 && l <= i_) ++rank;
          if (l == i_) continue;
          taken.push_back(e[1].as_int());
          if (e[1].as_int() == st.s) conflict = true;
        }
        if (!conflict) {
          st.pc = 4;
          return Action::write({kR, i_ - 1}, Value::tuple({i_, st.s, 0}));
        }
        // A non-atomic collect can still show the flag of a process that has
        // since decided, so more than k entries may look undecided.
        rank = std::min(rank, k_);
        if (broken_) ++rank;
        std::sort(taken.begin(), taken.end());
        std::int64_t cand = 0;
        for (int found = 0; found < rank;) {
          ++cand;
          if (!std::binary_search(taken.begin(), taken.end(), cand)) ++found;
        }
        st.s = cand;
        st.pc = 2;
        return Action::write({kR, i_ - 1}, Value::tuple({i_, st.s, 1}));
      }
      default:
        return Action::decide(Value(st.s));
    }
  }

 private:
  int i_, n_, k_;
  bool broken_;
};

// ---------------------------------------------------------------------------
// Running an inner automaton inside a wrapper's state

struct Inner : Fields<Inner> {
  Value state;
  Action pending;

  void start(const Automaton& a, const Value& input) {
    state = a.init(input);
    feed(a, Value());
  }
  void feed(const Automaton& a, const Value& obs) {
    auto t = a.resume(state, obs);
    pending = std::move(t.action);
    state = std::move(t.state);
  }
  auto fields() const { return std::tie(state, pending); }
};

struct GateState : Fields<GateState> {
  int pc = 0;
  int idx = 0;
  Value input;
  Inner inner;
  Vec seen;
  Value name;
  auto fields() const { return std::tie(pc, idx, input, inner, seen, name); }
  static constexpr const char* kTag = "resrenaming";
};

class Gate final : public Machine<GateState> {
 public:
  Gate(int i, int j, int n, AutomatonPtr inner) : i_(i), j_(j), n_(n), inner_(std::move(inner)) {}
  Role role() const override { return Role::C; }

 protected:
  GateState start(const Value& input) const override {
    GateState s;
    s.input = input;
    s.inner.start(*inner_, input);
    return s;
  }
  Action step(GateState& st, const Value& obs) const override {
    static const Label kIn("RR.IN"), kR("RR.R");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, st.input);
      case 1:
        st.pc = 2;
        return Action::write({kR, i_ - 1}, Value(1));
      case 2:
        st.seen.assign(n_, Value());
        st.idx = 0;
        st.pc = 3;
        return Action::read({kR, 0});
      case 3: {
        st.seen[st.idx++] = obs;
        if (st.idx < n_) return Action::read({kR, st.idx});
        st.seen[i_ - 1] = Value(1);
        int size = 0;
        std::vector<int> open;
        for (int l = 1; l <= n_; ++l) {
          if (st.seen[l - 1].is_bottom()) continue;
          ++size;
          if (st.seen[l - 1] == Value(1)) open.push_back(l);
        }
        int min1 = open[0];
        int min2 = open.size() > 1 ? open[1] : min1;
        bool go = (size == j_ && (i_ == min1 || i_ == min2)) || (size == j_ - 1 && i_ == min1);
        if (!go) return step_to(st, 2, obs);
        st.pc = 4;
        return st.inner.pending.lifted();
      }
      case 4:
        if (st.inner.pending.kind == ActionKind::Decide) {
          st.name = st.inner.pending.value;
          st.pc = 5;
          return Action::write({kR, i_ - 1}, Value(0));
        }
        st.inner.feed(*inner_, obs);
        st.pc = 2;
        return step(st, Value());
      default:
        return Action::decide(st.name);
    }
  }

 private:
  Action step_to(GateState& st, int pc, const Value& obs) const {
    st.pc = pc;
    return step(st, obs);
  }
  int i_, j_, n_;
  AutomatonPtr inner_;
};

// ---------------------------------------------------------------------------
// Consensus from strong 2-renaming

struct CfrState : Fields<CfrState> {
  int pc = 0;
  Value input;
  Inner inner;
  Value out;
  auto fields() const { return std::tie(pc, input, inner, out); }
  static constexpr const char* kTag = "cons_from_renaming";
};

class ConsFromRenaming final : public Machine<CfrState> {
 public:
  ConsFromRenaming(int i, int solo, AutomatonPtr inner) : i_(i), solo_(solo), inner_(std::move(inner)) {}
  Role role() const override { return Role::C; }

 protected:
  CfrState start(const Value& input) const override {
    CfrState s;
    s.input = input;
    s.inner.start(*inner_, Value(i_));
    return s;
  }
  Action step(CfrState& st, const Value& obs) const override {
    static const Label kIn("CR.IN");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, st.input);
      case 1:
        st.pc = 2;
        return st.inner.pending.lifted();
      case 2:
        if (st.inner.pending.kind != ActionKind::Decide) {
          st.inner.feed(*inner_, obs);
          return st.inner.pending.lifted();
        }
        if (st.inner.pending.value == Value(solo_)) {
          st.out = st.input;
          st.pc = 4;
          return Action::decide(st.out);
        }
        st.pc = 3;
        return Action::read({kIn, 2 - i_});
      case 3:
        if (obs.is_bottom())
          throw ProtocolError("p" + std::to_string(i_) + " lost the solo name but p" + std::to_string(3 - i_) +
                              " never published an input");
        st.out = obs;
        st.pc = 4;
        return Action::decide(st.out);
      default:
        return Action::decide(st.out);
    }
  }

 private:
  int i_, solo_;
  AutomatonPtr inner_;
};

struct StubState : Fields<StubState> {
  int pc = 0;
  Value name;
  auto fields() const { return std::tie(pc, name); }
  static constexpr const char* kTag = "stub_renaming";
};

class StubRenaming final : public Machine<StubState> {
 public:
  StubRenaming(int i, bool adversarial) : i_(i), adversarial_(adversarial) {}
  Role role() const override { return Role::C; }

 protected:
  StubState start(const Value&) const override { return {}; }
  Action step(StubState& st, const Value& obs) const override {
    static const Label kIn("STUB.IN");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, Value(i_));
      case 1:
        st.pc = 2;
        return Action::read({kIn, 2 - i_});
      case 2:
        st.name = Value((obs.is_bottom() != adversarial_) ? 1 : 2);
        st.pc = 3;
        [[fallthrough]];
      default:
        return Action::decide(st.name);
    }
  }

 private:
  int i_;
  bool adversarial_;
};

// ---------------------------------------------------------------------------
// Set agreement helped by S-processes

struct ScanState : Fields<ScanState> {
  int pc = 0;
  int idx = 0;
  Value input;
  Value found;
  auto fields() const { return std::tie(pc, idx, input, found); }
  static constexpr const char* kTag = "s_help";
};

class SHelpC final : public Machine<ScanState> {
 public:
  SHelpC(int i, int n) : i_(i), n_(n) {}
  Role role() const override { return Role::C; }

 protected:
  ScanState start(const Value& input) const override {
    ScanState s;
    s.input = input;
    return s;
  }
  Action step(ScanState& st, const Value& obs) const override {
    static const Label kIn("SH.IN"), kV("SH.V");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, st.input);
      case 1:
        st.pc = 2;
        return Action::read({kV, 0});
      case 2:
        if (!obs.is_bottom()) {
          st.found = obs;
          st.pc = 3;
          return Action::decide(obs);
        }
        st.idx = (st.idx + 1) % n_;
        return Action::read({kV, st.idx});
      default:
        return Action::decide(st.found);
    }
  }

 private:
  int i_, n_;
};

class SHelpS final : public Machine<ScanState> {
 public:
  SHelpS(int q, int m) : q_(q), m_(m) {}
  Role role() const override { return Role::S; }

 protected:
  ScanState start(const Value&) const override { return {}; }
  Action step(ScanState& st, const Value& obs) const override {
    static const Label kIn("SH.IN"), kV("SH.V");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::read({kIn, 0});
      case 1:
        if (!obs.is_bottom()) {
          st.pc = 2;
          return Action::write({kV, q_ - 1}, obs);
        }
        st.idx = (st.idx + 1) % m_;
        return Action::read({kIn, st.idx});
      default:
        return Action::null();
    }
  }

 private:
  int q_, m_;
};

// ---------------------------------------------------------------------------
// k-set agreement, k-concurrently

struct KsaState : Fields<KsaState> {
  int pc = 0;
  int idx = 0;
  Value input;
  Value out;
  auto fields() const { return std::tie(pc, idx, input, out); }
  static constexpr const char* kTag = "ksa";
};

class Ksa final : public Machine<KsaState> {
 public:
  Ksa(int i, int m) : i_(i), m_(m) {}
  Role role() const override { return Role::C; }

 protected:
  KsaState start(const Value& input) const override {
    KsaState s;
    s.input = input;
    return s;
  }
  Action step(KsaState& st, const Value& obs) const override {
    static const Label kIn("KSA.IN"), kDec("KSA.DECV");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, st.input);
      case 1:
        st.pc = 2;
        st.idx = 0;
        return Action::read({kDec, 0});
      case 2:
        if (!obs.is_bottom()) {
          st.out = obs;
          st.pc = 4;
          return Action::decide(st.out);
        }
        if (++st.idx < m_) return Action::read({kDec, st.idx});
        st.out = st.input;
        st.pc = 3;
        return Action::write({kDec, i_ - 1}, st.input);
      default:
        return Action::decide(st.out);
    }
  }

 private:
  int i_, m_;
};

// ---------------------------------------------------------------------------
// Leader-based consensus

struct LcCState : Fields<LcCState> {
  int pc = 0;
  int idx = 0;
  Value input;
  Value out;
  auto fields() const { return std::tie(pc, idx, input, out); }
  static constexpr const char* kTag = "lc_c";
};

class LeaderConsC final : public Machine<LcCState> {
 public:
  LeaderConsC(int i, int n, DecMode mode) : i_(i), n_(n), mode_(mode) {}
  Role role() const override { return Role::C; }

 protected:
  LcCState start(const Value& input) const override {
    LcCState s;
    s.input = input;
    return s;
  }
  Action step(LcCState& st, const Value& obs) const override {
    static const Label kIn("LC.IN"), kDec("LC.DEC");
    int slots = mode_ == DecMode::Shared ? 1 : n_;
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kIn, i_ - 1}, st.input);
      case 1:
        st.pc = 2;
        return Action::read({kDec, 0});
      case 2:
        if (!obs.is_bottom()) {
          st.out = obs;
          st.pc = 3;
          return Action::decide(obs);
        }
        st.idx = (st.idx + 1) % slots;
        return Action::read({kDec, st.idx});
      default:
        return Action::decide(st.out);
    }
  }

 private:
  int i_, n_;
  DecMode mode_;
};

struct LcSState : Fields<LcSState> {
  int pc = 0;
  int idx = 0;
  Value est;
  AlphaState alpha;
  auto fields() const { return std::tie(pc, idx, est, alpha); }
  static constexpr const char* kTag = "lc_s";
};

class LeaderConsS final : public Machine<LcSState> {
 public:
  LeaderConsS(int q, int m, int n, std::vector<int> proposers, DecMode mode)
      : q_(q), n_(n), proposers_(std::move(proposers)), mode_(mode) {
    (void)m;
  }
  Role role() const override { return Role::S; }

 protected:
  LcSState start(const Value&) const override { return {}; }
  Action step(LcSState& st, const Value& obs) const override {
    static const Label kIn("LC.IN"), kDec("LC.DEC"), kReg("LC.REG");
    AlphaRegs regs{kReg, -1, -1, n_};
    RegisterId dec(kDec, mode_ == DecMode::Shared ? 0 : q_ - 1);
    switch (st.pc) {
      case 0:  // has this instance been decided (as far as our slot shows)?
        st.pc = 1;
        return Action::read(dec);
      case 1:
        if (!obs.is_bottom()) {
          st.pc = 9;
          return Action::null();
        }
        st.pc = 2;
        return Action::query();
      case 2:
        if (!(obs.is_pid() && obs.as_pid() == sproc(q_))) return restart(st);
        st.est = Value();
        st.idx = 0;
        st.pc = 3;
        return Action::read({kIn, proposers_[0] - 1});
      case 3:
        if (!obs.is_bottom()) {
          st.est = obs;
        } else if (++st.idx < static_cast<int>(proposers_.size())) {
          return Action::read({kIn, proposers_[st.idx] - 1});
        }
        if (st.est.is_bottom()) return restart(st);
        alpha_begin(st.alpha, q_ - 1, st.est);
        st.pc = 4;
        return alpha_next(st.alpha, regs, Value());
      case 4: {
        Action a = alpha_next(st.alpha, regs, obs);
        if (st.alpha.outcome == AlphaState::Running) return a;
        if (st.alpha.outcome == AlphaState::Aborted) return restart(st);
        st.pc = 0;
        return Action::write(dec, st.alpha.decided);
      }
      default:
        return Action::null();
    }
  }

 private:
  Action restart(LcSState& st) const {
    st.pc = 0;
    return step(st, Value());
  }
  int q_, n_;
  std::vector<int> proposers_;
  DecMode mode_;
};

struct EchoState : Fields<EchoState> {
  int pc = 0;
  Value input;
  auto fields() const { return std::tie(pc, input); }
  static constexpr const char* kTag = "echo";
};

class Echo final : public Machine<EchoState> {
 public:
  explicit Echo(int i) : i_(i) {}
  Role role() const override { return Role::C; }

 protected:
  EchoState start(const Value& input) const override {
    EchoState s;
    s.input = input;
    return s;
  }
  Action step(EchoState& st, const Value&) const override {
    static const Label kIn("EC.IN");
    if (st.pc == 0) {
      st.pc = 1;
      return Action::write({kIn, i_ - 1}, st.input);
    }
    return Action::decide(st.input);
  }

 private:
  int i_;
};

struct MinState : Fields<MinState> {
  int pc = 0;
  int idx = 0;
  int round = 0;
  Value best;
  auto fields() const { return std::tie(pc, idx, round, best); }
  static constexpr const char* kTag = "min_rounds";
};

class MinRounds final : public Machine<MinState> {
 public:
  MinRounds(int c, int k, int rounds) : c_(c), k_(k), rounds_(rounds) {}
  Role role() const override { return Role::C; }

 protected:
  MinState start(const Value& input) const override {
    MinState s;
    s.best = input;
    return s;
  }
  Action step(MinState& st, const Value& obs) const override {
    static const Label kV("MR.V");
    switch (st.pc) {
      case 0:
        st.pc = 1;
        return Action::write({kV, c_ - 1}, Value::tuple({st.round, st.best}));
      case 1:
        if (st.round == rounds_) {
          st.pc = 3;
          return Action::decide(st.best);
        }
        ++st.round;
        st.idx = 0;
        st.pc = 2;
        return Action::read({kV, 0});
      case 2:
        if (!obs.is_bottom() && obs[1] < st.best) st.best = obs[1];
        if (++st.idx < k_) return Action::read({kV, st.idx});
        st.pc = 1;
        return Action::write({kV, c_ - 1}, Value::tuple({st.round, st.best}));
      default:
        return Action::decide(st.best);
    }
  }

 private:
  int c_, k_, rounds_;
};

}  // namespace

Protocol min_rounds(int k, int rounds) {
  Protocol p;
  p.name = "min_rounds";
  p.m = k;
  p.layout = [k](MemoryStore& mem) { mem.allocate("MR.V", k); };
  p.c = family<MinRounds>(k, k, rounds);
  p.owned = {Label("MR.V")};
  return p;
}

Protocol one_concurrent_universal(const TaskSpec& spec) {
  auto sp = std::make_shared<const TaskSpec>(spec);
  Protocol p;
  p.name = "universal";
  p.m = spec.m;
  int m = spec.m;
  p.layout = [m](MemoryStore& mem) {
    mem.allocate("U.IN", m);
    mem.allocate("U.OUT", m);
  };
  p.c = family<Universal>(m, sp);
  p.owned = {Label("U.IN"), Label("U.OUT")};
  return p;
}

Protocol k_concurrent_renaming(int j, int k, int n, bool broken) {
  if (k < 1 || k > j || j >= n) throw SpecError("k-concurrent renaming needs 1 <= k <= j < n");
  Protocol p;
  p.name = broken ? "kconc_renaming_broken" : "kconc_renaming";
  p.m = n;
  p.layout = [n](MemoryStore& mem) {
    mem.allocate("KR.IN", n);
    mem.allocate("KR.R", n);
  };
  p.c = family<Renaming>(n, n, k, broken);
  p.owned = {Label("KR.IN"), Label("KR.R")};
  return p;
}

Protocol one_resilient_strong_renaming(int j, const Protocol& inner) {
  int n = inner.m;
  Protocol p;
  p.name = "resrenaming(" + inner.name + ")";
  p.m = n;
  auto inner_layout = inner.layout;
  p.layout = [n, inner_layout](MemoryStore& mem) {
    mem.allocate("RR.IN", n);
    mem.allocate("RR.R", n);
    if (inner_layout) inner_layout(mem);
  };
  for (int i = 1; i <= n; ++i) p.c.push_back(std::make_shared<Gate>(i, j, n, inner.c[i - 1]));
  p.owned = inner.owned;
  p.owned.push_back(Label("RR.IN"));
  p.owned.push_back(Label("RR.R"));
  return p;
}

Protocol consensus_from_renaming(int solo_name, const Protocol& inner) {
  Protocol p;
  p.name = "cons_from_renaming(" + inner.name + ")";
  p.m = 2;
  auto inner_layout = inner.layout;
  p.layout = [inner_layout](MemoryStore& mem) {
    mem.allocate("CR.IN", 2);
    if (inner_layout) inner_layout(mem);
  };
  for (int i = 1; i <= 2; ++i) p.c.push_back(std::make_shared<ConsFromRenaming>(i, solo_name, inner.c[i - 1]));
  p.owned = inner.owned;
  p.owned.push_back(Label("CR.IN"));
  return p;
}

Protocol stub_renaming(bool adversarial) {
  Protocol p;
  p.name = adversarial ? "stub_renaming_adversarial" : "stub_renaming";
  p.m = 2;
  p.layout = [](MemoryStore& mem) { mem.allocate("STUB.IN", 2); };
  p.c = family<StubRenaming>(2, adversarial);
  p.owned = {Label("STUB.IN")};
  return p;
}

Protocol s_help_set_agreement(int n) {
  Protocol p;
  p.name = "s_help";
  p.m = n;
  p.layout = [n](MemoryStore& mem) {
    mem.allocate("SH.IN", n);
    mem.allocate("SH.V", n);
  };
  p.c = family<SHelpC>(n, n);
  for (int q = 1; q <= n; ++q) p.s.push_back(std::make_shared<SHelpS>(q, n));
  p.owned = {Label("SH.IN")};
  return p;
}

Protocol ksa_protocol(int m) {
  Protocol p;
  p.name = "ksa";
  p.m = m;
  p.layout = [m](MemoryStore& mem) {
    mem.allocate("KSA.IN", m);
    mem.allocate("KSA.DECV", m);
  };
  p.c = family<Ksa>(m, m);
  p.owned = {Label("KSA.IN"), Label("KSA.DECV")};
  return p;
}

Protocol leader_consensus(int m, int n, std::set<int> proposers, DecMode mode) {
  if (proposers.empty() || *proposers.begin() < 1 || *proposers.rbegin() > m)
    throw SpecError("leader consensus needs proposers within 1..m");
  Protocol p;
  p.name = "leader_consensus";
  p.m = m;
  p.layout = [m, n, mode](MemoryStore& mem) {
    mem.allocate("LC.IN", m);
    mem.allocate("LC.REG", n);
    mem.allocate("LC.DEC", mode == DecMode::Shared ? 1 : n);
  };
  p.c = family<LeaderConsC>(m, n, mode);
  std::vector<int> props(proposers.begin(), proposers.end());
  for (int q = 1; q <= n; ++q) p.s.push_back(std::make_shared<LeaderConsS>(q, m, n, props, mode));
  p.owned = {Label("LC.IN")};
  return p;
}

Protocol echo_extension(const Protocol& base, int x) {
  if (x < base.m) throw SpecError("echo extension needs x >= |U|");
  Protocol p = base;
  p.name = "A_" + std::to_string(x) + "(" + base.name + ")";
  p.m = x;
  auto base_layout = base.layout;
  p.layout = [x, base_layout](MemoryStore& mem) {
    if (base_layout) base_layout(mem);
    mem.allocate("EC.IN", x);
  };
  for (int i = base.m + 1; i <= x; ++i) p.c.push_back(std::make_shared<Echo>(i));
  p.owned.push_back(Label("EC.IN"));
  return p;
}

}  // namespace efd
