#include "efd/bg.hpp"

#include <map>

#include "efd/alpha.hpp"

namespace efd {

namespace {

const Label& pub_label() {
  static const Label l("BG.PUB");
  return l;
}

// Register ids the alpha phase machine talks about; translated to PUB.
const Label& alpha_label() {
  static const Label l("BG.ALPHA");
  return l;
}

constexpr int kBatchCap = 64;

struct BgShared {
  Protocol a;
  int k;
  Label inputs;
  MemoryStore scratch;

  BgShared(Protocol p, int codes, Label in) : a(std::move(p)), k(codes), inputs(in) {
    if (a.layout) a.layout(scratch);
  }
  int owner_of(const RegisterId& r) const {
    if (!a.owns(r)) throw ProtocolError(a.name + " uses " + r.str() + ", which no process owns");
    return static_cast<int>(r.first()) + 1;
  }
  Value init_of(const RegisterId& r) const { return scratch.is_allocated(r) ? scratch.read(r) : Value(); }
  Value lookup(const std::vector<SimView>& views, const RegisterId& r) const {
    const SimView& v = views[owner_of(r) - 1];
    if (const Value* x = v.regs.find(r)) return *x;
    return init_of(r);
  }
  void feed(int x, SimView& v, const Value& obs) const {
    auto t = a.c[x - 1]->resume(v.state, obs);
    v.state = std::move(t.state);
    v.pending = std::move(t.action);
    ++v.step;
  }
  // Applies p''_x's steps that need no agreement; true if any was applied.
  bool settle(int x, SimView& v) const {
    bool any = false;
    while (!v.decided) {
      const Action& p = v.pending;
      if (p.kind == ActionKind::Read) break;
      any = true;
      switch (p.kind) {
        case ActionKind::Write:
          if (owner_of(p.reg) != x) throw ProtocolError("p''" + std::to_string(x) + " wrote " + p.reg.str());
          v.regs.set(p.reg, p.value);
          feed(x, v, Value());
          break;
        case ActionKind::Decide:
          if (p.layer == 0) {
            v.decided = true;
            v.decision = p.value;
            ++v.step;
          } else {
            feed(x, v, Value());
          }
          break;
        case ActionKind::Null:
          feed(x, v, Value());
          break;
        default:
          throw ProtocolError("p''" + std::to_string(x) + " of " + a.name + " queried a failure detector");
      }
    }
    return any;
  }
  void start(int x, SimView& v, const Value& input) const {
    v.input = input;
    v.state = a.c[x - 1]->init(input);
    auto t = a.c[x - 1]->resume(v.state, Value());
    v.state = std::move(t.state);
    v.pending = std::move(t.action);
    v.step = 0;
  }
};

using BgSharedPtr = std::shared_ptr<const BgShared>;

void merge(std::vector<SimView>& into, const Value& pub) {
  const PubState* p = try_unbox<PubState>(pub);
  if (!p) return;
  for (std::size_t x = 0; x < into.size(); ++x)
    if (p->views[x].step > into[x].step) into[x] = p->views[x];
}

struct BgState : Fields<BgState> {
  enum Pc : std::uint8_t { Start, Loop, Inputs, Snap, AlphaWrite, AlphaRead, Publish };

  Pc pc = Start;
  int idx = 0;
  int mine = 0;
  PubState pub;
  Vec inputs;
  std::vector<Value> cur, prev;  // double collect of the other codes
  int x = 0;
  std::int64_t base = 0;
  Value proposal;
  AlphaState alpha;

  auto fields() const { return std::tie(pc, idx, mine, pub, inputs, cur, prev, x, base, proposal, alpha); }
  static constexpr const char* kTag = "bg_code";
};

class BgCode final : public Machine<BgState> {
 public:
  BgCode(BgSharedPtr sh, int c) : sh_(std::move(sh)), c_(c) {
    for (int d = 1; d <= sh_->k; ++d)
      if (d != c) others_.push_back(d);
  }
  Role role() const override { return Role::C; }

 protected:
  BgState start(const Value&) const override {
    BgState s;
    s.pub.views.resize(sh_->a.m);
    s.inputs.resize(sh_->a.m);
    return s;
  }

  Action step(BgState& st, const Value& obs) const override {
    switch (st.pc) {
      case BgState::Start:
      case BgState::Publish:
        st.pc = BgState::Loop;
        return publish(st);
      case BgState::Loop:
        if (st.mine == 0) {
          st.idx = 0;
          st.pc = BgState::Inputs;
          return Action::read({sh_->inputs, 0});
        }
        return begin_snapshot(st);
      case BgState::Inputs:
        if (!obs.is_bottom()) st.inputs[st.idx] = obs;
        if (++st.idx < sh_->a.m) return Action::read({sh_->inputs, st.idx});
        return begin_snapshot(st);
      case BgState::Snap: {
        st.cur[st.idx] = obs;
        if (++st.idx < static_cast<int>(others_.size())) return Action::read(pub_reg(others_[st.idx]));
        if (others_.size() > 1 && !same_views(st.cur, st.prev)) {
          st.prev = st.cur;
          return collect(st);
        }
        for (const auto& v : st.cur) merge(st.pub.views, v);
        return act(st);
      }
      case BgState::AlphaWrite:
        return run_alpha(st, Value());
      case BgState::AlphaRead: {
        merge(st.pub.views, obs);
        if (st.pub.views[st.x - 1].step > st.base) {
          st.pc = BgState::Loop;
          return publish(st);
        }
        const PubState* p = try_unbox<PubState>(obs);
        Value entry;
        if (p && p->ax == st.x && p->as == st.base + 1) entry = Value::tuple({p->lre, p->lrww, p->val});
        return run_alpha(st, entry);
      }
    }
    return Action::null();
  }

 private:
  RegisterId pub_reg(int d) const { return {pub_label(), d - 1}; }
  Action publish(BgState& st) const { return Action::write(pub_reg(c_), box(st.pub)); }

  Action begin_snapshot(BgState& st) const {
    st.prev.clear();
    if (others_.empty()) return act(st);
    return collect(st);
  }
  Action collect(BgState& st) const {
    st.cur.assign(others_.size(), Value());
    st.idx = 0;
    st.pc = BgState::Snap;
    return Action::read(pub_reg(others_[0]));
  }
  static bool same_views(const std::vector<Value>& a, const std::vector<Value>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const PubState* p = try_unbox<PubState>(a[i]);
      const PubState* q = try_unbox<PubState>(b[i]);
      if (!p || !q) {
        if (p != q) return false;
        continue;
      }
      if (!(p->views == q->views)) return false;
    }
    return true;
  }

  // Picks a target from the merged views and takes the next step for it.
  Action act(BgState& st) const {
    auto& views = st.pub.views;
    if (st.mine && views[st.mine - 1].decided) st.mine = 0;
    int x = st.mine;
    if (!x) {
      for (int y = 1; y <= sh_->a.m && !x; ++y)
        if (!st.inputs[y - 1].is_bottom() && views[y - 1].step == 0) {
          x = st.mine = y;
          sh_->start(y, views[y - 1], st.inputs[y - 1]);
        }
    }
    for (int y = 1; y <= sh_->a.m && !x; ++y)
      if (views[y - 1].step > 0 && !views[y - 1].decided) x = y;
    st.pc = BgState::Loop;
    if (!x) return publish(st);
    SimView& v = views[x - 1];
    if (sh_->settle(x, v) || v.decided) return publish(st);
    // A run of reads: propose their values as of this snapshot.
    SimView probe = v;
    Vec vals;
    while (probe.pending.kind == ActionKind::Read && static_cast<int>(vals.size()) < kBatchCap) {
      Value r = sh_->lookup(views, probe.pending.reg);
      vals.push_back(r);
      sh_->feed(x, probe, r);
    }
    st.x = x;
    st.base = v.step;
    st.proposal = Value::tuple(std::move(vals));
    st.alpha = AlphaState{};
    alpha_begin(st.alpha, c_ - 1, st.proposal);
    return run_alpha(st, Value());
  }

  Action run_alpha(BgState& st, Value obs) const {
    AlphaRegs regs{alpha_label(), -1, -1, sh_->k};
    for (;;) {
      Action a = alpha_next(st.alpha, regs, obs);
      if (st.alpha.outcome == AlphaState::Decided) {
        SimView& v = st.pub.views[st.x - 1];
        for (const auto& r : st.alpha.decided.as_tuple()) sh_->feed(st.x, v, r);
        sh_->settle(st.x, v);
        st.pc = BgState::Loop;
        return publish(st);
      }
      if (st.alpha.outcome == AlphaState::Aborted) {
        alpha_begin(st.alpha, c_ - 1, st.proposal);
        obs = Value();
        continue;
      }
      int owner = static_cast<int>(a.reg.first());
      if (a.kind == ActionKind::Write) {
        st.pub.ax = st.x;
        st.pub.as = st.base + 1;
        st.pub.lre = a.value[0].as_int();
        st.pub.lrww = a.value[1].as_int();
        st.pub.val = a.value[2];
        st.pc = BgState::AlphaWrite;
        return publish(st);
      }
      if (owner == c_ - 1) {
        obs = st.pub.ax == st.x && st.pub.as == st.base + 1
                  ? Value::tuple({st.pub.lre, st.pub.lrww, st.pub.val})
                  : Value();
        continue;
      }
      st.pc = BgState::AlphaRead;
      return Action::read(pub_reg(owner + 1));
    }
  }

  BgSharedPtr sh_;
  int c_;
  std::vector<int> others_;
};

}  // namespace

Protocol bg_codes(const Protocol& a, int k, Label inputs) {
  if (k < 1) throw SpecError("bg_codes needs k >= 1");
  auto sh = std::make_shared<const BgShared>(a, k, inputs);
  Protocol p;
  p.name = "bg(" + a.name + ")";
  p.m = k;
  p.layout = [k](MemoryStore& mem) { mem.allocate(pub_label().name(), k); };
  for (int c = 1; c <= k; ++c) p.c.push_back(std::make_shared<BgCode>(sh, c));
  p.owned = {pub_label()};
  return p;
}

std::optional<Value> depart_on_own_decision(int i, const CodeRecord& r) {
  const Value* v = r.owned.find(RegisterId(pub_label(), r.code - 1));
  if (!v) return std::nullopt;
  const PubState* p = try_unbox<PubState>(*v);
  if (!p || i > static_cast<int>(p->views.size())) return std::nullopt;
  const SimView& s = p->views[i - 1];
  if (s.decided) return s.decision;
  return std::nullopt;
}

KCodesConfig double_simulation(const Protocol& a, int k, int n) {
  KCodesConfig cfg;
  cfg.name = "double_simulation(" + a.name + ")";
  cfg.m = a.m;
  cfg.n = n;
  cfg.k = k;
  cfg.b = bg_codes(a, k);
  cfg.depart = depart_on_own_decision;
  return cfg;
}

Algorithm solve_k_concurrent_with_anti_omega(const TaskSpec& spec, const Protocol& a, int k, int n) {
  if (spec.m != a.m) throw SpecError(a.name + " is for " + std::to_string(a.m) + " processes, " + spec.name +
                                     " for " + std::to_string(spec.m));
  return k_codes_simulation(double_simulation(a, k, n));
}

InnerRun inner_run(const KCodesConfig& cfg, const KCodesReport& rep) {
  InnerRun out;
  int m = cfg.m;
  RunTrace& t = out.trace;
  t.m = m;
  t.n = 0;
  t.inputs.assign(m, Value());
  t.stop = StopReason::Quiescent;

  struct Commit {
    Time time;
    const CodeRecord* rec;
  };
  std::vector<Commit> commits;
  for (int j = 0; j < cfg.k; ++j)
    for (std::size_t l = 0; l < rep.records[j].size(); ++l) commits.push_back({rep.commit_times[j][l], &rep.records[j][l]});
  std::sort(commits.begin(), commits.end(), [](const Commit& a, const Commit& b) { return a.time < b.time; });

  std::vector<char> joined(m, 0), decided(m, 0);
  std::map<std::pair<int, std::int64_t>, SimView> seen;
  out.consistency = Verdict::pass();
  for (const auto& c : commits) {
    const Value* v = c.rec->owned.find(RegisterId(pub_label(), c.rec->code - 1));
    const PubState* p = v ? try_unbox<PubState>(*v) : nullptr;
    if (!p) continue;
    for (int x = 1; x <= m && x <= static_cast<int>(p->views.size()); ++x) {
      const SimView& s = p->views[x - 1];
      if (s.step == 0) continue;
      auto [it, fresh] = seen.emplace(std::make_pair(x, s.step), s);
      if (!fresh && !(it->second == s) && out.consistency.ok())
        out.consistency = Verdict::fail("codes disagree on p''" + std::to_string(x) + " after step " +
                                            std::to_string(s.step),
                                        c.time);
      std::int64_t step = static_cast<std::int64_t>(t.events.size());
      if (!joined[x - 1]) {
        joined[x - 1] = 1;
        t.inputs[x - 1] = s.input;
        t.events.push_back(Event{step++, c.time, cproc(x), Action::write(RegisterId(Label("INNER.IN"), x - 1), s.input), {}});
      }
      if (s.decided && !decided[x - 1]) {
        decided[x - 1] = 1;
        t.events.push_back(Event{step, c.time, cproc(x), Action::decide(s.decision), {}});
      }
    }
  }
  return out;
}

}  // namespace efd
