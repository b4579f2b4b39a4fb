#include "efd/kcodes.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "efd/alpha.hpp"

namespace efd {

std::optional<Value> depart_on_any_decision(int, const CodeRecord& r) {
  if (r.decided) return r.decision;
  return std::nullopt;
}

std::vector<ProcessId> as_vector(const Value& fd, int k) {
  std::vector<ProcessId> out;
  if (fd.is_pid()) {
    out.assign(k, fd.as_pid());
  } else if (fd.is_tuple()) {
    for (const auto& e : fd.as_tuple()) out.push_back(e.as_pid());
  }
  out.resize(k, sproc(1));
  return out;
}

namespace {

struct Labels {
  Label in{"KC.IN"}, r{"KC.R"}, oms{"KC.OMS"}, prop{"KC.PROP"}, reg{"KC.REG"}, dec{"KC.DEC"};
};

const Labels& labels() {
  static const Labels l;
  return l;
}

struct Shared {
  KCodesConfig cfg;
  MemoryStore scratch;  // initial values of B's registers

  explicit Shared(KCodesConfig c) : cfg(std::move(c)) {
    if (cfg.b.m != cfg.k) throw SpecError("B must have exactly k codes");
    if (cfg.b.layout) cfg.b.layout(scratch);
  }
  // Code owning r (1-based), 0 for real registers.
  int code_of(const RegisterId& r) const { return cfg.b.owns(r) ? static_cast<int>(r.first()) + 1 : 0; }
  Value init_of(const RegisterId& r) const { return scratch.is_allocated(r) ? scratch.read(r) : Value(); }
  Value value_in(const CodeRecord* rec, const RegisterId& r) const {
    if (rec)
      if (const Value* v = rec->owned.find(r)) return *v;
    return init_of(r);
  }
  AlphaRegs alpha_regs(int j, std::int64_t ell) const { return {labels().reg, j, ell, cfg.m + cfg.n}; }
};

using SharedPtr = std::shared_ptr<const Shared>;

// State common to simulators and S-processes: the committed records each has
// seen so far, per code.
class Follower : public CoroutineProcess {
 public:
  explicit Follower(SharedPtr sh) : sh_(std::move(sh)), chains_(sh_->cfg.k) {}

  void advance(const Value& obs) override {
    ++steps_;
    CoroutineProcess::advance(obs);
  }

 protected:
  const CodeRecord* latest(int j) const {
    const auto& c = chains_[j - 1];
    return c.empty() ? nullptr : &unbox<CodeRecord>(c.back());
  }
  std::int64_t known(int j) const { return static_cast<std::int64_t>(chains_[j - 1].size()); }

  void append(int j, const Value& rec) {
    chains_[j - 1].push_back(rec);
    on_record(unbox<CodeRecord>(rec));
  }
  virtual void on_record(const CodeRecord&) {}

  // Follows code j's decision chain to its end; returns the local step of the
  // read that found the first undecided instance.
  co::Task<std::int64_t> catch_up(int j) {
    for (;;) {
      Value v = co_await co::read(RegisterId(labels().dec, j, known(j) + 1));
      if (v.is_bottom()) co_return steps_;
      append(j, v);
    }
  }

  co::Task<std::vector<int>> collect_pars() {
    std::vector<int> pars;
    for (int i = 1; i <= sh_->cfg.m; ++i) {
      Value v = co_await co::read(RegisterId(labels().r, i - 1));
      if (!v.is_bottom()) pars.push_back(i);
    }
    co_return pars;
  }

  // One alpha attempt on cons_{j,ell}; returns the decision or ⊥.
  co::Task<Value> attempt(int j, std::int64_t ell, int owner, Value est) {
    AlphaRegs regs = sh_->alpha_regs(j, ell);
    AlphaState st;
    alpha_begin(st, owner, std::move(est));
    Action a = alpha_next(st, regs, Value());
    while (st.outcome == AlphaState::Running) {
      Value obs = co_await co::emit(a);
      a = alpha_next(st, regs, obs);
    }
    if (st.outcome == AlphaState::Decided) co_return st.decided;
    co_return Value();
  }

  SharedPtr sh_;
  std::vector<std::vector<Value>> chains_;
  std::int64_t steps_ = 0;
};

class Simulator final : public Follower {
 public:
  Simulator(SharedPtr sh, int i, Value input) : Follower(std::move(sh)), i_(i), input_(std::move(input)) {}

 protected:
  co::Task<> body() override {
    const auto& L = labels();
    const auto& cfg = sh_->cfg;
    co_await co::write(RegisterId(L.in, i_ - 1), input_);
    co_await co::write(RegisterId(L.r, i_ - 1), Value(1));
    for (;;) {
      std::vector<int> pars = co_await collect_pars();
      int active = std::min<int>(static_cast<int>(pars.size()), cfg.k);
      bool vector_mode = static_cast<int>(pars.size()) > cfg.k;
      for (int j = 1; j <= active && !departing_; ++j) {
        const CodeRecord* last = latest(j);
        if (last && last->decided) continue;
        bool leader = !vector_mode && pars[j - 1] == i_;
        co_await code_step(j, leader, vector_mode);
      }
      if (departing_) {
        co_await co::write(RegisterId(L.r, i_ - 1), Value());
        co_await co::decide(*departing_);
      }
    }
  }

  void on_record(const CodeRecord& r) override {
    if (departing_) return;
    if (auto v = sh_->cfg.depart(i_, r)) departing_ = std::move(*v);
  }

 private:
  co::Task<> code_step(int j, bool leader, bool vector_mode) {
    const auto& L = labels();
    std::int64_t ell = known(j) + 1;
    Value dec = co_await co::read(RegisterId(L.dec, j, ell));
    if (!dec.is_bottom()) {
      append(j, dec);
      co_return;
    }
    if (!leader && !vector_mode) co_return;
    auto key = std::make_pair(j, ell);
    auto it = proposals_.find(key);
    if (it == proposals_.end()) {
      Value p = co_await propose(j, ell);
      // A chain scan inside propose() may have passed this instance.
      if (known(j) >= ell) co_return;
      co_await co::write(RegisterId(L.prop, j, ell, i_ - 1), p);
      it = proposals_.emplace(key, std::move(p)).first;
    }
    if (!leader) co_return;
    Value d = co_await attempt(j, ell, i_ - 1, it->second);
    if (d.is_bottom()) co_return;
    co_await co::write(RegisterId(L.dec, j, ell), d);
    proposals_.erase(key);
    if (known(j) < ell) append(j, d);
  }

  // Runs code j from its last agreed record until it writes, decides or hits
  // the read cap.
  co::Task<Value> propose(int j, std::int64_t ell) {
    const auto& cfg = sh_->cfg;
    const Automaton& b = *cfg.b.c[j - 1];
    CodeRecord rec;
    rec.code = j;
    rec.ell = ell;
    if (ell == 1) {
      rec.input = input_;
      auto t = b.resume(b.init(input_), Value());
      rec.state = std::move(t.state);
      rec.pending = std::move(t.action);
    } else {
      rec = *latest(j);
      rec.ell = ell;
      rec.actions.clear();
      rec.reads.clear();
    }
    int reads = 0;
    for (;;) {
      Action a = rec.pending;
      Value obs;
      bool stop = false;
      switch (a.kind) {
        case ActionKind::Read: {
          SimRead sr;
          sr.reg = a.reg;
          sr.proposer = i_;
          int owner = sh_->code_of(a.reg);
          if (owner == j) {
            obs = sh_->value_in(&rec, a.reg);
            sr.source = SimRead::OwnCode;
          } else if (owner > 0) {
            sr.local = co_await catch_up(owner);
            obs = sh_->value_in(latest(owner), a.reg);
            sr.source = SimRead::OtherCode;
            sr.code = owner;
            sr.seen = known(owner);
          } else {
            obs = co_await co::read(a.reg);
            sr.local = steps_;
            sr.source = SimRead::Real;
          }
          sr.value = obs;
          rec.reads.push_back(std::move(sr));
          stop = ++reads >= cfg.segment_cap;
          break;
        }
        case ActionKind::Write:
          if (sh_->code_of(a.reg) != j)
            throw ProtocolError("code " + std::to_string(j) + " of " + cfg.b.name + " wrote " + a.reg.str() +
                                ", which it does not own");
          rec.owned.set(a.reg, a.value);
          stop = true;
          break;
        case ActionKind::Decide:
          if (a.layer == 0) {
            rec.actions.push_back(a);
            rec.decided = true;
            rec.decision = a.value;
            co_return box(std::move(rec));
          }
          stop = true;
          break;
        case ActionKind::Null:
          stop = true;
          break;
        case ActionKind::QueryFd:
          throw ProtocolError("code " + std::to_string(j) + " of " + cfg.b.name + " queried a failure detector");
      }
      rec.actions.push_back(a);
      auto t = b.resume(rec.state, obs);
      rec.state = std::move(t.state);
      rec.pending = std::move(t.action);
      if (stop) co_return box(std::move(rec));
    }
  }

  int i_;
  Value input_;
  std::optional<Value> departing_;
  std::map<std::pair<int, std::int64_t>, Value> proposals_;
};

class Server final : public Follower {
 public:
  Server(SharedPtr sh, int q) : Follower(std::move(sh)), q_(q) {
    const auto& b = sh_->cfg.b;
    if (!b.s.empty()) {
      part_ = b.s[q - 1];
      part_state_ = part_->init(Value());
    }
  }

 protected:
  co::Task<> body() override {
    const auto& L = labels();
    const auto& cfg = sh_->cfg;
    Value obs;
    if (part_) {
      auto t = part_->resume(part_state_, Value());
      part_state_ = std::move(t.state);
      part_pending_ = std::move(t.action);
    }
    for (;;) {
      auto vec = as_vector(co_await co::query(), cfg.k);
      for (int j = 1; j <= cfg.k; ++j) co_await co::write(RegisterId(L.oms, j - 1), Value(vec[j - 1]));
      std::vector<int> pars = co_await collect_pars();
      if (static_cast<int>(pars.size()) > cfg.k) {
        for (int j = 1; j <= cfg.k; ++j) {
          if (vec[j - 1] != sproc(q_)) continue;
          co_await lead(j);
        }
      }
      for (int s = 0; part_ && s < cfg.s_part_burst; ++s) co_await part_step();
    }
  }

 private:
  co::Task<> lead(int j) {
    const auto& L = labels();
    co_await catch_up(j);
    const CodeRecord* last = latest(j);
    if (last && last->decided) co_return;
    std::int64_t ell = known(j) + 1;
    Value est;
    for (int i = 1; i <= sh_->cfg.m && est.is_bottom(); ++i)
      est = co_await co::read(RegisterId(L.prop, j, ell, i - 1));
    if (est.is_bottom()) co_return;
    Value d = co_await attempt(j, ell, sh_->cfg.m + q_ - 1, est);
    if (!d.is_bottom()) co_await co::write(RegisterId(L.dec, j, ell), d);
  }

  // One action of B's S-part; reads of code registers go through the records.
  co::Task<> part_step() {
    Action a = part_pending_;
    Value obs;
    switch (a.kind) {
      case ActionKind::Read: {
        int owner = sh_->code_of(a.reg);
        if (owner > 0) {
          co_await catch_up(owner);
          obs = sh_->value_in(latest(owner), a.reg);
        } else {
          obs = co_await co::read(a.reg);
        }
        break;
      }
      case ActionKind::Write:
        if (sh_->code_of(a.reg) > 0)
          throw ProtocolError("S-part of " + sh_->cfg.b.name + " wrote code register " + a.reg.str());
        co_await co::emit(a);
        break;
      case ActionKind::QueryFd:
        obs = co_await co::query();
        break;
      case ActionKind::Decide:
        if (a.layer == 0) throw ProtocolError("S-part of " + sh_->cfg.b.name + " decided");
        co_await co::idle();
        break;
      case ActionKind::Null:
        co_await co::idle();
        break;
    }
    auto t = part_->resume(part_state_, obs);
    part_state_ = std::move(t.state);
    part_pending_ = std::move(t.action);
  }

  int q_;
  AutomatonPtr part_;
  Value part_state_;
  Action part_pending_;
};

}  // namespace

Algorithm k_codes_simulation(const KCodesConfig& cfg) {
  auto sh = std::make_shared<const Shared>(cfg);
  Algorithm a;
  a.name = cfg.name;
  a.layout = [sh](MemoryStore& mem) {
    const auto& c = sh->cfg;
    const auto& L = labels();
    mem.allocate(L.in.name(), c.m);
    mem.allocate(L.r.name(), c.m);
    mem.allocate(L.oms.name(), c.k, Value(sproc(1)));
    mem.allocate_family(L.prop.name());
    mem.allocate_family(L.reg.name());
    mem.allocate_family(L.dec.name());
    if (c.b.layout) c.b.layout(mem);
  };
  a.c_process = [sh](int i, const Value& input) -> ProcessPtr { return std::make_unique<Simulator>(sh, i, input); };
  a.s_process = [sh](int q) -> ProcessPtr { return std::make_unique<Server>(sh, q); };
  return a;
}

// ---------------------------------------------------------------------------
// Replay check

namespace {

// Real register contents over time, rebuilt from the trace.
class History {
 public:
  History(const KCodesConfig& cfg, const RunTrace& t) {
    k_codes_simulation(cfg).layout(init_);
    for (const auto& e : t.events)
      if (e.action.kind == ActionKind::Write) writes_[e.action.reg].emplace_back(e.time, e.action.value);
  }
  // Value of r just after the step at time `at`.
  Value at(const RegisterId& r, Time at) const {
    auto it = writes_.find(r);
    Value v = init_.is_allocated(r) ? init_.read(r) : Value();
    if (it == writes_.end()) return v;
    for (const auto& [tm, val] : it->second) {
      if (tm > at) break;
      v = val;
    }
    return v;
  }

 private:
  MemoryStore init_;
  std::unordered_map<RegisterId, std::vector<std::pair<Time, Value>>, RegisterIdHash> writes_;
};

}  // namespace

KCodesReport check_k_codes(const KCodesConfig& cfg, const RunTrace& t) {
  KCodesReport rep;
  Shared sh(cfg);
  const auto& L = labels();
  rep.records.resize(cfg.k);
  rep.commit_times.resize(cfg.k);
  auto fail = [&](std::string why, std::int64_t step) {
    rep.verdict = Verdict::fail(std::move(why), step);
    return rep;
  };

  std::vector<std::vector<Time>> local_times(cfg.m + 1);
  std::vector<char> registered(cfg.m + 1, 0);
  std::vector<char> used(cfg.k + 1, 0);
  std::map<std::pair<int, std::int64_t>, Value> decided;
  for (const auto& e : t.events) {
    if (e.pid.role == Role::C) local_times[e.pid.index].push_back(e.time);
    if (e.action.kind != ActionKind::Write) continue;
    const RegisterId& r = e.action.reg;
    if (r.name == L.r && !e.action.value.is_bottom() && !registered[r.first() + 1]) {
      registered[r.first() + 1] = 1;
      ++rep.simulators;
    }
    if (r.name != L.dec) continue;
    int j = static_cast<int>(r.index[0]);
    std::int64_t ell = r.index[1];
    auto key = std::make_pair(j, ell);
    auto it = decided.find(key);
    if (it != decided.end()) {
      if (!(it->second == e.action.value))
        return fail("two decisions for cons_" + std::to_string(j) + "," + std::to_string(ell), e.step);
      continue;
    }
    if (j < 1 || j > cfg.k) return fail("decision for unknown code " + std::to_string(j), e.step);
    if (ell != static_cast<std::int64_t>(rep.records[j - 1].size()) + 1)
      return fail("cons_" + std::to_string(j) + "," + std::to_string(ell) + " decided out of order", e.step);
    const CodeRecord* rec = try_unbox<CodeRecord>(e.action.value);
    if (!rec || rec->code != j || rec->ell != ell)
      return fail("malformed record for cons_" + std::to_string(j) + "," + std::to_string(ell), e.step);
    decided.emplace(key, e.action.value);
    rep.records[j - 1].push_back(*rec);
    rep.commit_times[j - 1].push_back(e.time);
    if (!used[j]) {
      used[j] = 1;
      ++rep.codes_used;
    }
    int bound = std::min(cfg.k, rep.simulators);
    if (rep.codes_used > bound)
      return fail(std::to_string(rep.codes_used) + " codes took steps with " + std::to_string(rep.simulators) +
                      " simulators",
                  e.step);
  }

  History hist(cfg, t);
  for (int j = 1; j <= cfg.k; ++j) {
    const Automaton& b = *cfg.b.c[j - 1];
    const auto& recs = rep.records[j - 1];
    const auto& times = rep.commit_times[j - 1];
    Value state;
    Action pending;
    RegMap owned;
    bool done = false;
    for (std::size_t l = 0; l < recs.size(); ++l) {
      const CodeRecord& rec = recs[l];
      std::string where = "code " + std::to_string(j) + " segment " + std::to_string(l + 1);
      if (done) return fail(where + " follows a decision", -1);
      if (l == 0) {
        auto tr = b.resume(b.init(rec.input), Value());
        state = tr.state;
        pending = tr.action;
      }
      Time lo = l == 0 ? -1 : times[l - 1];
      std::size_t next_read = 0;
      for (const Action& a : rec.actions) {
        if (!(a == pending)) return fail(where + ": action " + a.str() + " is not B's next step " + pending.str(), -1);
        Value obs;
        if (a.kind == ActionKind::Read) {
          if (next_read >= rec.reads.size()) return fail(where + ": missing read provenance", -1);
          const SimRead& sr = rec.reads[next_read++];
          if (!(sr.reg == a.reg)) return fail(where + ": read provenance mismatch", -1);
          Value expect;
          if (sr.source == SimRead::OwnCode) {
            const Value* v = owned.find(a.reg);
            expect = v ? *v : sh.init_of(a.reg);
          } else {
            if (sr.proposer < 1 || sr.proposer > cfg.m || sr.local < 1 ||
                sr.local > static_cast<std::int64_t>(local_times[sr.proposer].size()))
              return fail(where + ": read placed at an unknown step", -1);
            Time at = local_times[sr.proposer][sr.local - 1];
            if (at <= lo || at >= times[l])
              return fail(where + ": read of " + a.reg.str() + " at time " + std::to_string(at) +
                              " outside its segment",
                          -1);
            if (sr.source == SimRead::Real) {
              expect = hist.at(a.reg, at);
            } else {
              const auto& ct = rep.commit_times[sr.code - 1];
              std::int64_t committed = std::lower_bound(ct.begin(), ct.end(), at) - ct.begin();
              if (committed != sr.seen)
                return fail(where + ": read of " + a.reg.str() + " saw " + std::to_string(sr.seen) +
                                " records of code " + std::to_string(sr.code) + ", linearization gives " +
                                std::to_string(committed),
                            -1);
              const auto& other = rep.records[sr.code - 1];
              expect = sh.value_in(committed ? &other[committed - 1] : nullptr, a.reg);
            }
          }
          if (!(expect == sr.value))
            return fail(where + ": read of " + a.reg.str() + " returned " + sr.value.str() + ", expected " +
                            expect.str(),
                        -1);
          obs = sr.value;
        } else if (a.kind == ActionKind::Write) {
          owned.set(a.reg, a.value);
        } else if (a.kind == ActionKind::Decide && a.layer == 0) {
          done = true;
          break;
        }
        auto tr = b.resume(state, obs);
        state = tr.state;
        pending = tr.action;
      }
      if (!(state == rec.state) || !(pending == rec.pending) || !(owned == rec.owned) || done != rec.decided)
        return fail(where + ": recorded state differs from the replay of B", -1);
    }
  }
  rep.verdict = Verdict::pass(std::to_string(rep.codes_used) + " codes, " + std::to_string(rep.simulators) +
                              " simulators");
  return rep;
}

}  // namespace efd
