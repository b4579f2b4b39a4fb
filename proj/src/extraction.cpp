#include "efd/extraction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace efd {

// ---------------------------------------------------------------- DAG

std::size_t SampleDag::size() const {
  std::size_t s = 0;
  for (const auto& v : by_q_) s += v.size();
  return s;
}

const DagVertex& SampleDag::add(int q, Time t, Value d, std::vector<std::int64_t> seen) {
  if (q < 1 || q > n_) throw std::out_of_range("dag: no S-process " + std::to_string(q));
  if (static_cast<int>(seen.size()) != n_) throw std::invalid_argument("dag: seen has wrong width");
  for (int p = 1; p <= n_; ++p) {
    if (seen[p - 1] < 0 || seen[p - 1] > count(p))
      throw std::invalid_argument("dag: vertex sees a vertex that does not exist");
  }
  if (seen[q - 1] != count(q)) throw std::invalid_argument("dag: a querier sees all its own vertices");
  auto& list = by_q_[q - 1];
  if (!list.empty() && list.back().time >= t) throw std::invalid_argument("dag: query times must increase");
  list.push_back(DagVertex{q, count(q) + 1, t, std::move(d), std::move(seen)});
  return list.back();
}

bool SampleDag::precedes(VertexRef u, VertexRef v) const {
  if (u == v) return false;
  return u.seq <= vertex(v).seen[u.q - 1];
}

std::vector<std::pair<VertexRef, VertexRef>> SampleDag::edges() const {
  std::vector<std::pair<VertexRef, VertexRef>> out;
  for (const auto& list : by_q_) {
    for (const auto& v : list) {
      for (int p = 1; p <= n_; ++p)
        for (std::int64_t s = 1; s <= v.seen[p - 1]; ++s) out.push_back({{p, s}, {v.q, v.seq}});
    }
  }
  return out;
}

bool SampleDag::acyclic() const {
  std::map<VertexRef, std::vector<VertexRef>> succ;
  std::map<VertexRef, std::int64_t> indeg;
  for (const auto& list : by_q_)
    for (const auto& v : list) indeg[{v.q, v.seq}] = 0;
  for (const auto& [u, v] : edges()) {
    succ[u].push_back(v);
    ++indeg[v];
  }
  std::deque<VertexRef> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push_back(v);
  std::size_t done = 0;
  while (!ready.empty()) {
    VertexRef u = ready.front();
    ready.pop_front();
    ++done;
    for (const auto& v : succ[u])
      if (--indeg[v] == 0) ready.push_back(v);
  }
  return done == indeg.size();
}

DagBuilder::DagBuilder(FdHistory h, FailurePattern f, std::uint64_t seed)
    : h_(std::move(h)), f_(std::move(f)), seed_(seed), rng_(seed) {
  known_.assign(static_cast<std::size_t>(h_.n()), std::vector<std::int64_t>(static_cast<std::size_t>(h_.n()), 0));
}

void DagBuilder::round(SampleDag& g) {
  int n = g.n();
  for (int q = 1; q <= n; ++q) {
    Time t = round_ * n + (q - 1);
    if (!f_.alive(q, t)) continue;
    auto& k = known_[q - 1];
    for (int p = 1; p <= n; ++p) {
      std::int64_t have = g.count(p);
      if (p == q || seed_ == 0) {
        k[p - 1] = have;
      } else {
        std::int64_t lag = static_cast<std::int64_t>(rng_.below(3));
        k[p - 1] = std::max(k[p - 1], std::max<std::int64_t>(0, have - lag));
      }
    }
    g.add(q, t, h_.value_at(q, t), k);
  }
  ++round_;
}

SampleDag build_dag(const FdHistory& h, const FailurePattern& f, int rounds, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("build_dag: rounds must be at least 1");
  SampleDag g(h.n());
  DagBuilder b(h, f, seed);
  for (int r = 0; r < rounds; ++r) b.round(g);
  return g;
}

DagView full_view(const SampleDag& g) {
  DagView v(static_cast<std::size_t>(g.n()));
  for (int q = 1; q <= g.n(); ++q) v[q - 1] = g.count(q);
  return v;
}

// ---------------------------------------------------------------- A_sim

namespace {

constexpr int kNone = 0, kUnsafe = 1, kSafe = 2, kWithdrawn = 3;

bool same_action(const Action& a, const Action& b) {
  return a.kind == b.kind && a.reg == b.reg && a.value == b.value && a.layer == b.layer;
}

}  // namespace

ASim::ASim(std::shared_ptr<const Protocol> a, std::shared_ptr<const SampleDag> g, Vec inputs, bool record)
    : a_(std::move(a)), g_(std::move(g)), inputs_(std::move(inputs)), record_(record) {
  if (static_cast<int>(inputs_.size()) != a_->m) throw std::invalid_argument("a_sim: one input per C-process");
  if (!a_->s.empty() && static_cast<int>(a_->s.size()) != g_->n())
    throw std::invalid_argument("a_sim: DAG width differs from the S-part");
  if (a_->layout) a_->layout(mem_);
  c_.resize(static_cast<std::size_t>(a_->m));
  s_.resize(static_cast<std::size_t>(g_->n()));
  for (int q = 1; q <= static_cast<int>(a_->s.size()); ++q) {
    auto& s = s_[q - 1];
    const auto& aut = a_->s[q - 1];
    Transition t = aut->resume(aut->init(Value()), Value());
    s.state = std::move(t.state);
    s.pending = std::move(t.action);
    s.sa.resize(c_.size());
  }
  trace_.m = a_->m;
  trace_.n = g_->n();
  trace_.inputs = inputs_;
  trace_.stop = StopReason::ScriptEnd;
}

void ASim::log(ProcessId p, const Action& a, const Value& obs, Time t, std::int64_t key) {
  if (!record_) return;
  Event e;
  keys_.push_back(key >= 0 ? key : 2 * static_cast<std::int64_t>(trace_.events.size()) + 2);
  e.time = t;
  e.pid = p;
  e.action = a;
  e.observation = obs;
  trace_.events.push_back(std::move(e));
}

void ASim::c_step(int j) {
  auto& c = c_[j - 1];
  const auto& aut = a_->c[j - 1];
  if (!c.started) {
    Transition t = aut->resume(aut->init(inputs_[j - 1]), Value());
    c.state = std::move(t.state);
    c.pending = std::move(t.action);
    c.started = true;
  }
  Value obs;
  const Action& a = c.pending;
  switch (a.kind) {
    case ActionKind::Read:
      obs = mem_.read(a.reg);
      break;
    case ActionKind::Write:
      mem_.write(a.reg, a.value);
      break;
    case ActionKind::Decide:
      if (a.layer == 0) {
        c.decided = true;
        c.out = a.value;
      }
      break;
    case ActionKind::QueryFd:
      throw ProtocolError("a_sim: C-process p" + std::to_string(j) + " queried the detector");
    case ActionKind::Null:
      break;
  }
  log(cproc(j), a, obs, clock_);
  if (c.decided) return;
  Transition t = aut->resume(c.state, obs);
  c.state = std::move(t.state);
  c.pending = std::move(t.action);
}

std::optional<std::int64_t> ASim::eligible(int q, const DagView& view) const {
  std::int64_t top = std::min(view[q - 1], g_->count(q));
  for (std::int64_t seq = s_[q - 1].last_seq + 1; seq <= top; ++seq) {
    const auto& v = g_->vertex(q, seq);
    bool ok = true;
    for (int p = 1; p <= n() && ok; ++p)
      if (p != q && v.seen[p - 1] < s_[p - 1].last_seq) ok = false;
    if (ok) return seq;
  }
  return std::nullopt;
}

RunTrace ASim::simulated() const {
  RunTrace t = trace_;
  std::vector<std::size_t> order(t.events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return keys_[x] < keys_[y]; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    t.events[i] = trace_.events[order[i]];
    t.events[i].step = static_cast<std::int64_t>(i);
  }
  return t;
}

void ASim::apply(int q, const Value& obs, std::int64_t seq, std::int64_t key) {
  auto& s = s_[q - 1];
  Time t = clock_;
  if (s.pending.kind == ActionKind::QueryFd) {
    t = g_->vertex(q, seq).time;
    clock_ = std::max(clock_, t);
    s.last_seq = seq;
  }
  log(sproc(q), s.pending, obs, t, key);
  ++s.steps;
  s.last_at = steps_;
  for (auto& p : s.sa) p = Proposal{};
  Transition tr = a_->s[q - 1]->resume(s.state, obs);
  s.state = std::move(tr.state);
  s.pending = std::move(tr.action);
}

bool ASim::s_step(int j, int q, const DagView& view) {
  auto& s = s_[q - 1];
  switch (s.pending.kind) {
    case ActionKind::Write:
      mem_.write(s.pending.reg, s.pending.value);
      apply(q, Value(), 0, -1);
      return true;
    case ActionKind::Null:
      apply(q, Value(), 0, -1);
      return true;
    case ActionKind::Decide:
      throw ProtocolError("a_sim: S-process q" + std::to_string(q) + " decided");
    default:
      break;
  }
  auto& mine = s.sa[j - 1];
  if (mine.level == kNone) {
    // Sorts right after the last logged event.
    std::int64_t key = 2 * static_cast<std::int64_t>(trace_.events.size()) + 1;
    if (s.pending.kind == ActionKind::Read) {
      mine = Proposal{kUnsafe, mem_.read(s.pending.reg), 0, key};
    } else {
      auto seq = eligible(q, view);
      if (!seq) return false;
      mine = Proposal{kUnsafe, g_->vertex(q, *seq).d, *seq, key};
    }
    c_[j - 1].window = q;
    return true;
  }
  const Proposal* winner = nullptr;
  for (const auto& p : s.sa) {
    if (p.level == kUnsafe) return false;
    if (p.level == kSafe && !winner) winner = &p;
  }
  if (!winner) return false;
  Proposal w = *winner;
  apply(q, w.value, w.seq, w.key);
  return true;
}

void ASim::step(int j, const DagView& view) {
  auto& c = c_[j - 1];
  if (c.decided) return;
  ++steps_;
  ++c.steps;
  if (c.window) {
    auto& sa = s_[c.window - 1].sa;
    bool other_safe = false;
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (static_cast<int>(i) != j - 1 && sa[i].level == kSafe) other_safe = true;
    sa[j - 1].level = other_safe ? kWithdrawn : kSafe;
    c.window = 0;
    return;
  }
  if (!c.s_phase) {
    c.s_phase = true;
    c_step(j);
    return;
  }
  c.s_phase = false;
  int n = static_cast<int>(a_->s.size());
  for (int i = 0; i < n; ++i) {
    int q = (c.rr - 1 + i) % n + 1;
    if (!s_step(j, q, view)) continue;
    c.rr = c.window ? q : q % n + 1;
    return;
  }
}

std::vector<int> ASim::latest_codes() const {
  std::vector<int> qs;
  for (int q = 1; q <= n(); ++q)
    if (s_[q - 1].steps > 0) qs.push_back(q);
  std::sort(qs.begin(), qs.end(), [&](int x, int y) { return s_[x - 1].last_at > s_[y - 1].last_at; });
  return qs;
}

Verdict replay_simulated(const Protocol& a, const SampleDag& g, const RunTrace& sim) {
  MemoryStore mem;
  if (a.layout) a.layout(mem);
  struct Slot {
    bool started = false;
    bool done = false;
    Value state;
    Action pending;
  };
  std::vector<Slot> cs(static_cast<std::size_t>(a.m)), ss(a.s.size());
  std::vector<std::int64_t> last_seq(static_cast<std::size_t>(g.n()), 0);
  for (const auto& e : sim.events) {
    bool is_c = e.pid.role == Role::C;
    auto& slot = is_c ? cs.at(e.pid.index - 1) : ss.at(e.pid.index - 1);
    const auto& aut = is_c ? a.c[e.pid.index - 1] : a.s[e.pid.index - 1];
    if (slot.done) return Verdict::fail(to_string(e.pid) + " stepped after deciding", e.step);
    if (!slot.started) {
      Transition t = aut->resume(aut->init(is_c ? sim.inputs[e.pid.index - 1] : Value()), Value());
      slot.state = std::move(t.state);
      slot.pending = std::move(t.action);
      slot.started = true;
    }
    if (!same_action(slot.pending, e.action))
      return Verdict::fail(to_string(e.pid) + " should take " + slot.pending.str() + ", trace has " +
                               e.action.str(),
                           e.step);
    switch (e.action.kind) {
      case ActionKind::Read:
        if (!(mem.read(e.action.reg) == e.observation))
          return Verdict::fail("read of " + e.action.reg.str() + " returned a value never current", e.step);
        break;
      case ActionKind::Write:
        mem.write(e.action.reg, e.action.value);
        break;
      case ActionKind::QueryFd: {
        int q = e.pid.index;
        std::int64_t found = 0;
        for (std::int64_t s = last_seq[q - 1] + 1; s <= g.count(q) && !found; ++s)
          if (g.vertex(q, s).time == e.time) found = s;
        if (!found) return Verdict::fail("query of q" + std::to_string(q) + " matches no fresh vertex", e.step);
        if (!(g.vertex(q, found).d == e.observation))
          return Verdict::fail("query of q" + std::to_string(q) + " differs from its vertex", e.step);
        last_seq[q - 1] = found;
        break;
      }
      case ActionKind::Decide:
        if (e.action.layer == 0 && is_c) slot.done = true;
        break;
      case ActionKind::Null:
        break;
    }
    if (slot.done) continue;
    Transition t = aut->resume(slot.state, e.observation);
    slot.state = std::move(t.state);
    slot.pending = std::move(t.action);
  }
  return Verdict::pass(std::to_string(sim.events.size()) + " simulated steps replay");
}

// ---------------------------------------------------------------- exploration

Explorer::Explorer(std::shared_ptr<const Protocol> a, std::shared_ptr<const SampleDag> g, std::vector<Vec> inputs,
                   int k)
    : a_(std::move(a)), g_(std::move(g)), inputs_(std::move(inputs)), k_(k) {
  if (k_ < 1 || k_ >= g_->n()) throw std::invalid_argument("explore: k must be in 1..n-1");
  std::vector<int> p(static_cast<std::size_t>(a_->m));
  for (int i = 0; i < a_->m; ++i) p[i] = i + 1;
  do perms_.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
}

bool Explorer::open_root() {
  if (input_idx_ >= inputs_.size()) return false;
  Frame f{ASim(a_, g_, inputs_[input_idx_]), 0, 0, 0, {}, false, {}, 0};
  f.input_index = input_idx_;
  f.perm_index = perm_idx_;
  const auto& pi = perms_[perm_idx_];
  f.corridor.assign(pi.begin(), pi.begin() + std::min<std::size_t>(pi.size(), static_cast<std::size_t>(k_ + 1)));
  std::sort(f.corridor.begin(), f.corridor.end());
  stack_.push_back(std::move(f));
  if (++perm_idx_ == perms_.size()) {
    perm_idx_ = 0;
    ++input_idx_;
  }
  return true;
}

std::vector<int> Explorer::output_of(const ASim& sim) const {
  auto need = static_cast<std::size_t>(g_->n() - k_);
  auto latest = sim.latest_codes();
  std::vector<int> out(latest.begin(), latest.begin() + std::min(need, latest.size()));
  // Not enough history: top up with the largest indices.
  for (int q = g_->n(); q >= 1 && out.size() < need; --q)
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  std::sort(out.begin(), out.end());
  return out;
}

bool Explorer::step(const DagView& view, NodeInfo* info) {
  while (true) {
    while (stack_.empty())
      if (!open_root()) return false;
    Frame& top = stack_.back();
    if (!top.entered) {
      const auto& pi = perms_[top.perm_index];
      auto& P = top.corridor;
      for (std::size_t i = 0; i < P.size();) {
        if (!top.sim.decided(P[i])) {
          ++i;
          continue;
        }
        P.erase(P.begin() + static_cast<std::ptrdiff_t>(i));
        for (int p : pi) {
          if (!top.sim.appeared(p) && std::find(P.begin(), P.end(), p) == P.end()) {
            P.push_back(p);
            break;
          }
        }
      }
      std::sort(P.begin(), P.end());
      // Corridors by (size, sorted indices); inside one, steps in π order.
      std::vector<std::vector<int>> subs;
      for (unsigned mask = 1; mask < (1u << P.size()); ++mask) {
        std::vector<int> s;
        for (std::size_t b = 0; b < P.size(); ++b)
          if (mask & (1u << b)) s.push_back(P[b]);
        subs.push_back(std::move(s));
      }
      std::sort(subs.begin(), subs.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
      });
      for (const auto& s : subs)
        for (int p : pi)
          if (std::find(s.begin(), s.end(), p) != s.end()) top.children.push_back({s, p});
      top.entered = true;
      ++visited_;
      if (info) {
        info->input_index = top.input_index;
        info->perm_index = top.perm_index;
        info->depth = top.depth;
        info->last = top.last;
        info->sigma_hash = top.hash;
        info->corridor = P;
        info->undecided = 0;
        for (int j = 1; j <= a_->m; ++j)
          if (top.sim.appeared(j) && !top.sim.decided(j)) ++info->undecided;
        info->output = output_of(top.sim);
      }
      return true;
    }
    if (top.next >= top.children.size()) {
      stack_.pop_back();
      continue;
    }
    auto [sub, p] = top.children[top.next++];
    Frame child{top.sim, top.input_index, top.perm_index, top.depth + 1, {}, false, {}, 0};
    child.last = p;
    child.hash = mix64(top.hash, static_cast<std::uint64_t>(p));
    child.corridor = std::move(sub);
    if (top.next == top.children.size()) stack_.pop_back();
    child.sim.step(p, view);
    stack_.push_back(std::move(child));
  }
}

// ---------------------------------------------------------------- driver

ExtractionReport extract_anti_omega(const ExtractionConfig& cfg) {
  int n = cfg.h.n();
  if (cfg.f.n() != n) throw std::invalid_argument("extract: pattern and oracle disagree on n");
  if (cfg.w_stab < 1 || cfg.budget < 1) throw std::invalid_argument("extract: budget and W_stab must be positive");
  std::vector<Vec> full;
  for (auto& v : enumerate_inputs(cfg.spec))
    if (std::none_of(v.begin(), v.end(), [](const Value& x) { return x.is_bottom(); })) full.push_back(v);
  if (full.empty()) throw SpecError("extract: task has no full input vector");

  auto dag = std::make_shared<SampleDag>(n);
  auto proto = std::make_shared<const Protocol>(cfg.a);
  DagBuilder builder(cfg.h, cfg.f, cfg.seed);
  Rng speed(mix64(cfg.seed, 0x5eedULL));

  struct Emulator {
    Explorer ex;
    DagView view;
    std::int64_t emitted = 0;
    bool done = false;
  };
  std::vector<Emulator> em;
  for (int q = 1; q <= n; ++q)
    em.push_back({Explorer(proto, dag, full, cfg.k), DagView(static_cast<std::size_t>(n), 0), 0, false});

  ExtractionReport rep;
  if (cfg.log_nodes) rep.nodes_log.resize(static_cast<std::size_t>(n));
  std::vector<NodeInfo> last(static_cast<std::size_t>(n));
  for (std::int64_t r = 0;; ++r) {
    builder.round(*dag);
    bool active = false;
    for (int q = 1; q <= n; ++q) {
      auto& e = em[q - 1];
      if (e.done || !cfg.f.alive(q, r * n + (q - 1))) continue;
      active = true;
      // What q knows: its latest vertex's causal past plus that vertex.
      if (dag->count(q) > 0) {
        const auto& v = dag->vertex(q, dag->count(q));
        for (int p = 1; p <= n; ++p) e.view[p - 1] = std::max(e.view[p - 1], v.seen[p - 1]);
        e.view[q - 1] = dag->count(q);
      }
      int best = 0;
      for (int p = 1; p <= n; ++p) {
        if (p == q || !cfg.f.alive(p, r * n + (p - 1))) continue;
        if (em[p - 1].ex.visited() > (best ? em[best - 1].ex.visited() : e.ex.visited())) best = p;
      }
      if (best) {
        e.ex = em[best - 1].ex;
        for (int p = 1; p <= n; ++p) e.view[p - 1] = std::max(e.view[p - 1], em[best - 1].view[p - 1]);
        ++rep.adoptions;
      }
      int burst = cfg.seed ? 1 + static_cast<int>(speed.below(2)) : 1;
      for (int b = 0; b < burst; ++b) {
        if (e.emitted >= cfg.budget) {
          e.done = true;
          break;
        }
        NodeInfo ni;
        if (!e.ex.step(e.view, &ni)) {
          e.done = true;
          break;
        }
        rep.max_undecided = std::max(rep.max_undecided, ni.undecided);
        rep.stream.push_back({q, e.emitted++, ni.output});
        ++rep.nodes;
        if (cfg.log_nodes) rep.nodes_log[q - 1].push_back(ni);
        last[q - 1] = std::move(ni);
      }
    }
    if (!active) break;
  }
  rep.dag_vertices = dag->size();

  auto correct = cfg.f.correct_set();
  std::set<int> candidates = correct;
  for (int q : correct) {
    std::vector<const Emission*> mine;
    for (const auto& e : rep.stream)
      if (e.emulator == q) mine.push_back(&e);
    if (static_cast<std::int64_t>(mine.size()) < cfg.w_stab) {
      rep.verdict = Verdict::inconclusive("q" + std::to_string(q) + " emitted " + std::to_string(mine.size()) +
                                          " sets, fewer than W_stab");
      return rep;
    }
    for (auto it = mine.end() - cfg.w_stab; it != mine.end(); ++it)
      for (int x : (*it)->set) candidates.erase(x);
  }
  if (!correct.empty()) rep.corridor = last[*correct.begin() - 1].corridor;
  if (candidates.empty()) {
    rep.verdict = Verdict::inconclusive("no correct S-process stayed excluded over the last " +
                                        std::to_string(cfg.w_stab) + " emissions");
    return rep;
  }
  rep.excluded = *candidates.begin();
  rep.verdict = Verdict::pass("q" + std::to_string(rep.excluded) + " excluded from the last " +
                              std::to_string(cfg.w_stab) + " emissions of every correct emulator");
  return rep;
}

}  // namespace efd
