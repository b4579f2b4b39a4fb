#include "efd/executor.hpp"

namespace efd {

namespace {

class NullProcess final : public Process {
 public:
  void start() override {}
  const Action& pending() const override { return a_; }
  void advance(const Value&) override {}

 private:
  Action a_;
};

}  // namespace

Algorithm from_automata(std::string name, std::function<void(MemoryStore&)> layout,
                        std::vector<AutomatonPtr> c, std::vector<AutomatonPtr> s) {
  Algorithm a;
  a.name = std::move(name);
  a.layout = std::move(layout);
  a.c_process = [c](int i, const Value& input) -> ProcessPtr {
    return std::make_unique<AutomatonProcess>(c.at(i - 1), input);
  };
  if (!s.empty()) {
    a.s_process = [s](int q) -> ProcessPtr { return std::make_unique<AutomatonProcess>(s.at(q - 1), Value()); };
  }
  return a;
}

RunTrace execute(const Algorithm& alg, int m, int n, const FailurePattern& f, const FdHistory& h,
                 SchedulePolicy& policy, const std::vector<Value>& inputs, const ExecOptions& opts) {
  MemoryStore mem;
  return execute(alg, m, n, f, h, policy, inputs, opts, mem);
}

RunTrace execute(const Algorithm& alg, int m, int n, const FailurePattern& f, const FdHistory& h,
                 SchedulePolicy& policy, const std::vector<Value>& inputs, const ExecOptions& opts,
                 MemoryStore& mem) {
  if (static_cast<int>(inputs.size()) != m) throw ExecutionError("inputs must have m entries");
  if (f.n() != n) throw ExecutionError("failure pattern size differs from n");
  if (alg.layout) alg.layout(mem);

  RunTrace t;
  t.m = m;
  t.n = n;
  t.inputs = inputs;
  t.pattern = f;
  t.horizon = opts.horizon;
  t.digest = opts.digest;

  std::vector<ProcessPtr> cs(m), ss(n);
  std::vector<char> invited(m, 0), decided(m, 0);
  int open = 0;
  for (int i = 1; i <= m; ++i) {
    if (inputs[i - 1].is_bottom()) continue;
    invited[i - 1] = 1;
    ++open;
    cs[i - 1] = alg.c_process(i, inputs[i - 1]);
    cs[i - 1]->start();
  }
  for (int q = 1; q <= n; ++q) {
    ss[q - 1] = alg.s_process ? alg.s_process(q) : std::make_unique<NullProcess>();
    ss[q - 1]->start();
  }

  SchedView view{0, m, n, &invited, &decided, &f};
  static const Action kNull;
  t.stop = StopReason::Horizon;
  for (Time step = 0; step < opts.horizon; ++step) {
    if (opts.stop_when_decided && open == 0) {
      t.stop = StopReason::Quiescent;
      break;
    }
    view.now = step;
    auto next = policy.next(view);
    if (!next) {
      t.stop = StopReason::ScriptEnd;
      break;
    }
    ProcessId pid = *next;
    Process* proc = nullptr;
    bool frozen = false;  // decided C-process: null steps only
    if (pid.role == Role::C) {
      if (pid.index < 1 || pid.index > m || !invited[pid.index - 1])
        throw ExecutionError("policy scheduled a non-participant " + to_string(pid));
      proc = cs[pid.index - 1].get();
      frozen = decided[pid.index - 1];
    } else {
      if (pid.index < 1 || pid.index > n) throw ExecutionError("policy scheduled unknown " + to_string(pid));
      if (!f.alive(pid.index, step)) throw ExecutionError("policy scheduled crashed " + to_string(pid));
      proc = ss[pid.index - 1].get();
    }
    const Action& a = frozen ? kNull : proc->pending();
    Value obs;
    switch (a.kind) {
      case ActionKind::Read:
        obs = mem.read(a.reg);
        break;
      case ActionKind::Write:
        mem.write(a.reg, a.value);
        break;
      case ActionKind::QueryFd:
        if (pid.role == Role::C) throw ProtocolError("C-process " + to_string(pid) + " queried the failure detector");
        obs = h.value_at(pid.index, step);
        break;
      case ActionKind::Decide:
        if (pid.role == Role::S && a.layer == 0) throw ProtocolError("S-process " + to_string(pid) + " decided");
        if (a.layer == 0) {
          decided[pid.index - 1] = 1;
          --open;
        }
        break;
      case ActionKind::Null:
        break;
    }
    t.events.push_back(Event{step, step, pid, a, obs});
    if (opts.observer) opts.observer(t.events.back(), mem);
    if (!frozen && !(a.kind == ActionKind::Decide && a.layer == 0)) proc->advance(obs);
  }
  return t;
}

}  // namespace efd
