#include "doctest.h"

#include "efd/executor.hpp"
#include "efd/memory.hpp"
#include "efd/rng.hpp"

using namespace efd;

TEST_CASE("allocate creates registers holding init") {
  MemoryStore m;
  auto regs = m.allocate("R", 3);
  REQUIRE(regs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(regs[i].first() == static_cast<std::int64_t>(i));
    CHECK(m.read(regs[i]).is_bottom());
  }
  auto v = m.allocate("V", 1, Value(9));
  CHECK(m.read(v[0]) == Value(9));
  CHECK_THROWS_AS(m.allocate("R", 3), MemoryError);
  CHECK_THROWS_AS(m.allocate("R", 1), MemoryError);
}

TEST_CASE("reads and writes on unallocated registers fail") {
  MemoryStore m;
  RegisterId x(Label("X"), 0);
  CHECK_THROWS_AS(m.read(x), MemoryError);
  CHECK_THROWS_AS(m.write(x, Value(1)), MemoryError);
  m.allocate("R", 2);
  CHECK_THROWS_AS(m.read(RegisterId(Label("R"), 2)), MemoryError);
}

TEST_CASE("last write wins") {
  MemoryStore m;
  auto r = m.allocate("R", 2);
  m.write(r[1], Value(1));
  CHECK(m.read(r[1]) == Value(1));
  m.write(r[1], Value(2));
  CHECK(m.read(r[1]) == Value(2));
  auto t = Value::tuple({Value(1), Value(1), Value(1)});
  m.write(r[0], t);
  CHECK(m.read(r[0]) == t);
  CHECK(m.collect({r[0]}) == std::vector<Value>{t});
}

TEST_CASE("families accept any index") {
  MemoryStore m;
  m.allocate_family("DEC", Value(0));
  RegisterId a(Label("DEC"), 4, 17);
  CHECK(m.read(a) == Value(0));
  m.write(a, Value(3));
  CHECK(m.read(a) == Value(3));
  CHECK_THROWS_AS(m.allocate("DEC", 1), MemoryError);
}

TEST_CASE("register ids round-trip through text") {
  Label l("REG");
  for (RegisterId r : {RegisterId(l), RegisterId(l, 3), RegisterId(l, 1, 2), RegisterId(l, 0, 5, 7)}) {
    CHECK(RegisterId::parse(r.str()) == r);
  }
}

TEST_CASE("values round-trip through text") {
  std::vector<Value> vs{Value(), Value(-4), Value(cproc(3)), Value(sproc(2)),
                        Value::tuple({Value(1), Value::tuple({Value(), Value(sproc(1))})})};
  for (const auto& v : vs) {
    CHECK(Value::parse(v.str()) == v);
  }
  CHECK_FALSE(Value() == Value(0));
}

namespace {

// Writes a scripted sequence of (register, value) pairs, then decides.
class Scripted final : public Automaton {
 public:
  explicit Scripted(std::vector<Action> steps) : steps_(std::move(steps)) {}
  Role role() const override { return Role::C; }
  Value init(const Value&) const override { return Value(0); }
  Transition resume(const Value& state, const Value&) const override {
    auto pc = static_cast<std::size_t>(state.as_int());
    if (pc < steps_.size()) return {steps_[pc], Value(static_cast<std::int64_t>(pc + 1))};
    return {Action::decide(Value(0)), state};
  }

 private:
  std::vector<Action> steps_;
};

}  // namespace

TEST_CASE("executor replays reads against writes in trace order") {
  Label r("R");
  auto layout = [](MemoryStore& m) { m.allocate("R", 3); };
  auto p1 = std::make_shared<Scripted>(std::vector<Action>{Action::write({r, 1}, Value::tuple({1, 1, 1}))});
  auto p2 = std::make_shared<Scripted>(std::vector<Action>{Action::write({r, 2}, Value(5)), Action::read({r, 1})});
  auto alg = from_automata("scripted", layout, {p1, p2});
  auto f = FailurePattern::make(2, {});
  auto h = make_oracle(FdKind::Trivial, f, 1, 1);
  ScriptPolicy pol({cproc(1), cproc(2), cproc(2)});
  auto t = execute(alg, 2, 2, f, h, pol, {Value(1), Value(2)}, {});
  REQUIRE(t.events.size() == 3);
  CHECK(t.events[2].observation == Value::tuple({1, 1, 1}));
}

TEST_CASE("non-atomic collect sees old and new values across slots") {
  // Reader collects R[0], R[1]; writer overwrites both in between.
  Label r("R");
  auto layout = [](MemoryStore& m) { m.allocate("R", 2, Value(0)); };
  auto reader = std::make_shared<Scripted>(std::vector<Action>{Action::write({Label("IN"), 0}, Value(1)),
                                                               Action::read({r, 0}), Action::read({r, 1})});
  auto writer = std::make_shared<Scripted>(std::vector<Action>{Action::write({r, 0}, Value(1)),
                                                               Action::write({r, 1}, Value(1))});
  auto alg = from_automata("collect", [&](MemoryStore& m) {
    layout(m);
    m.allocate("IN", 1);
  }, {reader, writer});
  auto f = FailurePattern::make(2, {});
  auto h = make_oracle(FdKind::Trivial, f, 1, 1);
  ScriptPolicy pol({cproc(1), cproc(1), cproc(2), cproc(2), cproc(1)});
  auto t = execute(alg, 2, 2, f, h, pol, {Value(1), Value(2)}, {});
  CHECK(t.events[1].observation == Value(0));
  CHECK(t.events[4].observation == Value(1));
}

TEST_CASE("replaying a recorded schedule reproduces every read") {
  // Random writers and readers over a small array; the recorded schedule is
  // replayed on a fresh store and must observe the same values.
  Label r("R");
  Rng rng(42);
  std::vector<AutomatonPtr> autos;
  for (int i = 0; i < 3; ++i) {
    std::vector<Action> steps;
    for (int s = 0; s < 20; ++s) {
      RegisterId reg(r, static_cast<std::int64_t>(rng.below(3)));
      steps.push_back(rng.chance(1, 2) ? Action::read(reg) : Action::write(reg, Value(i * 100 + s)));
    }
    autos.push_back(std::make_shared<Scripted>(steps));
  }
  auto alg = from_automata("mix", [](MemoryStore& m) { m.allocate("R", 3); }, autos);
  auto f = FailurePattern::make(3, {});
  auto h = make_oracle(FdKind::Trivial, f, 1, 1);
  FairRandomPolicy pol(7, 8);
  auto t1 = execute(alg, 3, 3, f, h, pol, {Value(1), Value(2), Value(3)}, {});
  std::vector<ProcessId> script;
  for (const auto& e : t1.events) script.push_back(e.pid);
  ScriptPolicy replay(script);
  auto t2 = execute(alg, 3, 3, f, h, replay, {Value(1), Value(2), Value(3)}, {});
  REQUIRE(t1.events.size() == t2.events.size());
  for (std::size_t i = 0; i < t1.events.size(); ++i) CHECK(t1.events[i].observation == t2.events[i].observation);
}
