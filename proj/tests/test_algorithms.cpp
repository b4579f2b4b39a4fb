#include "doctest.h"

#include <set>

#include "efd/algorithms.hpp"
#include "efd/checks.hpp"
#include "efd/executor.hpp"

using namespace efd;

namespace {

FailurePattern no_crash(int n) { return FailurePattern::make(n, {}); }

FdHistory trivial(const FailurePattern& f) { return make_oracle(FdKind::Trivial, f, 1, 0); }

RunTrace run(const Protocol& p, int n, SchedulePolicy& pol, const Vec& inputs, Time horizon = 20000,
             const FailurePattern* fp = nullptr, const FdHistory* h = nullptr) {
  FailurePattern f = fp ? *fp : no_crash(n);
  FdHistory hist = h ? *h : trivial(f);
  ExecOptions o;
  o.horizon = horizon;
  return execute(p.algorithm(), p.m, n, f, hist, pol, inputs, o);
}

std::vector<ProcessId> cs(std::initializer_list<int> xs) {
  std::vector<ProcessId> out;
  for (int x : xs) out.push_back(cproc(x));
  return out;
}

// Random subset of 1..n of the given size, as an input vector with p_i -> i.
Vec participants(int n, int size, Rng& rng) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i + 1;
  rng.shuffle(ids);
  Vec in(n);
  for (int i = 0; i < size; ++i) in[ids[i] - 1] = Value(ids[i]);
  return in;
}

}  // namespace

TEST_CASE("universal solver: solo and sequential consensus") {
  auto spec = uk_agreement({1, 2}, 1, 2);
  auto p = one_concurrent_universal(spec);
  RoundRobinPolicy rr;
  {
    KConcurrentPolicy pol(1, {1}, 1, 50);
    auto t = run(p, 2, pol, {Value(0), Value()});
    auto io = extract_io(t);
    CHECK(io.outputs[0] == Value(0));
  }
  KConcurrentPolicy pol(1, {1, 2}, 1, 50);
  auto t = run(p, 2, pol, {Value(0), Value(1)});
  auto io = extract_io(t);
  CHECK(io.outputs[0] == Value(0));
  CHECK(io.outputs[1] == Value(0));
  CHECK(check_satisfies(spec, t, 1000).ok());
}

TEST_CASE("universal solver: sequential renaming(3,3,4)") {
  auto spec = renaming(3, 3, 4);
  auto p = one_concurrent_universal(spec);
  KConcurrentPolicy pol(1, {3, 1, 4}, 7, 50);
  auto t = run(p, 2, pol, {Value(1), Value(), Value(3), Value(4)});
  auto io = extract_io(t);
  std::set<Value> names;
  for (int i : {0, 2, 3}) {
    REQUIRE(!io.outputs[i].is_bottom());
    CHECK(io.outputs[i].as_int() >= 1);
    CHECK(io.outputs[i].as_int() <= 3);
    names.insert(io.outputs[i]);
  }
  CHECK(names.size() == 3);
  CHECK(check_satisfies(spec, t, 1000).ok());
}

TEST_CASE("k-concurrent renaming: solo run takes name 1") {
  auto p = k_concurrent_renaming(2, 1, 3);
  KConcurrentPolicy pol(1, {2}, 3, 50);
  auto t = run(p, 3, pol, {Value(), Value(2), Value()});
  CHECK(extract_io(t).outputs[1] == Value(1));
}

TEST_CASE("k-concurrent renaming: lockstep pair") {
  // Both register s=1, both collect and see the conflict; ranks 1 and 2 pick
  // names 2 and 3 (1 stays reserved by the other's old suggestion until it
  // rewrites). Names must be unique and within j+k-1 = 3.
  auto p = k_concurrent_renaming(2, 2, 3);
  std::vector<ProcessId> script = cs({1, 2, 1, 2});
  for (int r = 0; r < 3; ++r)
    for (int x : {1, 2}) script.push_back(cproc(x));
  for (int r = 0; r < 40; ++r)
    for (int x : {1, 2}) script.push_back(cproc(x));
  ScriptPolicy pol(script);
  auto t = run(p, 3, pol, {Value(1), Value(2), Value()});
  auto io = extract_io(t);
  REQUIRE(io.undecided.empty());
  CHECK(io.outputs[0] != io.outputs[1]);
  for (int i : {0, 1}) CHECK(io.outputs[i].as_int() <= 3);
  CHECK(check_k_concurrent(t, 2).ok());
}

TEST_CASE("k-concurrent renaming: seeded batch stays within j+k-1") {
  const int n = 6, j = 4;
  for (int k = 1; k <= 4; ++k) {
    auto p = k_concurrent_renaming(j, k, n);
    auto spec = renaming(j, j + k - 1, n);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed * 31 + k);
      int size = static_cast<int>(rng.range(1, j));
      Vec in = participants(n, size, rng);
      std::vector<int> order;
      for (int i = 1; i <= n; ++i)
        if (!in[i - 1].is_bottom()) order.push_back(i);
      rng.shuffle(order);
      KConcurrentPolicy pol(k, order, seed, 60);
      auto t = run(p, n, pol, in);
      REQUIRE(check_k_concurrent(t, k).ok());
      auto v = check_satisfies(spec, t, 5000);
      CHECK_MESSAGE(v.ok(), "k=" << k << " seed=" << seed << " " << v.str());
    }
  }
}

TEST_CASE("broken renaming is caught") {
  const int n = 6, j = 4, k = 2;
  auto p = k_concurrent_renaming(j, k, n, true);
  auto spec = renaming(j, j + k - 1, n);
  int caught = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    Vec in = participants(n, j, rng);
    KConcurrentPolicy pol(k, {}, seed, 60);
    auto t = run(p, n, pol, in);
    if (!check_satisfies(spec, t, 5000).ok()) ++caught;
  }
  CHECK(caught > 0);
}

TEST_CASE("resrenaming gate: j-1 participants run the inner protocol one at a time") {
  const int n = 4, j = 3;
  auto inner = k_concurrent_renaming(j, j, n);
  auto p = one_resilient_strong_renaming(j, inner);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    Vec in = participants(n, j - 1, rng);
    FairRandomPolicy pol(seed, 40);
    auto t = run(p, n, pol, in);
    CHECK(extract_io(t).undecided.empty());
    CHECK(check_k_concurrent(t, 1, 1).ok());
  }
}

TEST_CASE("resrenaming gate: j participants are at most 2-concurrent inside") {
  const int n = 4, j = 3;
  auto inner = k_concurrent_renaming(j, j, n);
  auto p = one_resilient_strong_renaming(j, inner);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 1000);
    Vec in = participants(n, j, rng);
    FairRandomPolicy pol(seed, 40);
    auto t = run(p, n, pol, in);
    CHECK(check_k_concurrent(t, 2, 1).ok());
    auto io = extract_io(t);
    CHECK(io.undecided.empty());
    // A decided process never takes another inner step.
    std::vector<char> done(n + 1, 0);
    for (const auto& e : t.events) {
      if (e.pid.role != Role::C) continue;
      if (e.action.layer == 1 && e.action.kind != ActionKind::Null) CHECK(!done[e.pid.index]);
      if (e.action.layer == 1 && e.action.kind == ActionKind::Decide) done[e.pid.index] = 1;
    }
  }
}

TEST_CASE("consensus from renaming with a correct stub") {
  auto p = consensus_from_renaming(1, stub_renaming());
  auto spec = uk_agreement({1, 2}, 1, 2);
  // Every interleaving of the two 5-step prefixes, then padding for decides.
  std::vector<int> base = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  std::sort(base.begin(), base.end());
  int runs = 0, distinct = 0;
  do {
    std::vector<ProcessId> script;
    for (int x : base) script.push_back(cproc(x));
    for (int r = 0; r < 3; ++r)
      for (int x : {1, 2}) script.push_back(cproc(x));
    ScriptPolicy pol(script);
    auto t = run(p, 2, pol, {Value(0), Value(1)});
    auto io = extract_io(t);
    auto names = extract_io(t, 1).outputs;
    REQUIRE(io.undecided.empty());
    // The stub is only a strong renaming when the names come out distinct.
    if (names[0] != names[1]) {
      CHECK(check_satisfies(spec, io).ok());
      ++distinct;
    }
    ++runs;
  } while (std::next_permutation(base.begin(), base.end()));
  CHECK(runs == 252);
  CHECK(distinct > 0);
}

TEST_CASE("consensus from renaming: solo p2 decides its own input") {
  auto p = consensus_from_renaming(1, stub_renaming());
  ScriptPolicy pol(cs({2, 2, 2, 2, 2, 2, 2}));
  auto t = run(p, 2, pol, {Value(), Value(5)});
  CHECK(extract_io(t).outputs[1] == Value(5));
}

TEST_CASE("consensus from renaming flags an adversarial stub") {
  auto p = consensus_from_renaming(1, stub_renaming(true));
  ScriptPolicy pol(cs({1, 1, 1, 1, 1, 1}));
  CHECK_THROWS_AS(run(p, 2, pol, {Value(1), Value()}), ProtocolError);
}

TEST_CASE("s-process helped set agreement") {
  const int n = 3;
  auto p = s_help_set_agreement(n);
  auto spec = uk_agreement({1, 2, 3}, n, n);
  {
    auto f = FailurePattern::make(n, {{2, 0}, {3, 0}});
    FairRandomPolicy pol(1, 30);
    auto t = run(p, n, pol, {Value(), Value(4), Value()}, 20000, &f);
    CHECK(extract_io(t).outputs[1] == Value(4));
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    auto f = sample_pattern(n, n - 1, 100, rng);
    Vec in(n);
    for (int i = 0; i < n; ++i) in[i] = Value(static_cast<int>(rng.range(0, n)));
    FairRandomPolicy pol(seed, 30);
    auto t = run(p, n, pol, in, 20000, &f);
    CHECK(check_satisfies(spec, t, 2000).ok());
  }
  FairRandomPolicy pol(9, 30);
  auto t = run(p, n, pol, {Value(2), Value(2), Value(2)});
  for (const auto& o : extract_io(t).outputs) CHECK(o == Value(2));
}

TEST_CASE("ksa protocol is k-set agreement k-concurrently") {
  const int m = 5;
  auto p = ksa_protocol(m);
  for (int k = 1; k <= 3; ++k) {
    auto spec = uk_agreement({1, 2, 3, 4, 5}, k, m);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Vec in;
      for (int i = 0; i < m; ++i) in.push_back(Value(i % (k + 1)));
      KConcurrentPolicy pol(k, {}, seed, 40);
      auto t = run(p, 2, pol, in);
      CHECK(check_satisfies(spec, t, 2000).ok());
    }
  }
}

TEST_CASE("leader consensus: agreement, validity, and no decision without a leader") {
  const int m = 2, n = 2;
  auto spec = uk_agreement({1, 2}, 1, m);
  for (auto mode : {DecMode::Shared, DecMode::PerOwner}) {
    auto p = leader_consensus(m, n, {1, 2}, mode);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      Rng rng(seed);
      auto f = sample_pattern(n, n - 1, 200, rng);
      auto h = make_oracle(FdKind::Omega, f, 1, seed);
      FairRandomPolicy pol(seed, 30);
      auto t = run(p, n, pol, {Value(0), Value(1)}, 50000, &f, &h);
      CHECK(check_satisfies(spec, t, 3000).ok());
    }
  }
  {
    auto p = leader_consensus(1, n, {1});
    auto f = no_crash(n);
    auto h = make_oracle(FdKind::Omega, f, 1, 3);
    FairRandomPolicy pol(3, 30);
    auto t = run(p, n, pol, {Value(8)}, 20000, &f, &h);
    CHECK(extract_io(t).outputs[0] == Value(8));
  }
  // Leader crashed from the start and never replaced: safe, but no decision.
  auto p = leader_consensus(m, n, {1, 2});
  auto f = FailurePattern::make(n, {{1, 0}});
  FdHistory h(FdKind::Omega, n, 1, [](int, Time) { return Value(sproc(1)); }, {0, 1, 0});
  FairRandomPolicy pol(1, 30);
  auto t = run(p, n, pol, {Value(0), Value(1)}, 3000, &f, &h);
  auto io = extract_io(t);
  CHECK(io.undecided.size() == 2);
  CHECK(check_satisfies(spec, io).ok());
}

TEST_CASE("echo extension returns at most x-1 values with x participants") {
  auto base = ksa_protocol(2);  // consensus when run 1-concurrently
  auto spec = uk_agreement({1, 2}, 1, 2);
  (void)spec;
  auto p = echo_extension(base, 4);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    KConcurrentPolicy pol(1, {}, seed, 40);
    auto t = run(p, 2, pol, {Value(0), Value(1), Value(2), Value(3)});
    auto io = extract_io(t);
    std::set<Value> distinct(io.outputs.begin(), io.outputs.end());
    CHECK(io.undecided.empty());
    CHECK(distinct.size() <= 3);
  }
}
