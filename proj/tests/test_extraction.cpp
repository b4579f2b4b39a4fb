#include "doctest.h"

#include <set>

#include "efd/extraction.hpp"

using namespace efd;

namespace {

std::shared_ptr<const Protocol> lc2() { return std::make_shared<const Protocol>(leader_consensus(2, 2, {1, 2})); }

FdHistory omega_at(const FailurePattern& f, std::uint64_t seed, Time mean) {
  OracleOptions o;
  o.mean_stabilization = mean;
  return make_oracle(FdKind::Omega, f, 1, seed, o);
}

// Runs p_1 until it decides, then p_2 (at most `cap` steps each).
void sequential(ASim& sim, const DagView& view, int cap = 5000) {
  for (int j = 1; j <= sim.m(); ++j)
    for (int s = 0; s < cap && !sim.decided(j); ++s) sim.step(j, view);
}

ExtractionConfig consensus_config(FailurePattern f, FdHistory h, std::uint64_t seed) {
  ExtractionConfig c;
  c.a = leader_consensus(2, 2, {1, 2});
  c.spec = uk_agreement({1, 2}, 1, 2);
  c.k = 1;
  c.f = std::move(f);
  c.h = std::move(h);
  c.budget = 5000;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("one round on two correct processes gives two vertices and one edge") {
  auto f = FailurePattern::make(2, {});
  auto g = build_dag(omega_at(f, 1, 0), f, 1);
  CHECK(g.size() == 2);
  CHECK(g.count(1) == 1);
  CHECK(g.count(2) == 1);
  auto e = g.edges();
  REQUIRE(e.size() == 1);
  CHECK(e[0].first == VertexRef{1, 1});
  CHECK(e[0].second == VertexRef{2, 1});
}

TEST_CASE("a process crashed at time 0 contributes no vertex") {
  auto f = FailurePattern::make(3, {{2, 0}});
  auto g = build_dag(make_oracle(FdKind::Omega, f, 1, 3), f, 20);
  CHECK(g.count(2) == 0);
  CHECK(g.count(1) == 20);
  CHECK(g.count(3) == 20);
}

TEST_CASE("sample DAGs are acyclic and edges follow query time") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    int n = 2 + static_cast<int>(seed % 2);
    auto f = sample_pattern(n, n - 1, 30, rng);
    auto g = build_dag(make_oracle(FdKind::Omega, f, 1, seed), f, 15, seed + 1);
    CHECK(g.acyclic());
    for (const auto& [u, v] : g.edges()) CHECK(g.vertex(u).time < g.vertex(v).time);
    for (int q = 1; q <= n; ++q)
      for (std::int64_t s = 1; s <= g.count(q); ++s) CHECK(g.vertex(q, s).d == make_oracle(FdKind::Omega, f, 1, seed).value_at(q, g.vertex(q, s).time));
  }
}

TEST_CASE("dag rejects a vertex that sees the future") {
  SampleDag g(2);
  g.add(1, 0, Value(sproc(1)), {0, 0});
  CHECK_THROWS(g.add(2, 1, Value(sproc(1)), {2, 0}));
  CHECK_THROWS(g.add(1, 0, Value(sproc(1)), {1, 0}));
}

TEST_CASE("a_sim on a sequential schedule decides what a direct run decides") {
  auto a = lc2();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = FailurePattern::make(2, {});
    auto h = omega_at(f, seed, 10);
    auto g = std::make_shared<const SampleDag>(build_dag(h, f, 300));
    Vec in{Value(static_cast<int>(seed % 2)), Value(static_cast<int>(1 - seed % 2))};
    ASim sim(a, g, in, true);
    sequential(sim, full_view(*g));
    REQUIRE(sim.decided(1));
    REQUIRE(sim.decided(2));

    KConcurrentPolicy pol(1, {1, 2}, seed, 16);
    ExecOptions o;
    o.horizon = 20000;
    auto direct = execute(a->algorithm(), 2, 2, f, h, pol, in, o);
    auto io = extract_io(direct);
    REQUIRE(io.undecided.empty());
    CHECK(sim.output(1) == io.outputs[0]);
    CHECK(sim.output(2) == io.outputs[1]);
    CHECK(replay_simulated(*a, *g, sim.simulated()).ok());
  }
}

TEST_CASE("every prefix of a random A_sim schedule replays as a run of A") {
  auto a = lc2();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    auto f = sample_pattern(2, 1, 40, rng);
    auto g = std::make_shared<const SampleDag>(build_dag(omega_at(f, seed, 20), f, 80, seed));
    ASim sim(a, g, {Value(0), Value(1)}, true);
    auto view = full_view(*g);
    for (int s = 0; s < 400; ++s) {
      int j = 1 + static_cast<int>(rng.below(2));
      if (sim.decided(j)) j = 3 - j;
      if (sim.decided(j)) break;
      sim.step(j, view);
    }
    INFO("seed " << seed);
    auto v = replay_simulated(*a, *g, sim.simulated());
    CHECK_MESSAGE(v.ok(), v.str());
    // Agreement inside the simulation.
    if (sim.decided(1) && sim.decided(2)) CHECK(sim.output(1) == sim.output(2));
  }
}

TEST_CASE("replay rejects a forged detector answer") {
  auto a = lc2();
  auto f = FailurePattern::make(2, {});
  auto g = std::make_shared<const SampleDag>(build_dag(omega_at(f, 4, 0), f, 100));
  ASim sim(a, g, {Value(0), Value(1)}, true);
  sequential(sim, full_view(*g));
  RunTrace t = sim.simulated();
  bool forged = false;
  for (auto& e : t.events) {
    if (e.action.kind != ActionKind::QueryFd) continue;
    e.observation = Value(e.observation.as_pid() == sproc(1) ? sproc(2) : sproc(1));
    forged = true;
    break;
  }
  REQUIRE(forged);
  CHECK(!replay_simulated(*a, *g, t).ok());
}

TEST_CASE("a code without vertices never queries while the others proceed") {
  auto a = lc2();
  auto f = FailurePattern::make(2, {{2, 0}});
  auto h = make_oracle(FdKind::Omega, f, 1, 2);
  REQUIRE(h.stabilization().q_star == 1);
  auto g = std::make_shared<const SampleDag>(build_dag(h, f, 100));
  ASim sim(a, g, {Value(1), Value(0)}, true);
  sequential(sim, full_view(*g));
  for (const auto& e : sim.simulated().events)
    if (e.pid == sproc(2)) CHECK(e.action.kind != ActionKind::QueryFd);
  CHECK(sim.code_steps(1) > 0);
  CHECK(sim.decided(1));
}

TEST_CASE("explorer keeps corridors within k+1 and emits n-k sets") {
  auto a = lc2();
  auto f = FailurePattern::make(2, {});
  auto g = std::make_shared<const SampleDag>(build_dag(omega_at(f, 7, 3), f, 200));
  std::vector<Vec> in{{Value(0), Value(1)}, {Value(1), Value(0)}};
  Explorer ex(a, g, in, 1);
  auto view = full_view(*g);
  for (int i = 0; i < 3000; ++i) {
    NodeInfo ni;
    REQUIRE(ex.step(view, &ni));
    CHECK(ni.corridor.size() <= 2);
    CHECK(ni.undecided <= 2);
    CHECK(ni.output.size() == 1);
  }
}

TEST_CASE("explorer order is deterministic and survives copying") {
  auto a = lc2();
  auto f = FailurePattern::make(2, {});
  auto g = std::make_shared<const SampleDag>(build_dag(omega_at(f, 1, 8), f, 200));
  std::vector<Vec> in{{Value(0), Value(1)}};
  auto view = full_view(*g);
  Explorer x(a, g, in, 1), y(a, g, in, 1);
  for (int i = 0; i < 500; ++i) {
    NodeInfo nx, ny;
    x.step(view, &nx);
    y.step(view, &ny);
    REQUIRE(nx.sigma_hash == ny.sigma_hash);
  }
  Explorer z = x;
  for (int i = 0; i < 500; ++i) {
    NodeInfo nx, nz;
    x.step(view, &nx);
    z.step(view, &nz);
    REQUIRE(nx.sigma_hash == nz.sigma_hash);
    REQUIRE(nx.output == nz.output);
  }
}

TEST_CASE("the first corridor explored is the solo run of pi's first process") {
  auto a = lc2();
  auto f = FailurePattern::make(2, {});
  auto g = std::make_shared<const SampleDag>(build_dag(omega_at(f, 0, 0), f, 100));
  Explorer ex(a, g, {{Value(0), Value(1)}}, 1);
  auto view = full_view(*g);
  NodeInfo root;
  ex.step(view, &root);
  CHECK(root.depth == 0);
  CHECK(root.corridor == std::vector<int>{1, 2});
  NodeInfo first;
  ex.step(view, &first);
  CHECK(first.depth == 1);
  CHECK(first.last == 1);
  CHECK(first.corridor == std::vector<int>{1});
}

TEST_CASE("extraction excludes the Omega leader at n=2, k=1") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto f = FailurePattern::make(2, {});
    auto h = omega_at(f, seed, 1);
    auto c = consensus_config(f, h, seed);
    c.log_nodes = true;
    auto r = extract_anti_omega(c);
    INFO("seed " << seed << " tau " << h.stabilization().tau << ": " << r.verdict.str());
    CHECK(r.verdict.ok());
    CHECK(r.excluded == h.stabilization().q_star);
    CHECK(r.max_undecided <= 2);
    for (const auto& e : r.stream) CHECK(e.set.size() == 1);
    // The never-deciding corridor has the undecided survivor alone in it.
    CHECK(r.corridor.size() == 1);
    CHECK(!r.nodes_log[0].empty());
  }
}

TEST_CASE("extraction with a trivial detector stays well formed and never fails") {
  auto f = FailurePattern::make(2, {});
  auto c = consensus_config(f, make_oracle(FdKind::Trivial, f, 1, 0), 3);
  c.budget = 2000;
  auto r = extract_anti_omega(c);
  CHECK(r.verdict.status != Status::Fail);
  for (const auto& e : r.stream) {
    REQUIRE(e.set.size() == 1);
    CHECK((e.set[0] == 1 || e.set[0] == 2));
  }
}

TEST_CASE("too small a budget is inconclusive, not a failure") {
  auto f = FailurePattern::make(2, {});
  auto c = consensus_config(f, omega_at(f, 0, 0), 0);
  c.budget = 50;
  auto r = extract_anti_omega(c);
  CHECK(r.verdict.status == Status::Inconclusive);
}
