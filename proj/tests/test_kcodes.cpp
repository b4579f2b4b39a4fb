#include "doctest.h"

#include <set>

#include "efd/checks.hpp"
#include "efd/kcodes.hpp"

using namespace efd;

namespace {

struct Outcome {
  RunTrace trace;
  KCodesReport report;
};

Outcome simulate(const KCodesConfig& cfg, int participants, std::uint64_t seed, Time horizon = 200000) {
  Rng rng(seed);
  auto f = sample_pattern(cfg.n, cfg.n - 1, 300, rng);
  auto h = make_oracle(FdKind::VectorOmega, f, cfg.k, seed);
  std::vector<int> ids(cfg.m);
  for (int i = 0; i < cfg.m; ++i) ids[i] = i + 1;
  rng.shuffle(ids);
  Vec in(cfg.m);
  for (int i = 0; i < participants; ++i) in[ids[i] - 1] = Value(10 + ids[i]);
  FairRandomPolicy pol(seed, 8 * (cfg.m + cfg.n));
  ExecOptions o;
  o.horizon = horizon;
  Outcome out;
  out.trace = execute(k_codes_simulation(cfg), cfg.m, cfg.n, f, h, pol, in, o);
  out.report = check_k_codes(cfg, out.trace);
  return out;
}

}  // namespace

TEST_CASE("as_vector widens an omega output") {
  auto v = as_vector(Value(sproc(3)), 2);
  CHECK(v == std::vector<ProcessId>{sproc(3), sproc(3)});
  auto w = as_vector(Value::tuple({Value(sproc(2)), Value(sproc(1))}), 2);
  CHECK(w == std::vector<ProcessId>{sproc(2), sproc(1)});
}

TEST_CASE("one simulator drives exactly one code") {
  KCodesConfig cfg;
  cfg.m = 4;
  cfg.n = 4;
  cfg.k = 3;
  cfg.b = min_rounds(3, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto o = simulate(cfg, 1, seed);
    INFO("seed " << seed << ": " << o.report.verdict.str());
    CHECK(o.report.verdict.ok());
    CHECK(o.report.codes_used == 1);
    CHECK(extract_io(o.trace).undecided.empty());
  }
}

TEST_CASE("k-codes: codes used never exceed min(k, simulators) and replay as B") {
  KCodesConfig cfg;
  cfg.m = 4;
  cfg.n = 4;
  cfg.k = 2;
  cfg.b = min_rounds(2, 3);
  for (int ell = 1; ell <= 4; ++ell) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      auto o = simulate(cfg, ell, seed * 7 + ell);
      INFO("ell " << ell << " seed " << seed << ": " << o.report.verdict.str());
      CHECK(o.report.verdict.ok());
      CHECK(o.report.codes_used <= std::min(2, ell));
      auto io = extract_io(o.trace);
      CHECK(io.undecided.empty());
      // Every decision is some simulator's input.
      std::set<Value> ins(io.inputs.begin(), io.inputs.end());
      for (const auto& v : io.outputs)
        if (!v.is_bottom()) CHECK(ins.count(v));
    }
  }
}

TEST_CASE("k-codes replay check rejects a tampered record") {
  KCodesConfig cfg;
  cfg.m = 3;
  cfg.n = 3;
  cfg.k = 2;
  cfg.b = min_rounds(2, 2);
  auto o = simulate(cfg, 3, 5);
  REQUIRE(o.report.verdict.ok());
  RunTrace bad = o.trace;
  for (auto& e : bad.events) {
    if (e.action.kind != ActionKind::Write || e.action.reg.name != Label("KC.DEC")) continue;
    auto rec = unbox<CodeRecord>(e.action.value);
    if (rec.reads.empty()) continue;
    rec.reads[0].value = Value(999);
    e.action.value = box(rec);
    break;
  }
  CHECK(!check_k_codes(cfg, bad).verdict.ok());
}
