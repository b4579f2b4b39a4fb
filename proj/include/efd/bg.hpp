#pragma once

#include "efd/kcodes.hpp"
#include "efd/tasks.hpp"

namespace efd {

// What a code knows about simulated process p''_x after `step` steps of A.
struct SimView : Fields<SimView> {
  std::int64_t step = 0;  // 0: not started
  Value input;
  Value state;
  Action pending;
  RegMap regs;  // registers of A written by p''_x
  bool decided = false;
  Value decision;

  auto fields() const { return std::tie(step, input, state, pending, regs, decided, decision); }
};

// Contents of PUB[c]: the code's views plus its entry in the agreement on the
// read results of p''_ax's steps from `as` on.
struct PubState : Fields<PubState> {
  std::vector<SimView> views;
  int ax = 0;
  std::int64_t as = 0;
  std::int64_t lre = 0;
  std::int64_t lrww = 0;
  Value val;

  auto fields() const { return std::tie(views, ax, as, lre, lrww, val); }
  static constexpr const char* kTag = "bg_pub";
};

// B of the double simulation: k codes simulating A on A.m processes. p''_x
// runs only after p_x published its input in `inputs`. Each code keeps to the
// process it started until that one decides, then starts the smallest
// unstarted participant, else helps the smallest undecided one. Writes are
// deterministic; each maximal run of reads is agreed on by round-based
// register consensus among the codes, so a stalled code blocks nobody.
Protocol bg_codes(const Protocol& a, int k, Label inputs = Label("KC.IN"));

// p_i leaves once a record shows p''_i decided, with p''_i's output.
std::optional<Value> depart_on_own_decision(int i, const CodeRecord& r);

// Full double simulation of A (k-concurrent solver) with the vector detector:
// A.m simulators, n S-processes, k codes.
KCodesConfig double_simulation(const Protocol& a, int k, int n);
Algorithm solve_k_concurrent_with_anti_omega(const TaskSpec& spec, const Protocol& a, int k, int n);

struct InnerRun {
  RunTrace trace;  // joins (first write) and decisions of p''_x, in commit order
  Verdict consistency;
};

// Rebuilds the simulated run of A from the committed records and checks that
// all codes published the same view of p''_x for the same step.
InnerRun inner_run(const KCodesConfig& cfg, const KCodesReport& rep);

}  // namespace efd
