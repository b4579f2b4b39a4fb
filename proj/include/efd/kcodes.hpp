#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "efd/algorithms.hpp"
#include "efd/verdict.hpp"

namespace efd {

// One read performed while computing a segment proposal, with enough
// provenance to place it in the simulated run.
struct SimRead : Fields<SimRead> {
  enum Source : std::uint8_t { OwnCode, OtherCode, Real };

  RegisterId reg;
  Value value;
  Source source = OwnCode;
  int proposer = 0;         // simulator p_i that performed it
  std::int64_t local = -1;  // ... as its local-th step (1-based)
  int code = 0;             // OtherCode: the code owning reg
  std::int64_t seen = 0;    // OtherCode: records of that code known at the read

  auto fields() const { return std::tie(reg, value, source, proposer, local, code, seen); }
};

// The agreed outcome of cons_{j,l}: code j's state after its l-th segment of
// steps. A segment is a run of reads closed by a write, a decision, or the
// read cap.
struct CodeRecord : Fields<CodeRecord> {
  int code = 0;
  std::int64_t ell = 0;
  Value input;
  Value state;
  Action pending;
  RegMap owned;  // code j's registers of B
  std::vector<Action> actions;
  std::vector<SimRead> reads;
  bool decided = false;
  Value decision;

  auto fields() const { return std::tie(code, ell, input, state, pending, owned, actions, reads, decided, decision); }
  static constexpr const char* kTag = "code_record";
};

// Returns the value simulator p_i decides once it has seen this record.
using DepartRule = std::function<std::optional<Value>(int i, const CodeRecord&)>;

// First decided code decides for everybody (colorless tasks).
std::optional<Value> depart_on_any_decision(int i, const CodeRecord& r);

struct KCodesConfig {
  std::string name = "kcodes";
  int m = 0;    // simulators (C-processes)
  int n = 0;    // S-processes
  int k = 0;    // simulated codes; B.m must equal k
  Protocol b;   // B.s, if any, runs on the S-processes with code registers read through records
  DepartRule depart = depart_on_any_decision;
  int segment_cap = 64;
  int s_part_burst = 4;  // B.s actions per S-process loop
};

// Simulators write their input to KC.IN, register in KC.R and drive codes
// 1..min(|pars|, k) through one consensus instance per segment. S-processes
// mirror their vector detector output in KC.OMS and lead codes when more than
// k simulators participate. A plain Ω output is read as the constant vector.
Algorithm k_codes_simulation(const KCodesConfig& cfg);

struct KCodesReport {
  Verdict verdict;
  std::vector<std::vector<CodeRecord>> records;  // per code, in commit order
  std::vector<std::vector<Time>> commit_times;
  int codes_used = 0;
  int simulators = 0;  // registered at some point
};

// Replays the committed records as a run of B: every read value must be the
// one a linearization by commit time gives, every state must follow from B's
// automata, instances never see two decisions, and at every commit at most
// min(k, registered simulators) codes have taken steps.
KCodesReport check_k_codes(const KCodesConfig& cfg, const RunTrace& t);

// Vector detector view of an FD output: tuples pass through, a process id is
// repeated k times.
std::vector<ProcessId> as_vector(const Value& fd, int k);

}  // namespace efd
