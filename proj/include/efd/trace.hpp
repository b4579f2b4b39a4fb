#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "efd/action.hpp"
#include "efd/failure.hpp"

namespace efd {

struct Event {
  std::int64_t step = 0;
  Time time = 0;
  ProcessId pid;
  Action action;
  Value observation;
};

enum class StopReason { Quiescent, Horizon, ScriptEnd };
const char* stop_reason_name(StopReason r);

struct RunTrace {
  int m = 0;
  int n = 0;
  std::vector<Event> events;
  std::vector<Value> inputs;  // as offered to the executor; ⊥ = never invited
  FailurePattern pattern;
  Time horizon = 0;
  StopReason stop = StopReason::Horizon;
  bool complete = true;  // false when a trace file lacks its footer
  std::string digest;
  std::map<std::string, std::string> meta;
};

struct IoVectors {
  std::vector<Value> inputs;   // I
  std::vector<Value> outputs;  // O
  std::vector<int> undecided;  // participating p_i (1-based) with O[i] = ⊥
};

// Participation is the first Write of p_i at the given layer; its value is the
// input. Decisions are Decide events at that layer.
IoVectors extract_io(const RunTrace& t, int layer = 0);

// Steps taken per process: index i-1 for p_i, m+q-1 for q_q. Null steps count.
std::vector<std::int64_t> step_counts(const RunTrace& t);
inline std::size_t slot(const RunTrace& t, ProcessId p) {
  return p.role == Role::C ? static_cast<std::size_t>(p.index - 1)
                           : static_cast<std::size_t>(t.m + p.index - 1);
}

// Keeps only events tagged with `layer`, re-tagged as layer 0.
RunTrace project_layer(const RunTrace& t, int layer);

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_trace(std::ostream& os, const RunTrace& t);
std::string trace_text(const RunTrace& t);
RunTrace read_trace(std::istream& is);

}  // namespace efd
