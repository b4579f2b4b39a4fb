#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "efd/failure.hpp"
#include "efd/memory.hpp"
#include "efd/policy.hpp"
#include "efd/process.hpp"
#include "efd/trace.hpp"

namespace efd {

// A complete algorithm: register layout plus one program per C- and S-process.
struct Algorithm {
  std::string name;
  std::function<void(MemoryStore&)> layout;
  std::function<ProcessPtr(int i, const Value& input)> c_process;
  std::function<ProcessPtr(int q)> s_process;  // empty: S-processes only take null steps
};

// Builds an Algorithm from automaton families (index 0 is p_1 / q_1). An empty
// S family means trivial S-processes.
Algorithm from_automata(std::string name, std::function<void(MemoryStore&)> layout,
                        std::vector<AutomatonPtr> c, std::vector<AutomatonPtr> s = {});

class ExecutionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ExecOptions {
  Time horizon = 100000;
  bool stop_when_decided = true;
  std::string digest;
  // Called after every step with the store in its post-step state.
  std::function<void(const Event&, const MemoryStore&)> observer;
};

RunTrace execute(const Algorithm& alg, int m, int n, const FailurePattern& f, const FdHistory& h,
                 SchedulePolicy& policy, const std::vector<Value>& inputs, const ExecOptions& opts);

// Same, for callers that need the final memory contents.
RunTrace execute(const Algorithm& alg, int m, int n, const FailurePattern& f, const FdHistory& h,
                 SchedulePolicy& policy, const std::vector<Value>& inputs, const ExecOptions& opts,
                 MemoryStore& memory);

}  // namespace efd
