#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efd/failure.hpp"
#include "efd/rng.hpp"

namespace efd {

// What a policy may look at when choosing the next process.
struct SchedView {
  Time now = 0;
  int m = 0;
  int n = 0;
  const std::vector<char>* invited = nullptr;  // p_i has an input
  const std::vector<char>* decided = nullptr;
  const FailurePattern* pattern = nullptr;

  bool c_open(int i) const { return (*invited)[i - 1] && !(*decided)[i - 1]; }
  bool s_alive(int q) const { return pattern->alive(q, now); }
};

class SchedulePolicy {
 public:
  virtual ~SchedulePolicy() = default;
  // nullopt ends the run (scripted policies only).
  virtual std::optional<ProcessId> next(const SchedView& v) = 0;
  virtual std::string name() const = 0;
};

using PolicyPtr = std::unique_ptr<SchedulePolicy>;

// Random choice among eligible processes, except that a process waiting longer
// than `window` steps is served first (bounded starvation).
class StarvationGuard {
 public:
  StarvationGuard(std::uint64_t seed, std::int64_t window) : rng_(seed), window_(window) {}
  ProcessId pick(const SchedView& v, const std::vector<ProcessId>& eligible);
  std::int64_t window() const { return window_; }

 private:
  std::size_t slot(const SchedView& v, ProcessId p) const {
    return p.role == Role::C ? p.index - 1 : v.m + p.index - 1;
  }
  Rng rng_;
  std::int64_t window_;
  std::vector<Time> since_;
};

class RoundRobinPolicy final : public SchedulePolicy {
 public:
  std::optional<ProcessId> next(const SchedView& v) override;
  std::string name() const override { return "round_robin"; }

 private:
  int cursor_ = 0;
};

class FairRandomPolicy final : public SchedulePolicy {
 public:
  FairRandomPolicy(std::uint64_t seed, std::int64_t window) : guard_(seed, window) {}
  std::optional<ProcessId> next(const SchedView& v) override;
  std::string name() const override { return "fair_random"; }

 private:
  StarvationGuard guard_;
};

// Admits C-processes in arrival order π while fewer than k admitted ones are
// undecided; schedules admitted C-processes and live S-processes fairly.
class KConcurrentPolicy final : public SchedulePolicy {
 public:
  KConcurrentPolicy(int k, std::vector<int> arrival, std::uint64_t seed, std::int64_t window)
      : k_(k), arrival_(std::move(arrival)), guard_(seed, window) {}
  std::optional<ProcessId> next(const SchedView& v) override;
  std::string name() const override { return "k_concurrent"; }

 private:
  int k_;
  std::vector<int> arrival_;  // empty: invited processes by index
  std::size_t admitted_ = 0;
  StarvationGuard guard_;
};

// p_i runs only while q_i is alive.
class PersonifiedPolicy final : public SchedulePolicy {
 public:
  PersonifiedPolicy(std::uint64_t seed, std::int64_t window) : guard_(seed, window) {}
  std::optional<ProcessId> next(const SchedView& v) override;
  std::string name() const override { return "personified"; }

 private:
  StarvationGuard guard_;
};

class ScriptPolicy final : public SchedulePolicy {
 public:
  explicit ScriptPolicy(std::vector<ProcessId> script) : script_(std::move(script)) {}
  std::optional<ProcessId> next(const SchedView& v) override;
  std::string name() const override { return "script"; }

 private:
  std::vector<ProcessId> script_;
  std::size_t pos_ = 0;
};

}  // namespace efd
