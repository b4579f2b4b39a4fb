#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "efd/rng.hpp"
#include "efd/value.hpp"
#include "efd/verdict.hpp"

namespace efd {

using Time = std::int64_t;
constexpr Time kNever = std::numeric_limits<Time>::max();

class FailureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Crash schedule of the S-processes q_1..q_n.
class FailurePattern {
 public:
  FailurePattern() = default;
  static FailurePattern make(int n, std::map<int, Time> crashes, Time horizon = kNever);

  int n() const { return n_; }
  Time horizon() const { return horizon_; }
  const std::map<int, Time>& crashes() const { return crash_; }
  std::optional<Time> crash_time(int q) const;
  bool alive(int q, Time t) const;
  bool correct(int q) const { return !crash_.count(q); }
  std::set<int> correct_set() const;
  std::set<int> faulty_set() const;
  // Member of E_t: at least n - t correct S-processes.
  bool in_environment(int t) const;
  std::string str() const;  // "none" or "2:5,3:0"

 private:
  int n_ = 0;
  std::map<int, Time> crash_;
  Time horizon_ = kNever;
};

std::set<int> correct_set(const FailurePattern& f);

// Seeded member of E_t: picks up to t faulty processes and crash times in [0, max_crash].
FailurePattern sample_pattern(int n, int t, Time max_crash, Rng& rng);

enum class FdKind { Trivial, Omega, AntiOmega, VectorOmega };
const char* fd_kind_name(FdKind k);
FdKind parse_fd_kind(const std::string& s);

struct Stabilization {
  Time tau = 0;    // τ*
  int q_star = 0;  // distinguished correct S-index
  int j_star = 0;  // stabilized vector position (1-based), VectorOmega only
};

// Output encodings: Trivial -> ⊥; Omega -> S-pid; AntiOmega -> sorted tuple of
// n-k S-pids; VectorOmega -> tuple of k S-pids.
class FdHistory {
 public:
  using Fn = std::function<Value(int q, Time t)>;

  FdHistory() = default;
  FdHistory(FdKind kind, int n, int k, Fn fn, Stabilization stab);

  FdKind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  const Stabilization& stabilization() const { return stab_; }
  Value value_at(int q, Time t) const { return fn_(q, t); }

 private:
  FdKind kind_ = FdKind::Trivial;
  int n_ = 0;
  int k_ = 0;
  Fn fn_;
  Stabilization stab_;
};

struct OracleOptions {
  Time mean_stabilization = 50;  // τ* drawn uniformly from [0, 2*mean]
};

FdHistory make_oracle(FdKind kind, const FailurePattern& f, int k, std::uint64_t seed,
                      OracleOptions opts = {});
FdHistory anti_from_vector(const FdHistory& h);
// Ω complemented to (n-1)-sets, i.e. read as ¬Ω_1.
FdHistory omega_complement(const FdHistory& h);
// Ω replicated into an x-vector: every position follows the leader.
FdHistory vector_from_omega(const FdHistory& h, int x);

Verdict check_history(const FailurePattern& f, const FdHistory& h, Time horizon);

}  // namespace efd
