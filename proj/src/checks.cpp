#include "efd/checks.hpp"

#include <algorithm>
#include <vector>

namespace efd {

Verdict check_k_concurrent(const RunTrace& t, int k, int layer) {
  std::vector<char> joined(t.m, 0), done(t.m, 0);
  int open = 0;
  for (const auto& e : t.events) {
    if (e.pid.role != Role::C || e.action.layer != layer) continue;
    int i = e.pid.index - 1;
    if (e.action.kind == ActionKind::Write && !joined[i]) {
      joined[i] = 1;
      ++open;
      if (open > k)
        return Verdict::fail(std::to_string(open) + " undecided participants with k=" + std::to_string(k),
                             e.step);
    } else if (e.action.kind == ActionKind::Decide && joined[i] && !done[i]) {
      done[i] = 1;
      --open;
    }
  }
  return Verdict::pass();
}

Verdict check_fairness_counts(const RunTrace& t, const FailurePattern& f, std::int64_t quota,
                              std::int64_t max_gap) {
  std::vector<Time> last(t.m + t.n, -1);
  std::vector<char> decided(t.m, 0);
  std::vector<std::int64_t> count(t.n, 0);
  for (const auto& e : t.events) {
    std::size_t s = slot(t, e.pid);
    if (e.pid.role == Role::S) {
      ++count[e.pid.index - 1];
      Time from = last[s] < 0 ? 0 : last[s] + 1;
      if (e.time - from > max_gap)
        return Verdict::fail(to_string(e.pid) + " waited " + std::to_string(e.time - from) + " steps", e.step);
    } else if (last[s] >= 0 && !decided[e.pid.index - 1] && e.time - last[s] - 1 > max_gap) {
      return Verdict::fail(to_string(e.pid) + " waited " + std::to_string(e.time - last[s] - 1) + " steps",
                           e.step);
    }
    if (e.pid.role == Role::C && e.action.kind == ActionKind::Decide && e.action.layer == 0)
      decided[e.pid.index - 1] = 1;
    last[s] = e.time;
  }
  Time end = t.events.empty() ? 0 : t.events.back().time + 1;
  for (int q = 1; q <= t.n; ++q) {
    Time stop = std::min(end, f.crash_time(q).value_or(kNever));
    Time from = last[t.m + q - 1] < 0 ? 0 : last[t.m + q - 1] + 1;
    if (stop - from > max_gap)
      return Verdict::fail(to_string(sproc(q)) + " starved for " + std::to_string(stop - from) + " trailing steps");
    if (f.correct(q) && t.stop == StopReason::Horizon && count[q - 1] < quota)
      return Verdict::fail(to_string(sproc(q)) + " took " + std::to_string(count[q - 1]) + " < " +
                           std::to_string(quota) + " steps");
  }
  return Verdict::pass();
}

Verdict check_personified(const RunTrace& t, const FailurePattern& f, std::int64_t max_gap) {
  std::vector<Time> last(t.m, -1);
  std::vector<char> decided(t.m, 0);
  for (const auto& e : t.events) {
    if (e.pid.role != Role::C) continue;
    int i = e.pid.index;
    auto crash = i <= f.n() ? f.crash_time(i) : std::nullopt;
    if (crash && e.time >= *crash)
      return Verdict::fail(to_string(e.pid) + " stepped at " + std::to_string(e.time) + " after q" +
                               std::to_string(i) + " crashed at " + std::to_string(*crash),
                           e.step);
    if (last[i - 1] >= 0 && !decided[i - 1] && e.time - last[i - 1] - 1 > max_gap)
      return Verdict::fail(to_string(e.pid) + " waited " + std::to_string(e.time - last[i - 1] - 1) + " steps",
                           e.step);
    if (e.action.kind == ActionKind::Decide && e.action.layer == 0) decided[i - 1] = 1;
    last[i - 1] = e.time;
  }
  return Verdict::pass();
}

}  // namespace efd
