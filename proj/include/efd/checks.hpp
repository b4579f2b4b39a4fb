#pragma once

#include <cstdint>

#include "efd/failure.hpp"
#include "efd/trace.hpp"
#include "efd/verdict.hpp"

namespace efd {

// At every prefix at most k participating C-processes (first write at `layer`)
// have not yet decided at `layer`.
Verdict check_k_concurrent(const RunTrace& t, int k, int layer = 0);

// Every correct S-process takes at least `quota` steps (runs that stopped at
// quiescence are exempt from the quota), and no process waits more than
// `max_gap` steps between consecutive steps while it is eligible: S-processes
// while alive, C-processes between their first step and their decision.
Verdict check_fairness_counts(const RunTrace& t, const FailurePattern& f, std::int64_t quota,
                              std::int64_t max_gap);

// p_i takes no step at or after q_i's crash time, and while q_i is alive an
// undecided participating p_i waits at most `max_gap` steps between steps.
Verdict check_personified(const RunTrace& t, const FailurePattern& f, std::int64_t max_gap);

}  // namespace efd
