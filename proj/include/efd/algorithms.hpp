#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "efd/executor.hpp"
#include "efd/machine.hpp"
#include "efd/tasks.hpp"

namespace efd {

// A protocol as automaton families. Registers in `owned` families are written
// only by the C-process whose index is the register's first index plus one;
// simulations use this to attribute simulated writes.
struct Protocol {
  std::string name;
  int m = 0;
  std::function<void(MemoryStore&)> layout;
  std::vector<AutomatonPtr> c;
  std::vector<AutomatonPtr> s;  // empty: trivial S-processes
  std::vector<Label> owned;

  bool owns(const RegisterId& r) const;
  Algorithm algorithm() const { return from_automata(name, layout, c, s); }
};

// Writes its input, reads every input and output, then decides the first
// value of its output domain that keeps (I', O') in Δ.
Protocol one_concurrent_universal(const TaskSpec& spec);

// (j, j+k-1)-renaming, k-concurrently. `broken` shifts the rank by one.
Protocol k_concurrent_renaming(int j, int k, int n, bool broken = false);

// Gate that lets the inner strong j-renaming protocol take steps only for the
// one or two smallest undecided participants. Inner steps carry layer + 1.
Protocol one_resilient_strong_renaming(int j, const Protocol& inner);

// Two-process consensus from a strong 2-renaming protocol whose solo runs
// return `solo_name`.
Protocol consensus_from_renaming(int solo_name, const Protocol& inner);
// 2-process "renaming" that returns 1 when it sees no other writer, else 2
// (or the reverse when `adversarial`).
Protocol stub_renaming(bool adversarial = false);

// (Π, n)-set agreement with the trivial detector: S-processes copy some
// published input into their V slot; C-processes decide the first non-⊥ slot.
Protocol s_help_set_agreement(int n);

// k-set agreement for any k, k-concurrently: adopt the first published
// decision, else publish and decide your own input.
Protocol ksa_protocol(int m);

// Where leader-based consensus records its decision.
enum class DecMode { Shared, PerOwner };

// Consensus among the proposers in `proposers` (1-based C indices) with the
// S-processes as leaders chosen by an Ω history. Other C-processes must not be
// invited.
Protocol leader_consensus(int m, int n, std::set<int> proposers, DecMode mode = DecMode::Shared);

// k codes that publish (round, smallest input seen) for `rounds` rounds of
// collects, then decide the smallest input seen. Used as a plain B for the
// k-codes simulation.
Protocol min_rounds(int k, int rounds);

// A_x of the induction: p_1..p_|U| run `base` (solving (U,k)-agreement),
// p_|U|+1..p_x return their own input.
Protocol echo_extension(const Protocol& base, int x);

}  // namespace efd
