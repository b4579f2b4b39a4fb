#pragma once

#include <set>
#include <vector>

#include "efd/kcodes.hpp"

namespace efd {

// One level of the downward induction: x codes run the C-part of A_x, the
// S-processes run its S-part, and the simulators decide the first decided
// code's value. Solves (Π, x-1)-set agreement given a vector detector of
// size x (derived here from Ω).
struct InductionLevel {
  int x = 0;
  Protocol a_x;
  KCodesConfig cfg;
};

// Levels x = m down to k+1 for m C-processes and n S-processes. `a_u` solves
// (U, k)-set agreement for U = {p_1, ..., p_{k+1}}; its S-part, if any, must
// read U's registers only through ones the protocol owns.
std::vector<InductionLevel> set_agreement_induction(const std::set<int>& u, int k, const Protocol& a_u, int m,
                                                    int n);

}  // namespace efd
