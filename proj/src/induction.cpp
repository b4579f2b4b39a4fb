#include "efd/induction.hpp"

namespace efd {

std::vector<InductionLevel> set_agreement_induction(const std::set<int>& u, int k, const Protocol& a_u, int m,
                                                    int n) {
  if (k < 1 || k >= m) throw SpecError("induction needs 1 <= k < m");
  std::set<int> expect;
  for (int i = 1; i <= k + 1; ++i) expect.insert(i);
  if (u != expect) throw SpecError("U must be {p_1, ..., p_k+1}");
  if (a_u.m != k + 1) throw SpecError(a_u.name + " must run on exactly k+1 processes");
  std::vector<InductionLevel> out;
  for (int x = m; x >= k + 1; --x) {
    InductionLevel lv;
    lv.x = x;
    lv.a_x = echo_extension(a_u, x);
    lv.cfg.name = "induction_level_" + std::to_string(x);
    lv.cfg.m = m;
    lv.cfg.n = n;
    lv.cfg.k = x;
    lv.cfg.b = lv.a_x;
    lv.cfg.depart = depart_on_any_decision;
    out.push_back(std::move(lv));
  }
  return out;
}

}  // namespace efd
