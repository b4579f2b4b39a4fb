#include "efd/verdict.hpp"

namespace efd {

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    default:
      return "INCONCLUSIVE";
  }
}

std::string Verdict::str() const {
  std::string out = status_name(status);
  if (step >= 0) out += " at step " + std::to_string(step);
  if (!detail.empty()) out += ": " + detail;
  return out;
}

Verdict worst(const Verdict& a, const Verdict& b) {
  auto rank = [](Status s) { return s == Status::Fail ? 2 : s == Status::Inconclusive ? 1 : 0; };
  return rank(b.status) > rank(a.status) ? b : a;
}

}  // namespace efd
