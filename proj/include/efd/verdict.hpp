#pragma once

#include <cstdint>
#include <string>

namespace efd {

enum class Status { Pass, Fail, Inconclusive };

const char* status_name(Status s);

struct Verdict {
  Status status = Status::Pass;
  std::string detail;
  std::int64_t step = -1;  // first violating step, when meaningful

  static Verdict pass(std::string detail = {}) { return {Status::Pass, std::move(detail), -1}; }
  static Verdict fail(std::string detail, std::int64_t step = -1) {
    return {Status::Fail, std::move(detail), step};
  }
  static Verdict inconclusive(std::string detail) {
    return {Status::Inconclusive, std::move(detail), -1};
  }

  bool ok() const { return status == Status::Pass; }
  std::string str() const;
};

// Worst of the two: Fail > Inconclusive > Pass. Keeps the first detail on ties.
Verdict worst(const Verdict& a, const Verdict& b);

}  // namespace efd
