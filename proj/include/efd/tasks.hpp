#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "efd/trace.hpp"
#include "efd/value.hpp"
#include "efd/verdict.hpp"

namespace efd {

using Vec = std::vector<Value>;

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A task (I, O, Δ) over m-vectors. Values are drawn from per-process finite
// domains; ⊥ marks non-participation (inputs) or no decision (outputs).
struct TaskSpec {
  std::string name;
  int m = 0;
  std::vector<std::vector<Value>> input_domain;   // non-⊥ candidates per process
  std::vector<std::vector<Value>> output_domain;  // non-⊥ candidates per process
  std::function<bool(const Vec&)> in_inputs;      // membership in I
  std::function<bool(const Vec&, const Vec&)> delta;
  // Conditions (1)-(3) hold by construction; validate_spec still checks the
  // cheap parts but skips the exhaustive extension search.
  bool proof_by_construction = false;
};

// Every I ∈ I in canonical order: odometer over {⊥, domain...} with p_1 most
// significant. The all-⊥ vector is included.
std::vector<Vec> enumerate_inputs(const TaskSpec& spec);
// Every O over {⊥, output domain} with O[i] = ⊥ wherever I[i] = ⊥.
std::vector<Vec> enumerate_outputs(const TaskSpec& spec, const Vec& inputs);

// L' is a prefix of L: same entries except some replaced by ⊥.
bool is_prefix(const Vec& shorter, const Vec& longer);

// (U,k)-agreement on m processes; U holds 1-based indices; values {0..k}.
TaskSpec uk_agreement(const std::set<int>& u, int k, int m);
// Strong renaming when ell == j. Inputs are fixed: p_i proposes i.
TaskSpec renaming(int j, int ell, int n);

struct TableRow {
  Vec inputs;
  Vec outputs;
};

// Δ is the listed pairs, closed under output prefixes; I is the prefix closure
// of the listed inputs. With check set, conditions (1) and (3) are enforced.
TaskSpec table_task(int m, const std::vector<TableRow>& rows, bool check = true);

// Exhaustive check of prefix-closure and conditions (1)-(3) plus the
// decidability extension the universal solver relies on.
Verdict validate_spec(const TaskSpec& spec, std::size_t budget = 2000000);

// (I,O) ∈ Δ on the trace's layer, and every participant with at least
// `liveness_quota` steps decided. A truncated trace makes liveness
// INCONCLUSIVE rather than FAIL.
Verdict check_satisfies(const TaskSpec& spec, const RunTrace& t, std::int64_t liveness_quota, int layer = 0);
Verdict check_satisfies(const TaskSpec& spec, const IoVectors& io);

std::string vec_str(const Vec& v);

}  // namespace efd
