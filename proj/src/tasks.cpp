#include "efd/tasks.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace efd {

std::string vec_str(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i].str();
  }
  return s + ")";
}

bool is_prefix(const Vec& shorter, const Vec& longer) {
  if (shorter.size() != longer.size()) return false;
  for (std::size_t i = 0; i < shorter.size(); ++i)
    if (!shorter[i].is_bottom() && !(shorter[i] == longer[i])) return false;
  return true;
}

namespace {

// Calls fn on every vector whose i-th entry ranges over {⊥} ∪ choices[i]
// (or just ⊥ where `allowed[i]` is false). Stops early when fn returns false.
template <class Fn>
bool odometer(const std::vector<std::vector<Value>>& choices, const std::vector<char>& allowed, Fn&& fn) {
  std::size_t m = choices.size();
  std::vector<std::size_t> pos(m, 0);
  Vec cur(m);
  while (true) {
    if (!fn(static_cast<const Vec&>(cur))) return false;
    std::size_t i = m;
    while (i > 0) {
      --i;
      std::size_t limit = allowed[i] ? choices[i].size() : 0;
      if (pos[i] < limit) {
        cur[i] = choices[i][pos[i]++];
        break;
      }
      pos[i] = 0;
      cur[i] = Value();
      if (i == 0) return true;
    }
    if (m == 0) return true;
  }
}

}  // namespace

std::vector<Vec> enumerate_inputs(const TaskSpec& spec) {
  std::vector<Vec> out;
  std::vector<char> all(spec.m, 1);
  odometer(spec.input_domain, all, [&](const Vec& v) {
    if (spec.in_inputs(v)) out.push_back(v);
    return true;
  });
  return out;
}

std::vector<Vec> enumerate_outputs(const TaskSpec& spec, const Vec& inputs) {
  std::vector<Vec> out;
  std::vector<char> allowed(spec.m);
  for (int i = 0; i < spec.m; ++i) allowed[i] = !inputs[i].is_bottom();
  odometer(spec.output_domain, allowed, [&](const Vec& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

namespace {

std::set<int> nonbottom_ints(const Vec& v) {
  std::set<int> s;
  for (const auto& x : v)
    if (!x.is_bottom()) s.insert(static_cast<int>(x.as_int()));
  return s;
}

bool condition_one(const Vec& in, const Vec& out) {
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i].is_bottom() && !out[i].is_bottom()) return false;
  return true;
}

}  // namespace

TaskSpec uk_agreement(const std::set<int>& u, int k, int m) {
  if (u.empty()) throw SpecError("(U,k)-agreement needs a nonempty U");
  if (k < 1) throw SpecError("(U,k)-agreement needs k >= 1");
  if (*u.begin() < 1 || *u.rbegin() > m) throw SpecError("U must be a subset of 1..m");
  TaskSpec s;
  s.name = "uk_agreement";
  s.m = m;
  std::vector<Value> vals;
  for (int v = 0; v <= k; ++v) vals.emplace_back(v);
  s.input_domain.assign(m, {});
  for (int i : u) s.input_domain[i - 1] = vals;
  s.output_domain = s.input_domain;
  s.in_inputs = [u, k](const Vec& in) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i].is_bottom()) continue;
      if (!u.count(static_cast<int>(i) + 1) || !in[i].is_int()) return false;
      if (in[i].as_int() < 0 || in[i].as_int() > k) return false;
    }
    return true;
  };
  s.delta = [k](const Vec& in, const Vec& out) {
    if (!condition_one(in, out)) return false;
    for (const auto& o : out)
      if (!o.is_bottom() && !o.is_int()) return false;
    auto iv = nonbottom_ints(in);
    auto ov = nonbottom_ints(out);
    if (static_cast<int>(ov.size()) > k) return false;
    return std::includes(iv.begin(), iv.end(), ov.begin(), ov.end());
  };
  s.proof_by_construction = true;
  return s;
}

TaskSpec renaming(int j, int ell, int n) {
  if (j < 1 || j >= n) throw SpecError("renaming needs 1 <= j < n");
  if (ell < j) throw SpecError("renaming with ell < j is unsatisfiable");
  TaskSpec s;
  s.name = "renaming";
  s.m = n;
  s.input_domain.resize(n);
  s.output_domain.resize(n);
  for (int i = 1; i <= n; ++i) {
    s.input_domain[i - 1] = {Value(i)};
    for (int v = 1; v <= ell; ++v) s.output_domain[i - 1].emplace_back(v);
  }
  s.in_inputs = [j](const Vec& in) {
    int c = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i].is_bottom()) continue;
      if (!(in[i] == Value(static_cast<int>(i) + 1))) return false;
      ++c;
    }
    return c <= j;
  };
  s.delta = [ell](const Vec& in, const Vec& out) {
    if (!condition_one(in, out)) return false;
    std::set<std::int64_t> seen;
    for (const auto& o : out) {
      if (o.is_bottom()) continue;
      if (!o.is_int() || o.as_int() < 1 || o.as_int() > ell) return false;
      if (!seen.insert(o.as_int()).second) return false;
    }
    return true;
  };
  s.proof_by_construction = true;
  return s;
}

TaskSpec table_task(int m, const std::vector<TableRow>& rows, bool check) {
  if (rows.empty()) throw SpecError("table task needs at least one row");
  using Pair = std::pair<Vec, Vec>;
  auto inputs = std::make_shared<std::set<Vec>>();
  auto pairs = std::make_shared<std::set<Pair>>();
  std::vector<std::set<Value>> in_dom(m), out_dom(m);

  // All prefixes of v, including v itself and the all-⊥ vector.
  auto prefixes = [m](const Vec& v) {
    std::vector<int> nz;
    for (int i = 0; i < m; ++i)
      if (!v[i].is_bottom()) nz.push_back(i);
    std::vector<Vec> out;
    for (std::uint32_t mask = 0; mask < (1u << nz.size()); ++mask) {
      Vec p(m);
      for (std::size_t b = 0; b < nz.size(); ++b)
        if (mask & (1u << b)) p[nz[b]] = v[nz[b]];
      out.push_back(std::move(p));
    }
    return out;
  };

  for (const auto& r : rows) {
    if (static_cast<int>(r.inputs.size()) != m || static_cast<int>(r.outputs.size()) != m)
      throw SpecError("table row arity differs from m");
    if (check && !condition_one(r.inputs, r.outputs))
      throw SpecError("table row violates condition (1): " + vec_str(r.inputs) + " -> " + vec_str(r.outputs));
    for (int i = 0; i < m; ++i) {
      if (!r.inputs[i].is_bottom()) in_dom[i].insert(r.inputs[i]);
      if (!r.outputs[i].is_bottom()) out_dom[i].insert(r.outputs[i]);
    }
    for (auto& p : prefixes(r.inputs)) inputs->insert(std::move(p));
    for (auto& o : prefixes(r.outputs)) pairs->insert({r.inputs, std::move(o)});
  }
  for (const auto& in : *inputs) pairs->insert({in, Vec(m)});

  TaskSpec s;
  s.name = "table";
  s.m = m;
  s.input_domain.resize(m);
  s.output_domain.resize(m);
  for (int i = 0; i < m; ++i) {
    s.input_domain[i].assign(in_dom[i].begin(), in_dom[i].end());
    s.output_domain[i].assign(out_dom[i].begin(), out_dom[i].end());
  }
  s.in_inputs = [inputs](const Vec& in) { return inputs->count(in) > 0; };
  s.delta = [pairs](const Vec& in, const Vec& out) { return pairs->count({in, out}) > 0; };
  if (check) {
    auto v = validate_spec(s);
    if (!v.ok()) throw SpecError("table task invalid: " + v.detail);
  }
  return s;
}

Verdict validate_spec(const TaskSpec& spec, std::size_t budget) {
  if (static_cast<int>(spec.input_domain.size()) != spec.m ||
      static_cast<int>(spec.output_domain.size()) != spec.m)
    return Verdict::fail("domain arity differs from m");

  // Work estimate: |I-space| * |O-space|.
  double work = 1;
  for (int i = 0; i < spec.m; ++i)
    work *= static_cast<double>(spec.input_domain[i].size() + 1) * static_cast<double>(spec.output_domain[i].size() + 1);
  if (work > static_cast<double>(budget)) {
    if (spec.proof_by_construction) return Verdict::pass("conditions hold by construction; enumeration skipped");
    return Verdict::inconclusive("task too large to enumerate");
  }

  auto ins = enumerate_inputs(spec);
  std::set<Vec> in_set(ins.begin(), ins.end());
  std::vector<char> all(spec.m, 1);

  for (const auto& in : ins) {
    // Prefix closure of I: dropping any one entry stays inside I.
    for (int i = 0; i < spec.m; ++i) {
      if (in[i].is_bottom()) continue;
      Vec p = in;
      p[i] = Value();
      if (!in_set.count(p)) return Verdict::fail("I not prefix-closed: " + vec_str(p) + " missing below " + vec_str(in));
    }
    if (!spec.delta(in, Vec(spec.m))) return Verdict::fail("Δ is not total: nothing allowed for " + vec_str(in));

    std::string failure;
    odometer(spec.output_domain, all, [&](const Vec& out) {
      if (!spec.delta(in, out)) return true;
      if (!condition_one(in, out)) {
        failure = "condition (1) fails for " + vec_str(in) + " -> " + vec_str(out);
        return false;
      }
      for (int i = 0; i < spec.m; ++i) {
        if (out[i].is_bottom()) continue;
        Vec p = out;
        p[i] = Value();
        if (!spec.delta(in, p)) {
          failure = "condition (2) fails: " + vec_str(p) + " not allowed for " + vec_str(in);
          return false;
        }
      }
      for (int i = 0; i < spec.m; ++i) {
        // Condition (3), one participant at a time (extensions compose).
        if (in[i].is_bottom()) {
          for (const auto& x : spec.input_domain[i]) {
            Vec bigger = in;
            bigger[i] = x;
            if (!in_set.count(bigger)) continue;
            std::vector<char> free(spec.m, 0);
            for (int j = 0; j < spec.m; ++j) free[j] = !bigger[j].is_bottom() && out[j].is_bottom();
            bool found = false;
            std::vector<std::vector<Value>> choice(spec.m);
            for (int j = 0; j < spec.m; ++j) choice[j] = spec.output_domain[j];
            odometer(choice, free, [&](const Vec& fill) {
              Vec cand = out;
              for (int j = 0; j < spec.m; ++j)
                if (free[j]) cand[j] = fill[j];
              if (spec.delta(bigger, cand)) {
                found = true;
                return false;
              }
              return true;
            });
            if (!found) {
              failure = "condition (3) fails: input " + vec_str(bigger) + " has no output extending " +
                        vec_str(out);
              return false;
            }
          }
        } else if (out[i].is_bottom()) {
          // An undecided participant must be able to decide without
          // changing anyone else's output.
          bool found = false;
          for (const auto& v : spec.output_domain[i]) {
            Vec cand = out;
            cand[i] = v;
            if (spec.delta(in, cand)) {
              found = true;
              break;
            }
          }
          if (!found) {
            failure = "p" + std::to_string(i + 1) + " cannot decide from " + vec_str(in) + " -> " + vec_str(out);
            return false;
          }
        }
      }
      return true;
    });
    if (!failure.empty()) return Verdict::fail(failure);
  }
  return Verdict::pass();
}

Verdict check_satisfies(const TaskSpec& spec, const IoVectors& io) {
  if (!spec.in_inputs(io.inputs)) return Verdict::fail("input vector " + vec_str(io.inputs) + " is not in I");
  if (!spec.delta(io.inputs, io.outputs))
    return Verdict::fail("Δ violated: " + vec_str(io.inputs) + " -> " + vec_str(io.outputs));
  return Verdict::pass();
}

Verdict check_satisfies(const TaskSpec& spec, const RunTrace& t, std::int64_t liveness_quota, int layer) {
  auto io = extract_io(t, layer);
  auto safety = check_satisfies(spec, io);
  if (!safety.ok()) return safety;
  auto counts = step_counts(t);
  for (int i : io.undecided) {
    if (!t.complete) return Verdict::inconclusive("trace truncated with p" + std::to_string(i) + " undecided");
    if (counts[i - 1] >= liveness_quota)
      return Verdict::fail("p" + std::to_string(i) + " took " + std::to_string(counts[i - 1]) +
                           " steps without deciding");
  }
  return Verdict::pass();
}

}  // namespace efd
