#include "efd/failure.hpp"

#include <algorithm>
#include <vector>

namespace efd {

FailurePattern FailurePattern::make(int n, std::map<int, Time> crashes, Time horizon) {
  if (n < 1) throw FailureError("pattern needs n >= 1");
  for (const auto& [q, t] : crashes) {
    if (q < 1 || q > n) throw FailureError("crash index out of range: " + std::to_string(q));
    if (t < 0) throw FailureError("negative crash time");
  }
  if (static_cast<int>(crashes.size()) >= n) throw FailureError("pattern has no correct S-process");
  FailurePattern f;
  f.n_ = n;
  f.crash_ = std::move(crashes);
  f.horizon_ = horizon;
  return f;
}

std::optional<Time> FailurePattern::crash_time(int q) const {
  auto it = crash_.find(q);
  if (it == crash_.end()) return std::nullopt;
  return it->second;
}

bool FailurePattern::alive(int q, Time t) const {
  auto it = crash_.find(q);
  return it == crash_.end() || t < it->second;
}

std::set<int> FailurePattern::correct_set() const {
  std::set<int> out;
  for (int q = 1; q <= n_; ++q)
    if (correct(q)) out.insert(q);
  return out;
}

std::set<int> FailurePattern::faulty_set() const {
  std::set<int> out;
  for (const auto& [q, t] : crash_) out.insert(q);
  return out;
}

bool FailurePattern::in_environment(int t) const {
  return static_cast<int>(correct_set().size()) >= n_ - t;
}

std::string FailurePattern::str() const {
  if (crash_.empty()) return "none";
  std::string out;
  for (const auto& [q, t] : crash_) {
    if (!out.empty()) out += ',';
    out += std::to_string(q) + ":" + std::to_string(t);
  }
  return out;
}

std::set<int> correct_set(const FailurePattern& f) { return f.correct_set(); }

FailurePattern sample_pattern(int n, int t, Time max_crash, Rng& rng) {
  int faulty = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(t, n - 1)) + 1));
  std::vector<int> ids;
  for (int q = 1; q <= n; ++q) ids.push_back(q);
  rng.shuffle(ids);
  std::map<int, Time> crashes;
  for (int i = 0; i < faulty; ++i) crashes[ids[i]] = rng.range(0, max_crash);
  return FailurePattern::make(n, std::move(crashes));
}

const char* fd_kind_name(FdKind k) {
  switch (k) {
    case FdKind::Trivial:
      return "trivial";
    case FdKind::Omega:
      return "omega";
    case FdKind::AntiOmega:
      return "anti_omega";
    default:
      return "vector_omega";
  }
}

FdKind parse_fd_kind(const std::string& s) {
  if (s == "trivial") return FdKind::Trivial;
  if (s == "omega") return FdKind::Omega;
  if (s == "anti_omega") return FdKind::AntiOmega;
  if (s == "vector_omega") return FdKind::VectorOmega;
  throw FailureError("unknown oracle kind: " + s);
}

FdHistory::FdHistory(FdKind kind, int n, int k, Fn fn, Stabilization stab)
    : kind_(kind), n_(n), k_(k), fn_(std::move(fn)), stab_(stab) {}

namespace {

// Counter-based stream keyed by (seed, q, t); cheap to create per query.
struct Stream {
  std::uint64_t key;
  std::uint64_t i = 0;
  std::uint64_t below(std::uint64_t n) { return mix64(key, i++) % n; }
};

Value subset_value(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  Value::Tuple t;
  for (int q : ids) t.push_back(sproc(q));
  return Value::tuple(std::move(t));
}

// Random (size)-subset of {1..n} minus `exclude` (0 = none).
Value random_subset(Stream& s, int n, int size, int exclude) {
  std::vector<int> pool;
  for (int q = 1; q <= n; ++q)
    if (q != exclude) pool.push_back(q);
  for (int i = 0; i < size; ++i) {
    auto j = i + static_cast<int>(s.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  return subset_value(std::move(pool));
}

}  // namespace

FdHistory make_oracle(FdKind kind, const FailurePattern& f, int k, std::uint64_t seed,
                      OracleOptions opts) {
  int n = f.n();
  if (kind == FdKind::AntiOmega || kind == FdKind::VectorOmega) {
    if (k < 1 || k >= n) throw FailureError("oracle parameter k must satisfy 1 <= k < n");
  } else {
    k = kind == FdKind::Omega ? 1 : 0;
  }
  Rng rng(mix64(seed, 0x0dac1e));
  Stabilization st;
  if (kind != FdKind::Trivial) {
    auto correct = f.correct_set();
    std::vector<int> cs(correct.begin(), correct.end());
    st.q_star = cs[rng.below(cs.size())];
    st.tau = rng.range(0, 2 * std::max<Time>(opts.mean_stabilization, 0));
    if (kind == FdKind::VectorOmega) st.j_star = static_cast<int>(rng.range(1, k));
  }
  std::uint64_t key = mix64(seed, 0x5a17);
  FdHistory::Fn fn;
  switch (kind) {
    case FdKind::Trivial:
      fn = [](int, Time) { return Value(); };
      break;
    case FdKind::Omega:
      fn = [n, st, key](int q, Time t) -> Value {
        if (t >= st.tau) return sproc(st.q_star);
        Stream s{mix64(key, mix64(q, t))};
        return sproc(1 + static_cast<int>(s.below(n)));
      };
      break;
    case FdKind::AntiOmega:
      fn = [n, k, st, key](int q, Time t) {
        Stream s{mix64(key, mix64(q, t))};
        return random_subset(s, n, n - k, t >= st.tau ? st.q_star : 0);
      };
      break;
    case FdKind::VectorOmega:
      fn = [n, k, st, key](int q, Time t) {
        Stream s{mix64(key, mix64(q, t))};
        Value::Tuple v;
        for (int j = 1; j <= k; ++j) {
          if (t >= st.tau && j == st.j_star)
            v.push_back(sproc(st.q_star));
          else
            v.push_back(sproc(1 + static_cast<int>(s.below(n))));
        }
        return Value::tuple(std::move(v));
      };
      break;
  }
  return FdHistory(kind, n, k, std::move(fn), st);
}

FdHistory anti_from_vector(const FdHistory& h) {
  if (h.kind() != FdKind::VectorOmega) throw FailureError("anti_from_vector needs a vector oracle");
  int n = h.n(), k = h.k();
  auto fn = [h, n, k](int q, Time t) {
    Value vec = h.value_at(q, t);
    std::vector<bool> used(n + 1, false);
    for (const auto& e : vec.as_tuple()) used[e.as_pid().index] = true;
    std::vector<int> out;
    for (int i = 1; i <= n && static_cast<int>(out.size()) < n - k; ++i)
      if (!used[i]) out.push_back(i);
    return subset_value(std::move(out));
  };
  Stabilization st = h.stabilization();
  st.j_star = 0;
  return FdHistory(FdKind::AntiOmega, n, k, std::move(fn), st);
}

FdHistory omega_complement(const FdHistory& h) {
  if (h.kind() != FdKind::Omega) throw FailureError("omega_complement needs an Omega oracle");
  int n = h.n();
  auto fn = [h, n](int q, Time t) {
    int leader = h.value_at(q, t).as_pid().index;
    std::vector<int> out;
    for (int i = 1; i <= n; ++i)
      if (i != leader) out.push_back(i);
    return subset_value(std::move(out));
  };
  return FdHistory(FdKind::AntiOmega, n, 1, std::move(fn), h.stabilization());
}

FdHistory vector_from_omega(const FdHistory& h, int x) {
  if (h.kind() != FdKind::Omega) throw FailureError("vector_from_omega needs an Omega oracle");
  auto fn = [h, x](int q, Time t) {
    return Value::tuple(Value::Tuple(static_cast<std::size_t>(x), h.value_at(q, t)));
  };
  Stabilization st = h.stabilization();
  st.j_star = 1;
  return FdHistory(FdKind::VectorOmega, h.n(), x, std::move(fn), st);
}

namespace {

std::string at(int q, Time t) { return "q" + std::to_string(q) + " at time " + std::to_string(t); }

bool is_sproc_in_range(const Value& v, int n) {
  return v.is_pid() && v.as_pid().role == Role::S && v.as_pid().index >= 1 && v.as_pid().index <= n;
}

}  // namespace

Verdict check_history(const FailurePattern& f, const FdHistory& h, Time horizon) {
  int n = h.n(), k = h.k();
  const auto& st = h.stabilization();
  if (h.kind() != FdKind::Trivial && !f.correct(st.q_star))
    return Verdict::fail("disclosed q* = q" + std::to_string(st.q_star) + " is faulty");
  for (Time t = 0; t < horizon; ++t) {
    for (int q = 1; q <= n; ++q) {
      if (!f.alive(q, t)) continue;
      Value v = h.value_at(q, t);
      bool after = t >= st.tau && f.correct(q);
      switch (h.kind()) {
        case FdKind::Trivial:
          if (!v.is_bottom()) return Verdict::fail("non-bottom output at " + at(q, t), t);
          break;
        case FdKind::Omega:
          if (!is_sproc_in_range(v, n)) return Verdict::fail("range violation at " + at(q, t), t);
          if (after && v.as_pid().index != st.q_star)
            return Verdict::fail("leader differs from q* at " + at(q, t), t);
          break;
        case FdKind::AntiOmega: {
          if (!v.is_tuple() || static_cast<int>(v.size()) != n - k)
            return Verdict::fail("output size is not n-k at " + at(q, t), t);
          std::set<int> seen;
          for (const auto& e : v.as_tuple()) {
            if (!is_sproc_in_range(e, n) || !seen.insert(e.as_pid().index).second)
              return Verdict::fail("range violation at " + at(q, t), t);
          }
          if (after && seen.count(st.q_star))
            return Verdict::fail("q* output at " + at(q, t), t);
          break;
        }
        case FdKind::VectorOmega: {
          if (!v.is_tuple() || static_cast<int>(v.size()) != k)
            return Verdict::fail("vector length is not k at " + at(q, t), t);
          for (const auto& e : v.as_tuple())
            if (!is_sproc_in_range(e, n)) return Verdict::fail("range violation at " + at(q, t), t);
          if (st.j_star < 1 || st.j_star > k) return Verdict::fail("disclosed j* out of range");
          if (after && v[st.j_star - 1].as_pid().index != st.q_star)
            return Verdict::fail("position j* not pinned at " + at(q, t), t);
          break;
        }
      }
    }
  }
  return Verdict::pass();
}

}  // namespace efd
