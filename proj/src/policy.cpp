#include "efd/policy.hpp"

namespace efd {

ProcessId StarvationGuard::pick(const SchedView& v, const std::vector<ProcessId>& eligible) {
  std::size_t total = static_cast<std::size_t>(v.m + v.n);
  if (since_.size() != total) since_.assign(total, -1);
  std::vector<char> now_eligible(total, 0);
  const ProcessId* oldest = nullptr;
  Time oldest_since = kNever;
  for (const auto& p : eligible) {
    auto s = slot(v, p);
    now_eligible[s] = 1;
    if (since_[s] < 0) since_[s] = v.now;
    if (since_[s] < oldest_since) {
      oldest_since = since_[s];
      oldest = &p;
    }
  }
  for (std::size_t s = 0; s < total; ++s)
    if (!now_eligible[s]) since_[s] = -1;
  ProcessId chosen = (v.now - oldest_since >= window_) ? *oldest : eligible[rng_.below(eligible.size())];
  since_[slot(v, chosen)] = v.now + 1;
  return chosen;
}

std::optional<ProcessId> RoundRobinPolicy::next(const SchedView& v) {
  int total = v.m + v.n;
  for (int tries = 0; tries < total; ++tries) {
    int c = cursor_;
    cursor_ = (cursor_ + 1) % total;
    if (c < v.m) {
      if (v.c_open(c + 1)) return cproc(c + 1);
    } else if (v.s_alive(c - v.m + 1)) {
      return sproc(c - v.m + 1);
    }
  }
  return std::nullopt;
}

namespace {

void add_live_s(const SchedView& v, std::vector<ProcessId>& out) {
  for (int q = 1; q <= v.n; ++q)
    if (v.s_alive(q)) out.push_back(sproc(q));
}

}  // namespace

std::optional<ProcessId> FairRandomPolicy::next(const SchedView& v) {
  std::vector<ProcessId> el;
  for (int i = 1; i <= v.m; ++i)
    if (v.c_open(i)) el.push_back(cproc(i));
  add_live_s(v, el);
  if (el.empty()) return std::nullopt;
  return guard_.pick(v, el);
}

std::optional<ProcessId> KConcurrentPolicy::next(const SchedView& v) {
  if (arrival_.empty()) {
    for (int i = 1; i <= v.m; ++i)
      if ((*v.invited)[i - 1]) arrival_.push_back(i);
  }
  auto open_admitted = [&] {
    int c = 0;
    for (std::size_t a = 0; a < admitted_; ++a)
      if (v.c_open(arrival_[a])) ++c;
    return c;
  };
  while (admitted_ < arrival_.size() && open_admitted() < k_) ++admitted_;
  std::vector<ProcessId> el;
  for (std::size_t a = 0; a < admitted_; ++a)
    if (v.c_open(arrival_[a])) el.push_back(cproc(arrival_[a]));
  add_live_s(v, el);
  if (el.empty()) return std::nullopt;
  return guard_.pick(v, el);
}

std::optional<ProcessId> PersonifiedPolicy::next(const SchedView& v) {
  std::vector<ProcessId> el;
  for (int i = 1; i <= v.m; ++i)
    if (v.c_open(i) && i <= v.n && v.s_alive(i)) el.push_back(cproc(i));
  add_live_s(v, el);
  if (el.empty()) return std::nullopt;
  return guard_.pick(v, el);
}

std::optional<ProcessId> ScriptPolicy::next(const SchedView&) {
  if (pos_ >= script_.size()) return std::nullopt;
  return script_[pos_++];
}

}  // namespace efd
