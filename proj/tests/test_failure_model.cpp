#include "doctest.h"

#include "efd/failure.hpp"

using namespace efd;

TEST_CASE("correct and faulty sets") {
  auto f = FailurePattern::make(3, {{2, 5}});
  CHECK(f.correct_set() == std::set<int>{1, 3});
  CHECK(f.faulty_set() == std::set<int>{2});
  CHECK(FailurePattern::make(3, {}).correct_set() == std::set<int>{1, 2, 3});
  CHECK(FailurePattern::make(3, {{2, 0}, {3, 4}}).correct_set() == std::set<int>{1});
  CHECK(f.alive(2, 4));
  CHECK_FALSE(f.alive(2, 5));
}

TEST_CASE("make_pattern validation and environments") {
  auto f = FailurePattern::make(3, {{2, 5}, {3, 0}});
  CHECK(f.correct_set() == std::set<int>{1});
  CHECK_THROWS_AS(FailurePattern::make(2, {{1, 0}, {2, 0}}), FailureError);
  CHECK_THROWS_AS(FailurePattern::make(2, {{3, 0}}), FailureError);
  auto one = FailurePattern::make(3, {{1, 2}});
  CHECK(one.in_environment(1));
  CHECK_FALSE(one.in_environment(0));
  CHECK_FALSE(f.in_environment(1));
  CHECK(f.in_environment(2));
}

TEST_CASE("sampled patterns stay inside E_t") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    int n = 1 + static_cast<int>(rng.below(5));
    int t = static_cast<int>(rng.below(n));
    auto f = sample_pattern(n, t, 40, rng);
    CHECK(f.in_environment(t));
    CHECK_FALSE(f.correct_set().empty());
  }
}

TEST_CASE("trivial oracle outputs bottom") {
  auto f = FailurePattern::make(3, {{1, 3}});
  auto h = make_oracle(FdKind::Trivial, f, 1, 9);
  for (Time t = 0; t < 20; ++t) CHECK(h.value_at(2, t).is_bottom());
  CHECK(check_history(f, h, 100).ok());
}

TEST_CASE("hand-built anti-omega histories") {
  auto f = FailurePattern::make(3, {{2, 0}, {3, 0}});
  Stabilization st{0, 1, 0};
  FdHistory good(FdKind::AntiOmega, 3, 1, [](int, Time) { return Value::tuple({sproc(2), sproc(3)}); }, st);
  CHECK(check_history(f, good, 50).ok());

  FdHistory bad(FdKind::AntiOmega, 3, 1, [](int, Time t) {
    return t == 7 ? Value::tuple({sproc(1), sproc(3)}) : Value::tuple({sproc(2), sproc(3)});
  }, st);
  auto v = check_history(f, bad, 50);
  CHECK(v.status == Status::Fail);
  CHECK(v.step == 7);

  auto f4 = FailurePattern::make(4, {});
  FdHistory wrong_size(FdKind::AntiOmega, 4, 2, [](int, Time) {
    return Value::tuple({sproc(1), sproc(2), sproc(3)});
  }, Stabilization{0, 4, 0});
  CHECK(check_history(f4, wrong_size, 5).status == Status::Fail);
}

TEST_CASE("vector oracle pins j* to q* after tau") {
  auto f = FailurePattern::make(4, {{3, 10}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto h = make_oracle(FdKind::VectorOmega, f, 2, seed);
    const auto& st = h.stabilization();
    CHECK(f.correct(st.q_star));
    CHECK(st.j_star >= 1);
    CHECK(st.j_star <= 2);
    for (Time t = st.tau; t < st.tau + 50; ++t)
      for (int q : f.correct_set()) CHECK(h.value_at(q, t)[st.j_star - 1] == Value(sproc(st.q_star)));
  }
}

TEST_CASE("anti_from_vector complement and padding") {
  auto fixed = [](Value v) {
    return FdHistory(FdKind::VectorOmega, 4, 2, [v](int, Time) { return v; }, Stabilization{0, 1, 1});
  };
  auto a = anti_from_vector(fixed(Value::tuple({sproc(1), sproc(3)})));
  CHECK(a.value_at(1, 0) == Value::tuple({sproc(2), sproc(4)}));
  auto b = anti_from_vector(fixed(Value::tuple({sproc(1), sproc(1)})));
  CHECK(b.value_at(1, 0) == Value::tuple({sproc(2), sproc(3)}));
}

TEST_CASE("oracles from every kind pass their own check") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    int n = 2 + static_cast<int>(rng.below(4));
    auto f = sample_pattern(n, n - 1, 60, rng);
    int k = 1 + static_cast<int>(rng.below(n - 1));
    for (auto kind : {FdKind::Trivial, FdKind::Omega, FdKind::AntiOmega, FdKind::VectorOmega}) {
      auto h = make_oracle(kind, f, k, rng.next());
      CHECK(check_history(f, h, 200).ok());
      if (kind == FdKind::VectorOmega) CHECK(check_history(f, anti_from_vector(h), 200).ok());
      if (kind == FdKind::Omega) CHECK(check_history(f, omega_complement(h), 200).ok());
    }
  }
}

TEST_CASE("fd kind names round-trip") {
  for (auto kind : {FdKind::Trivial, FdKind::Omega, FdKind::AntiOmega, FdKind::VectorOmega})
    CHECK(parse_fd_kind(fd_kind_name(kind)) == kind);
  CHECK_THROWS_AS(parse_fd_kind("perfect"), FailureError);
  auto f = FailurePattern::make(3, {});
  CHECK_THROWS_AS(make_oracle(FdKind::AntiOmega, f, 3, 1), FailureError);
  CHECK_THROWS_AS(make_oracle(FdKind::VectorOmega, f, 0, 1), FailureError);
}
