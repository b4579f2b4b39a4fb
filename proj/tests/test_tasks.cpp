#include "doctest.h"

#include "efd/tasks.hpp"

using namespace efd;

namespace {

Value _() { return Value(); }
Value v(int x) { return Value(x); }

}  // namespace

TEST_CASE("input enumeration sizes") {
  // (|domain| + 1)^m for agreement; subsets of at most j for renaming.
  CHECK(enumerate_inputs(uk_agreement({1, 2}, 1, 2)).size() == 9);
  CHECK(enumerate_inputs(uk_agreement({1, 2, 3}, 2, 3)).size() == 64);
  CHECK(enumerate_inputs(renaming(3, 3, 4)).size() == 15);
  CHECK(enumerate_inputs(renaming(2, 3, 4)).size() == 11);
}

TEST_CASE("prefix relation") {
  CHECK(is_prefix({_(), v(1)}, {v(0), v(1)}));
  CHECK(is_prefix({v(0), v(1)}, {v(0), v(1)}));
  CHECK(!is_prefix({v(1), _()}, {v(0), v(1)}));
  CHECK(!is_prefix({v(0), v(1)}, {_(), v(1)}));
}

TEST_CASE("agreement relation") {
  auto t = uk_agreement({1, 2, 3}, 1, 3);
  CHECK(t.delta({v(0), v(1), _()}, {v(0), v(0), _()}));
  CHECK(t.delta({v(0), v(1), _()}, {v(1), _(), _()}));
  CHECK(!t.delta({v(0), v(1), _()}, {v(0), v(1), _()}));
  CHECK(!t.delta({v(0), v(0), _()}, {v(1), v(1), _()}));
  CHECK(!t.delta({v(0), _(), _()}, {v(0), v(0), _()}));
  auto two = uk_agreement({1, 2, 3}, 2, 3);
  CHECK(two.delta({v(0), v(1), v(2)}, {v(0), v(1), v(1)}));
  CHECK(!two.delta({v(0), v(1), v(2)}, {v(0), v(1), v(2)}));
}

TEST_CASE("renaming relation") {
  auto t = renaming(2, 3, 4);
  CHECK(t.delta({v(1), _(), v(3), _()}, {v(3), _(), v(1), _()}));
  CHECK(t.delta({v(1), _(), v(3), _()}, {v(2), _(), _(), _()}));
  CHECK(!t.delta({v(1), _(), v(3), _()}, {v(2), _(), v(2), _()}));
  CHECK(!t.delta({v(1), _(), v(3), _()}, {v(4), _(), v(1), _()}));
}

TEST_CASE("library tasks validate") {
  CHECK(validate_spec(uk_agreement({1, 2}, 1, 2)).ok());
  CHECK(validate_spec(uk_agreement({1, 2, 3}, 2, 3)).ok());
  CHECK(validate_spec(renaming(2, 3, 3)).ok());
  CHECK(validate_spec(renaming(3, 3, 4)).ok());
}

TEST_CASE("a table whose early output cannot be extended is rejected") {
  std::vector<TableRow> rows = {
      {{v(0), _()}, {v(0), _()}},
      {{_(), v(1)}, {_(), v(1)}},
      {{v(0), v(1)}, {v(1), v(1)}},
  };
  CHECK(validate_spec(table_task(2, rows, false)).status == Status::Fail);
  CHECK_THROWS_AS(table_task(2, rows), SpecError);
  rows.push_back({{v(0), v(1)}, {v(0), v(0)}});
  CHECK(validate_spec(table_task(2, rows, false)).ok());
}

TEST_CASE("io satisfaction") {
  auto t = uk_agreement({1, 2}, 1, 2);
  IoVectors io;
  io.inputs = {v(0), v(1)};
  io.outputs = {v(1), _()};
  io.undecided = {2};
  CHECK(check_satisfies(t, io).ok());
  io.outputs = {v(1), v(0)};
  io.undecided.clear();
  CHECK(check_satisfies(t, io).status == Status::Fail);
}
