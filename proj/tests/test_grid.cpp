#include <doctest.h>

#include <algorithm>

#include "hjleak/errors.hpp"
#include "hjleak/grid.hpp"
#include "support.hpp"

using namespace hjleak;

TEST_SUITE("grid") {

TEST_CASE("multi-index to state") {
  const Grid g = testing::si_grid();
  CHECK(g.size() == 10201);
  auto at = [&](Index i, Index j) { return g.index_to_state(g.point(std::vector<Index>{i, j})); };
  CHECK(at(0, 0) == std::vector<double>{-4.0, -4.0});
  const auto mid = at(50, 50);
  CHECK(mid[0] == doctest::Approx(0.0));
  CHECK(mid[1] == doctest::Approx(0.0));
  const auto corner = at(100, 0);
  CHECK(corner[0] == doctest::Approx(4.0));
  CHECK(corner[1] == doctest::Approx(-4.0));
}

TEST_CASE("linear and multi indices round trip") {
  const Grid g({0, 0, 0}, {1, 2, 3}, {3, 4, 5});
  CHECK(g.strides() == std::vector<Index>{20, 5, 1});
  for (Index i = 0; i < g.size(); ++i) CHECK(g.linear(g.multi(i)) == i);
  CHECK_THROWS_AS(g.multi(g.size()), DomainError);
  CHECK_THROWS_AS(g.linear(std::vector<Index>{3, 0, 0}), DomainError);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(Grid({0}, {1, 2}, {3}), ConfigError);
  CHECK_THROWS_AS(Grid({0}, {1}, {1}), ConfigError);
  CHECK_THROWS_AS(Grid({1}, {1}, {3}), ConfigError);
  CHECK_THROWS_AS(Grid({}, {}, {}), ConfigError);
}

TEST_CASE("nearest index clamps") {
  const Grid g = testing::si_grid();
  const std::vector<double> inside{0.03, -0.05}, outside{9.0, -9.0};
  CHECK(g.state_to_nearest_index(inside).multi == std::vector<Index>{50, 49});
  CHECK(g.state_to_nearest_index(outside).multi == std::vector<Index>{100, 0});
  CHECK(g.contains(inside));
  CHECK_FALSE(g.contains(outside));
}

TEST_CASE("face neighbours") {
  const Grid g = testing::si_grid();
  CHECK(g.neighbors(g.linear(std::vector<Index>{50, 50})).size() == 4);
  CHECK(g.neighbors(0).size() == 2);
  CHECK(g.neighbors(g.linear(std::vector<Index>{0, 50})).size() == 3);

  const Grid g6(std::vector<double>(6, -1.0), std::vector<double>(6, 1.0), std::vector<Index>(6, 5));
  const auto interior = g6.linear(std::vector<Index>(6, 2));
  const auto nb = g6.neighbors(interior);
  CHECK(nb.size() == 12);
  for (Index n : nb) {
    const auto a = g6.multi(n), b = g6.multi(interior);
    Index changed = 0;
    for (Index d = 0; d < 6; ++d) changed += a[d] != b[d];
    CHECK(changed == 1);
  }
  CHECK(g6.neighbors(0).size() == 6);
}

TEST_CASE("projection onto subsystem coordinates") {
  const Grid g = testing::si_grid();
  PartitionSchema si{{0}, {1}, {}, {0}, {1}, {}};
  const auto p = project_point(g, si, g.point(std::vector<Index>{3, 7}), 1);
  CHECK(p.multi == std::vector<Index>{3});

  const Grid g6(std::vector<double>(6, 0.0), std::vector<double>(6, 1.0), {3, 4, 5, 6, 7, 8});
  PartitionSchema quad{{0, 2}, {1, 3}, {4, 5}, {}, {}, {0, 1}};
  const std::vector<Index> m{2, 3, 4, 5, 6, 7};
  const auto q = project_point(g6, quad, g6.point(m), 2);
  CHECK(q.multi == std::vector<Index>{3, 5, 6, 7});

  // Degenerate partition: subsystem 1 owns every dimension.
  const Grid g2({0, 0}, {1, 1}, {4, 5});
  PartitionSchema all{{0, 1}, {}, {}, {}, {}, {}};
  const Projection id(g2, all.subsystem_dims(1));
  for (Index i = 0; i < g2.size(); ++i) CHECK(id(i) == i);
}

TEST_CASE("projection walks match the direct index map") {
  const Grid g6(std::vector<double>(6, 0.0), std::vector<double>(6, 1.0), {3, 4, 2, 5, 3, 2});
  const Projection a(g6, {0, 2, 4, 5}), b(g6, {1, 3, 4, 5});
  Index visited = 0;
  Projection::for_each_pair(a, b, 7, g6.size() - 3, [&](Index i, Index ja, Index jb) {
    CHECK(ja == a(i));
    CHECK(jb == b(i));
    CHECK(i == 7 + visited);
    ++visited;
  });
  CHECK(visited == g6.size() - 10);
}

TEST_CASE("schema validation") {
  PartitionSchema s{{0}, {1}, {}, {0}, {1}, {}};
  CHECK_NOTHROW(s.validate(2, 2));
  CHECK_THROWS_AS(s.validate(3, 2), ConfigError);
  PartitionSchema dup{{0}, {0}, {}, {0}, {1}, {}};
  CHECK_THROWS_AS(dup.validate(2, 2), ConfigError);
}

}  // TEST_SUITE
