#include <doctest.h>

#include "nsglib/analysis.hpp"
#include "nsglib/knn.hpp"
#include "nsglib/mrng.hpp"
#include "nsglib/search.hpp"
#include "test_util.hpp"

using namespace nsglib;

TEST_CASE("lune membership") {
  // p=(0,0), q=(2,0); r=(1,0.5) is inside, r'=(4,0) is outside both balls.
  Dataset data({0.0f, 0.0f, 2.0f, 0.0f, 1.0f, 0.5f, 4.0f, 0.0f}, 4, 2);
  CHECK(in_lune(0, 1, 2, data));
  CHECK(!in_lune(0, 1, 3, data));
  CHECK_THROWS_AS(in_lune(0, 0, 1, data), UsageError);
}

TEST_CASE("lune boundary is exclusive") {
  // Equilateral with exactly representable squared distances: the unit basis
  // vectors in 3-d are pairwise at squared distance 2. The equidistant point
  // sits on both sphere boundaries and is outside the open lune.
  Dataset data({1.0f, 0.0f, 0.0f, 0.0f, 1.0f, 0.0f, 0.0f, 0.0f, 1.0f}, 3, 3);
  CHECK(l2_distance_sq(data.point(0), data.point(1)) == 2.0f);
  CHECK(l2_distance_sq(data.point(2), data.point(0)) == 2.0f);
  CHECK(l2_distance_sq(data.point(2), data.point(1)) == 2.0f);
  CHECK(!in_lune(0, 1, 2, data));
}

TEST_CASE("edge selection drops a candidate occluded by a closer one") {
  Dataset data({0.0f, 0.0f, 1.0f, 0.0f, 2.0f, 0.0f}, 3, 2);
  std::vector<Neighbor> candidates = {Neighbor(1, 1.0f), Neighbor(2, 4.0f)};
  auto selected = select_mrng_neighbors(0, candidates, data);
  CHECK(selected == std::vector<PointId>{1});
}

TEST_CASE("edge selection keeps orthogonal candidates") {
  Dataset data({0.0f, 0.0f, 1.0f, 0.0f, 0.0f, 1.0f}, 3, 2);
  std::vector<Neighbor> candidates = {Neighbor(1, 1.0f), Neighbor(2, 1.0f)};
  auto selected = select_mrng_neighbors(0, candidates, data);
  CHECK(selected == std::vector<PointId>{1, 2});
}

TEST_CASE("a single candidate is always selected") {
  Dataset data({0.0f, 3.0f}, 2, 1);
  std::vector<Neighbor> candidates = {Neighbor(1, 9.0f)};
  CHECK(select_mrng_neighbors(0, candidates, data) == std::vector<PointId>{1});
}

TEST_CASE("edge selection honors the cap") {
  auto data = testutil::random_dataset(100, 2, 40);
  std::vector<Neighbor> candidates;
  for (PointId q = 1; q < data.size(); ++q)
    candidates.emplace_back(q, l2_distance_sq(data.point(0), data.point(q)));
  std::sort(candidates.begin(), candidates.end());
  auto capped = select_mrng_neighbors(0, candidates, data, 3);
  auto full = select_mrng_neighbors(0, candidates, data);
  REQUIRE(capped.size() <= 3);
  CHECK(std::equal(capped.begin(), capped.end(), full.begin()));
}

TEST_CASE("mrng on three collinear points") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 3.0f});
  DirectedGraph g = build_mrng(data);
  CHECK(testutil::row_of(g, 0) == std::vector<PointId>{1});
  CHECK(testutil::row_of(g, 1) == std::vector<PointId>{0, 2});
  CHECK(testutil::row_of(g, 2) == std::vector<PointId>{1});
}

TEST_CASE("mrng with two points links both ways") {
  auto data = testutil::line_dataset({0.0f, 4.0f});
  DirectedGraph g = build_mrng(data);
  CHECK(testutil::row_of(g, 0) == std::vector<PointId>{1});
  CHECK(testutil::row_of(g, 1) == std::vector<PointId>{0});
  CHECK_THROWS_AS(build_mrng(testutil::line_dataset({1.0f})), UsageError);
}

TEST_CASE("rng on three collinear points keeps only consecutive edges") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 3.0f});
  DirectedGraph g = build_rng(data);
  CHECK(testutil::row_of(g, 0) == std::vector<PointId>{1});
  CHECK(testutil::row_of(g, 1) == std::vector<PointId>{0, 2});
  CHECK(testutil::row_of(g, 2) == std::vector<PointId>{1});
}

TEST_CASE("rng with two points") {
  auto data = testutil::line_dataset({0.0f, 4.0f});
  DirectedGraph g = build_rng(data);
  CHECK(testutil::row_of(g, 0) == std::vector<PointId>{1});
  CHECK(testutil::row_of(g, 1) == std::vector<PointId>{0});
}

TEST_CASE("every node's first mrng edge is its exact nearest neighbor") {
  auto data = testutil::random_dataset(300, 4, 41);
  DirectedGraph g = build_mrng(data, 2);
  for (PointId p = 0; p < data.size(); ++p) {
    auto nn = testutil::brute_force_knn_ids(data, data.point(p), 1, p);
    REQUIRE(!g.out(p).empty());
    CHECK(g.out(p)[0] == nn[0]);
  }
}

TEST_CASE("rng edges are a subset of mrng edges") {
  auto data = testutil::random_dataset(200, 3, 42);
  DirectedGraph rng = build_rng(data, 2);
  DirectedGraph mrng = build_mrng(data, 2);
  for (PointId p = 0; p < data.size(); ++p) {
    auto mrow = mrng.out(p);
    for (PointId q : rng.out(p)) {
      CHECK(std::find(mrow.begin(), mrow.end(), q) != mrow.end());
    }
  }
}

TEST_CASE("mrng is a monotonic search network on random instances") {
  for (std::uint32_t d : {2u, 4u, 8u}) {
    auto data = testutil::random_dataset(300, d, 43 + d);
    DirectedGraph g = build_mrng(data, 2);
    MsnetCheck check = check_msnet(g, data, 2);
    CHECK(check.holds);
  }
}

TEST_CASE("mrng pairwise edge angles stay above sixty degrees") {
  const double bound = 3.14159265358979323846 / 3.0 - 1e-4;
  for (std::uint32_t d : {2u, 4u, 8u}) {
    auto data = testutil::random_dataset(300, d, 50 + d);
    DirectedGraph g = build_mrng(data, 2);
    CHECK(min_pairwise_edge_angle(g, data) >= bound);
  }
}

TEST_CASE("the detour chain separates rng from mrng") {
  Dataset data = testutil::detour_chain_dataset();
  DirectedGraph rng = build_rng(data);
  DirectedGraph mrng = build_mrng(data);

  // In the RNG the only way out of node 1 is node 0, which is farther from
  // node 5 than node 1 already is.
  CHECK(testutil::row_of(rng, 1) == std::vector<PointId>{0});

  MsnetCheck rng_check = check_msnet(rng, data);
  CHECK(!rng_check.holds);
  MsnetCheck mrng_check = check_msnet(mrng, data);
  CHECK(mrng_check.holds);

  GreedyWalkResult stuck = greedy_walk(rng, data, 5, 1);
  CHECK(!stuck.reached);
}

TEST_CASE("mrng construction is deterministic and thread-count independent") {
  auto data = testutil::random_dataset(250, 4, 60);
  DirectedGraph a = build_mrng(data, 1);
  DirectedGraph b = build_mrng(data, 3);
  CHECK(a == b);
}
