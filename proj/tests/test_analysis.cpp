#include <doctest.h>

#include <sstream>

#include "nsglib/analysis.hpp"
#include "nsglib/knn.hpp"
#include "nsglib/mrng.hpp"
#include "nsglib/search.hpp"
#include "test_util.hpp"

using namespace nsglib;

TEST_CASE("report on the complete digraph over three points") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 2.0f});
  DirectedGraph g(3);
  g.row(0) = {1, 2};
  g.row(1) = {0, 2};
  g.row(2) = {0, 1};
  GraphReport report = graph_report(g, data, std::nullopt);
  CHECK(report.aod == 2.0);
  CHECK(report.mod == 2);
  CHECK(report.scc_count == 1);
  CHECK(report.nn_percent == 1.0);
  CHECK(!report.has_nav);
}

TEST_CASE("report detects isolation and unreachable nodes") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 2.0f});
  DirectedGraph g(3);
  g.row(0) = {1};
  g.row(1) = {0};
  GraphReport report = graph_report(g, data, PointId(0));
  CHECK(report.scc_count >= 2);
  CHECK(report.reachable_from_nav == 2);
  CHECK(report.reachable_from_nav < data.size());
}

TEST_CASE("report csv has the documented schema") {
  auto data = testutil::line_dataset({0.0f, 1.0f});
  DirectedGraph g(2);
  g.row(0) = {1};
  g.row(1) = {0};
  GraphReport report = graph_report(g, data, PointId(1));
  std::ostringstream out;
  write_graph_report_csv(out, report);
  CHECK(out.str() ==
        "n,aod,mod,nn_percent,scc_count,navigating_node,reachable_from_nav\n"
        "2,1.000000,1,1.000000,1,1,2\n");
}

TEST_CASE("msnet check is vacuous on a single node") {
  Dataset data({0.0f}, 1, 1);
  DirectedGraph g(1);
  CHECK(check_msnet(g, data).holds);
}

TEST_CASE("msnet check returns the first counterexample") {
  Dataset data = testutil::detour_chain_dataset();
  DirectedGraph rng = build_rng(data);
  MsnetCheck check = check_msnet(rng, data);
  REQUIRE(!check.holds);
  CHECK(check.p == 1);        // its only edge leads away from the target
  CHECK(check.stuck == check.p);
  CHECK(!greedy_walk(rng, data, check.q, check.p).reached);

  DirectedGraph mrng = build_mrng(data);
  CHECK(check_msnet(mrng, data).holds);
}

TEST_CASE("msnet check is thread-count independent") {
  auto data = testutil::random_dataset(150, 2, 90);
  KnnGraph knn = exact_knn_graph(data, 2);
  DirectedGraph g = knn.to_graph();
  MsnetCheck a = check_msnet(g, data, 1);
  MsnetCheck b = check_msnet(g, data, 3);
  CHECK(a.holds == b.holds);
  if (!a.holds) {
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.stuck == b.stuck);
  }
}

TEST_CASE("orthogonal out-edges give a right angle") {
  Dataset data({0.0f, 0.0f, 1.0f, 0.0f, 0.0f, 1.0f}, 3, 2);
  DirectedGraph g(3);
  g.row(0) = {1, 2};
  CHECK(min_pairwise_edge_angle(g, data) == doctest::Approx(3.14159265 / 2.0).epsilon(1e-6));
}

TEST_CASE("equilateral corner gives exactly sixty degrees") {
  Dataset data({1.0f, 0.0f, 0.0f, 0.0f, 1.0f, 0.0f, 0.0f, 0.0f, 1.0f}, 3, 3);
  DirectedGraph g = build_mrng(data);
  // Every node keeps both other corners; all angles are pi/3.
  CHECK(g.out(0).size() == 2);
  CHECK(min_pairwise_edge_angle(g, data) == doctest::Approx(3.14159265 / 3.0).epsilon(1e-6));
}

TEST_CASE("angle is pi when no node has two out-edges") {
  auto data = testutil::line_dataset({0.0f, 1.0f});
  DirectedGraph g(2);
  g.row(0) = {1};
  CHECK(min_pairwise_edge_angle(g, data) == doctest::Approx(3.14159265).epsilon(1e-6));
}

TEST_CASE("delta_r on collinear points with sides 1, 2, 3") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 3.0f});
  CHECK(estimate_delta_r(data) == doctest::Approx(1.0));
}

TEST_CASE("delta_r skips duplicate-involving triples") {
  auto data = testutil::line_dataset({0.0f, 0.0f, 1.0f, 5.0f});
  // Triples touching both zeros have a zero side; the survivors have sides
  // 1, 5, 4 whose smallest difference is 1.
  CHECK(estimate_delta_r(data) == doctest::Approx(1.0));
}

TEST_CASE("delta_r skips exactly isosceles triples") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 2.0f});
  // Only triple has sides 1, 1, 2: isosceles, skipped, nothing left.
  CHECK(std::isinf(estimate_delta_r(data)));
}

TEST_CASE("delta_r input validation") {
  CHECK_THROWS_AS(estimate_delta_r(testutil::line_dataset({0.0f, 1.0f})), UsageError);
  auto big = testutil::random_dataset(2001, 2, 91);
  CHECK_THROWS_AS(estimate_delta_r(big), UsageError);
}

TEST_CASE("delta_r shrinks monotonically over nested prefixes") {
  auto data = testutil::random_dataset(400, 8, 92);
  double d100 = estimate_delta_r(data.prefix(100), 2);
  double d200 = estimate_delta_r(data.prefix(200), 2);
  double d400 = estimate_delta_r(data, 2);
  CHECK(d200 <= d100);
  CHECK(d400 <= d200);
  CHECK(d400 > 0.0);
  CHECK(estimate_delta_r(data, 1) == d400);  // thread-count independent
}

TEST_CASE("hop scaling over a single size emits one row") {
  Dataset base = testutil::random_dataset(1000, 8, 93);
  Dataset queries = testutil::random_dataset(20, 8, 94);
  std::vector<std::uint32_t> sizes = {1000};
  std::vector<std::uint32_t> l_sweep = {10, 20, 40};
  HopScalingRecipe recipe;
  recipe.k = 10;
  recipe.l_build = 20;
  recipe.m = 10;
  recipe.threads = 2;
  auto rows = hop_scaling_experiment(base, sizes, queries, 5, 0.9, recipe, l_sweep);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 1000);
  CHECK(rows[0].mean_hops >= 1.0);

  auto again = hop_scaling_experiment(base, sizes, queries, 5, 0.9, recipe, l_sweep);
  CHECK(rows[0].precision == again[0].precision);
  CHECK(rows[0].mean_hops == again[0].mean_hops);
  CHECK(rows[0].l == again[0].l);

  std::ostringstream csv;
  write_hop_scaling_csv(csv, rows);
  CHECK(csv.str().rfind("n,l,precision,mean_hops,mean_distance_computations,feasible\n", 0) == 0);
}

TEST_CASE("hop scaling validates its inputs") {
  Dataset base = testutil::random_dataset(100, 4, 95);
  Dataset queries = testutil::random_dataset(5, 4, 96);
  HopScalingRecipe recipe;
  std::vector<std::uint32_t> l_sweep = {10};
  std::vector<std::uint32_t> bad_order = {100, 50};
  CHECK_THROWS_AS(hop_scaling_experiment(base, bad_order, queries, 5, 0.9, recipe, l_sweep),
                  UsageError);
  std::vector<std::uint32_t> too_big = {200};
  CHECK_THROWS_AS(hop_scaling_experiment(base, too_big, queries, 5, 0.9, recipe, l_sweep),
                  UsageError);
  std::vector<std::uint32_t> ok = {100};
  std::vector<std::uint32_t> small_l = {3};
  CHECK_THROWS_AS(hop_scaling_experiment(base, ok, queries, 5, 0.9, recipe, small_l), UsageError);
}
