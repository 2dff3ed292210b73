#include <doctest.h>

#include "nsglib/knn.hpp"
#include "test_util.hpp"

using namespace nsglib;

TEST_CASE("exact knn on collinear points") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 3.0f, 7.0f});
  KnnGraph g = exact_knn_graph(data, 1);
  CHECK(g.row(0)[0].id == 1);
  CHECK(g.row(1)[0].id == 0);
  CHECK(g.row(2)[0].id == 1);
  CHECK(g.row(3)[0].id == 2);
}

TEST_CASE("exact knn with two points") {
  auto data = testutil::line_dataset({0.0f, 5.0f});
  KnnGraph g = exact_knn_graph(data, 1);
  CHECK(g.row(0)[0].id == 1);
  CHECK(g.row(1)[0].id == 0);
}

TEST_CASE("exact knn matches an independent brute-force oracle") {
  auto data = testutil::random_dataset(200, 4, 11);
  KnnGraph g = exact_knn_graph(data, 10, 2);
  for (PointId p = 0; p < data.size(); ++p) {
    auto expected = testutil::brute_force_knn_ids(data, data.point(p), 10, p);
    auto got = testutil::ids_of(g.row(p));
    CHECK(got == expected);
  }
}

TEST_CASE("exact knn rejects k out of range") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 2.0f});
  CHECK_THROWS_AS(exact_knn_graph(data, 3), UsageError);
  CHECK_THROWS_AS(exact_knn_graph(data, 0), UsageError);
}

TEST_CASE("knn rows ascend by distance with no self-loops") {
  auto data = testutil::random_dataset(300, 8, 12);
  KnnGraph g = exact_knn_graph(data, 15, 2);
  for (PointId p = 0; p < data.size(); ++p) {
    auto row = g.row(p);
    for (std::size_t i = 0; i < row.size(); ++i) {
      CHECK(row[i].id != p);
      if (i > 0) CHECK(row[i - 1] < row[i]);
    }
  }
}

TEST_CASE("exact knn at k=1 is the nearest neighbor graph") {
  auto data = testutil::random_dataset(150, 3, 13);
  KnnGraph g = exact_knn_graph(data, 1);
  for (PointId p = 0; p < data.size(); ++p) {
    auto expected = testutil::brute_force_knn_ids(data, data.point(p), 1, p);
    CHECK(g.row(p)[0].id == expected[0]);
  }
}

TEST_CASE("knn graph recall counting") {
  auto data = testutil::random_dataset(50, 2, 14);
  KnnGraph exact = exact_knn_graph(data, 10);
  CHECK(knn_graph_recall(exact, exact) == 1.0);

  // Replace the last entry of every row with an id that cannot be a 10-NN of
  // anything nearby: recall drops by exactly 1/k.
  KnnGraph broken = exact;
  for (PointId p = 0; p < data.size(); ++p) {
    Neighbor& last = broken.flat[std::size_t(p) * broken.k + broken.k - 1];
    PointId replacement = 0;
    while (true) {
      bool used = false;
      for (const Neighbor& nb : exact.row(p)) {
        if (nb.id == replacement) used = true;
      }
      if (!used && replacement != p) break;
      ++replacement;
    }
    last.id = replacement;
  }
  CHECK(knn_graph_recall(broken, exact) == doctest::Approx(0.9));

  KnnGraph other = exact_knn_graph(data, 9);
  CHECK_THROWS_AS(knn_graph_recall(other, exact), UsageError);
}

TEST_CASE("knn graph recall of disjoint lists is zero") {
  KnnGraph a, b;
  a.n = b.n = 3;
  a.k = b.k = 1;
  a.flat = {Neighbor(1, 1.0f), Neighbor(2, 1.0f), Neighbor(0, 1.0f)};
  b.flat = {Neighbor(2, 2.0f), Neighbor(0, 2.0f), Neighbor(1, 2.0f)};
  CHECK(knn_graph_recall(a, b) == 0.0);
}

TEST_CASE("nn-descent with k = n-1 converges to the exact graph") {
  auto data = testutil::random_dataset(12, 2, 15);
  NnDescentParams params;
  params.k = 11;
  params.seed = 5;
  KnnGraph approx = nn_descent(data, params);
  KnnGraph exact = exact_knn_graph(data, 11);
  CHECK(knn_graph_recall(approx, exact) == 1.0);
}

TEST_CASE("nn-descent reaches high recall on random data") {
  auto data = testutil::random_dataset(2000, 8, 16);
  NnDescentParams params;
  params.k = 20;
  params.sample_rate = 1.0;
  params.seed = 9;
  params.threads = 2;
  KnnGraph approx = nn_descent(data, params);
  KnnGraph exact = exact_knn_graph(data, 20, 2);
  double recall = knn_graph_recall(approx, exact);
  CHECK(recall >= 0.90);
}

TEST_CASE("nn-descent is deterministic and thread-count independent") {
  auto data = testutil::random_dataset(600, 6, 17);
  NnDescentParams params;
  params.k = 10;
  params.seed = 77;

  params.threads = 1;
  KnnGraph serial_a = nn_descent(data, params);
  KnnGraph serial_b = nn_descent(data, params);
  params.threads = 3;
  KnnGraph parallel = nn_descent(data, params);

  CHECK(serial_a.flat == serial_b.flat);
  CHECK(serial_a.flat == parallel.flat);
}

TEST_CASE("nn-descent recall is non-decreasing across iterations") {
  auto data = testutil::random_dataset(800, 4, 18);
  KnnGraph exact = exact_knn_graph(data, 10, 2);
  std::vector<double> recalls;
  NnDescentParams params;
  params.k = 10;
  params.seed = 3;
  params.max_iters = 8;
  nn_descent(data, params, [&](std::uint32_t, const KnnGraph& g) {
    recalls.push_back(knn_graph_recall(g, exact));
  });
  REQUIRE(recalls.size() >= 2);
  for (std::size_t i = 1; i < recalls.size(); ++i) CHECK(recalls[i] >= recalls[i - 1]);
  CHECK(recalls.back() > recalls.front());
}

TEST_CASE("nn-descent parameter validation") {
  auto data = testutil::line_dataset({0.0f, 1.0f, 2.0f});
  NnDescentParams params;
  params.k = 3;
  CHECK_THROWS_AS(nn_descent(data, params), UsageError);
  params.k = 1;
  params.sample_rate = 0.0;
  CHECK_THROWS_AS(nn_descent(data, params), UsageError);
}
