// Command-line front end: dataset generation, graph construction, search,
// analysis and benchmarking over fvecs/ivecs files and v1 index files.
//
// Exit codes: 0 success, 2 usage error, 3 format/corruption error,
// 4 infeasible result.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "nsglib/analysis.hpp"
#include "nsglib/bench.hpp"
#include "nsglib/io.hpp"
#include "nsglib/knn.hpp"
#include "nsglib/mrng.hpp"
#include "nsglib/nsg.hpp"
#include "nsglib/search.hpp"

namespace {

using namespace nsglib;

std::vector<std::uint32_t> parse_u32_list(const std::string& text) {
  std::vector<std::uint32_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = std::stoul(item, &used);
    if (used != item.size()) throw UsageError("bad integer in list: " + item);
    values.push_back(static_cast<std::uint32_t>(v));
  }
  if (values.empty()) throw UsageError("empty integer list");
  return values;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void print_report(const GraphReport& report) {
  std::fprintf(stderr, "n=%u aod=%.2f mod=%u nn_percent=%.4f scc_count=%u", report.n, report.aod,
               report.mod, report.nn_percent, report.scc_count);
  if (report.has_nav)
    std::fprintf(stderr, " nav=%u reachable_from_nav=%u", report.navigating_node,
                 report.reachable_from_nav);
  std::fprintf(stderr, "\n");
}

KnnGraph load_knn_as_graph(const std::string& path, const Dataset& base) {
  GraphFile file = read_index_file(path);
  if (file.graph.size() != base.size())
    throw FormatError("knn graph " + path + " does not match the base dataset size");
  // Rebuild row distances; stored files carry adjacency only.
  KnnGraph knn;
  knn.n = file.graph.size();
  knn.k = file.graph.max_out_degree();
  if (knn.k == 0) throw FormatError("knn graph " + path + " has no edges");
  for (PointId p = 0; p < knn.n; ++p) {
    if (file.graph.out(p).size() != knn.k)
      throw FormatError("knn graph " + path + " rows are not fixed-width");
  }
  knn.flat.resize(std::size_t(knn.n) * knn.k);
  for (PointId p = 0; p < knn.n; ++p) {
    auto row = file.graph.out(p);
    for (std::uint32_t i = 0; i < knn.k; ++i) {
      float dist = l2_sq(base.point_ptr(p), base.point_ptr(row[i]), base.dim());
      knn.flat[std::size_t(p) * knn.k + i] = Neighbor(row[i], dist, false);
    }
  }
  return knn;
}

struct Options {
  std::string base, query, gt, out, out_dists, index, knn;
  std::string kind = "uniform", method = "auto";
  std::uint32_t query_count = 0;
  std::string l_list = "10,20,40,80,160";
  std::string sizes = "1000,4000,16000";
  std::string k_grid, l_build_grid, m_grid;
  std::uint32_t n = 1000, d = 8, k = 20, l_build = 60, m = 32, K = 10, l = 100;
  std::uint64_t seed = 42;
  int threads = 0;
  float stddev = 3.0f;
  double rho = 1.0, threshold = 0.001, target = 0.95;
  std::uint32_t iters = 12;
  bool force = false;
};

int run(CLI::App& app, Options& opt) {
  const int threads = resolve_threads(opt.threads);

  if (app.got_subcommand("gen-data")) {
    Dataset data = generate_synthetic(synthetic_kind_from_string(opt.kind), opt.n, opt.d, opt.seed,
                                      opt.stddev);
    write_fvecs(data, opt.out);
    std::fprintf(stderr, "wrote %u x %u %s points to %s\n", opt.n, opt.d, opt.kind.c_str(),
                 opt.out.c_str());
    return 0;
  }

  if (app.got_subcommand("build-knn")) {
    Dataset base = read_fvecs(opt.base);
    if (std::uint32_t dups = count_duplicate_points(base))
      std::fprintf(stderr, "note: dataset contains %u duplicate points\n", dups);
    std::string method = opt.method;
    if (method == "auto") method = base.size() <= 10000 ? "exact" : "nndescent";
    KnnGraph knn;
    auto t0 = std::chrono::steady_clock::now();
    if (method == "exact") {
      knn = exact_knn_graph(base, opt.k, threads);
    } else if (method == "nndescent") {
      NnDescentParams params;
      params.k = opt.k;
      params.sample_rate = opt.rho;
      params.max_iters = opt.iters;
      params.convergence_threshold = opt.threshold;
      params.seed = opt.seed;
      params.threads = threads;
      knn = nn_descent(base, params);
    } else {
      throw UsageError("unknown method: " + method + " (expected auto|exact|nndescent)");
    }
    double t1 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    DirectedGraph graph = knn.to_graph();
    write_index_file(graph, kNoNavigatingNode, base.dim(), opt.out);
    GraphReport report = graph_report(graph, base, std::nullopt, threads);
    std::fprintf(stderr, "t1=%.3fs (knn build)\n", t1);
    print_report(report);
    write_graph_report_csv(std::cout, report);
    return 0;
  }

  if (app.got_subcommand("build-nsg")) {
    Dataset base = read_fvecs(opt.base);
    KnnGraph knn = load_knn_as_graph(opt.knn, base);
    NsgBuildParams params;
    params.l_build = opt.l_build;
    params.m = opt.m;
    params.seed = opt.seed;
    params.threads = threads;
    NsgIndex index = build_nsg(knn, base, params);
    save_index(index, opt.out);
    std::fprintf(stderr,
                 "t2=%.3fs nav=%u pre_repair_max=%u repair_edges=%u widened=%u dc=%" PRIu64 "\n",
                 index.build_info.build_seconds, index.navigating_node,
                 index.build_info.pre_repair_max_degree, index.build_info.repair_edges_added,
                 index.build_info.widened_nodes, index.build_info.distance_computations);
    GraphReport report = graph_report(index.graph, base, index.navigating_node, threads);
    print_report(report);
    write_graph_report_csv(std::cout, report);
    return 0;
  }

  if (app.got_subcommand("build-mrng") || app.got_subcommand("build-rng")) {
    bool rng = app.got_subcommand("build-rng");
    Dataset base = read_fvecs(opt.base);
    std::uint32_t cap = rng ? 5000 : 20000;
    if (base.size() > cap && !opt.force)
      throw UsageError("dataset too large for this oracle-scale builder; pass --force");
    DirectedGraph graph = rng ? build_rng(base, threads) : build_mrng(base, threads);
    write_index_file(graph, kNoNavigatingNode, base.dim(), opt.out);
    print_report(graph_report(graph, base, std::nullopt, threads));
    return 0;
  }

  if (app.got_subcommand("search")) {
    if (opt.K > opt.l) throw UsageError("search requires K <= l");
    Dataset base = read_fvecs(opt.base);
    NsgIndex index = load_index(opt.index);
    if (index.graph.size() != base.size())
      throw FormatError("index does not match the base dataset size");
    Dataset queries = read_fvecs(opt.query);
    std::vector<std::vector<std::int32_t>> results(queries.size());
    std::uint64_t hops = 0, dc = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (std::uint32_t qi = 0; qi < queries.size(); ++qi) {
      SearchStats stats = search_nsg(index, base, queries.point(qi), opt.l, opt.K);
      hops += stats.hops;
      dc += stats.distance_computations;
      for (const Neighbor& nb : stats.results)
        results[qi].push_back(static_cast<std::int32_t>(nb.id));
      results[qi].resize(opt.K, -1);  // pads short rows; cannot happen on a repaired NSG
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_ivecs(results, opt.out);
    std::fprintf(stderr, "queries=%u l=%u K=%u mean_hops=%.2f mean_dc=%.2f qps=%.1f\n",
                 queries.size(), opt.l, opt.K, double(hops) / queries.size(),
                 double(dc) / queries.size(), queries.size() / elapsed);
    return 0;
  }

  if (app.got_subcommand("split")) {
    Dataset all = read_fvecs(opt.base);
    std::uint32_t count = opt.query_count > 0 ? opt.query_count
                                              : std::max<std::uint32_t>(1, all.size() / 100);
    if (count >= all.size()) throw UsageError("split: query count must be below the dataset size");

    std::vector<std::uint32_t> idx(all.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(opt.seed);
    for (std::uint32_t i = 0; i < count; ++i) {
      std::uint32_t j = i + static_cast<std::uint32_t>(rng() % (all.size() - i));
      std::swap(idx[i], idx[j]);
    }
    std::vector<char> is_query(all.size(), 0);
    for (std::uint32_t i = 0; i < count; ++i) is_query[idx[i]] = 1;

    std::vector<float> qv, bv;
    for (std::uint32_t i = 0; i < count; ++i) {
      auto p = all.point(idx[i]);
      qv.insert(qv.end(), p.begin(), p.end());
    }
    for (std::uint32_t i = 0; i < all.size(); ++i) {
      if (is_query[i]) continue;
      auto p = all.point(i);
      bv.insert(bv.end(), p.begin(), p.end());
    }
    write_fvecs(Dataset(std::move(qv), count, all.dim()), opt.query);
    write_fvecs(Dataset(std::move(bv), all.size() - count, all.dim()), opt.out);
    std::fprintf(stderr, "held out %u of %u points as queries\n", count, all.size());
    return 0;
  }

  if (app.got_subcommand("ground-truth")) {
    Dataset base = read_fvecs(opt.base);
    Dataset queries = read_fvecs(opt.query);
    GroundTruth truth = compute_ground_truth(base, queries, opt.K, threads);
    write_ground_truth(truth, opt.out, opt.out_dists);
    std::fprintf(stderr, "wrote exact top-%u for %u queries\n", opt.K, queries.size());
    return 0;
  }

  if (app.got_subcommand("bench")) {
    Dataset base = read_fvecs(opt.base);
    NsgIndex index = load_index(opt.index);
    Dataset queries = read_fvecs(opt.query);
    std::vector<std::uint32_t> l_values = parse_u32_list(opt.l_list);
    GroundTruth truth;
    if (!opt.gt.empty()) {
      auto rows = read_ivecs(opt.gt);
      if (rows.size() != queries.size()) throw FormatError("ground truth size mismatch");
      truth.query_count = queries.size();
      truth.K = static_cast<std::uint32_t>(rows.front().size());
      for (const auto& row : rows)
        for (std::int32_t id : row) truth.flat.emplace_back(static_cast<PointId>(id), 0.0f, false);
    } else {
      truth = compute_ground_truth(base, queries, opt.K, threads);
    }
    auto points = run_sweep(index, base, queries, truth, l_values, opt.K);
    write_sweep_csv(std::cout, points);
    return 0;
  }

  if (app.got_subcommand("analyze")) {
    Dataset base = read_fvecs(opt.base);
    GraphFile file = read_index_file(opt.index);
    if (file.graph.size() != base.size())
      throw FormatError("index does not match the base dataset size");
    std::optional<PointId> nav;
    if (file.navigating_node != kNoNavigatingNode) nav = file.navigating_node;
    GraphReport report = graph_report(file.graph, base, nav, threads);
    print_report(report);
    write_graph_report_csv(std::cout, report);
    return 0;
  }

  if (app.got_subcommand("check-msnet")) {
    Dataset base = read_fvecs(opt.base);
    GraphFile file = read_index_file(opt.index);
    if (file.graph.size() != base.size())
      throw FormatError("index does not match the base dataset size");
    MsnetCheck check = check_msnet(file.graph, base, threads);
    if (check.holds) {
      std::printf("HOLDS\n");
    } else {
      std::printf("VIOLATED p=%u q=%u stuck=%u\n", check.p, check.q, check.stuck);
    }
    return 0;
  }

  if (app.got_subcommand("delta-r")) {
    Dataset base = read_fvecs(opt.base);
    double dr = estimate_delta_r(base, threads, opt.force);
    std::printf("n,delta_r\n%u,%.9g\n", base.size(), dr);
    return 0;
  }

  if (app.got_subcommand("hop-scaling")) {
    Dataset base = read_fvecs(opt.base);
    Dataset queries = read_fvecs(opt.query);
    std::vector<std::uint32_t> sizes = parse_u32_list(opt.sizes);
    std::vector<std::uint32_t> l_sweep = parse_u32_list(opt.l_list);
    HopScalingRecipe recipe;
    recipe.k = opt.k;
    recipe.l_build = opt.l_build;
    recipe.m = opt.m;
    recipe.seed = opt.seed;
    recipe.threads = threads;
    auto rows = hop_scaling_experiment(base, sizes, queries, opt.K, opt.target, recipe, l_sweep);
    write_hop_scaling_csv(std::cout, rows);
    return 0;
  }

  if (app.got_subcommand("grid-search")) {
    Dataset base = read_fvecs(opt.base);
    Dataset queries = read_fvecs(opt.query);
    auto k_grid = parse_u32_list(opt.k_grid);
    auto lb_grid = parse_u32_list(opt.l_build_grid);
    auto m_grid = parse_u32_list(opt.m_grid);
    auto l_values = parse_u32_list(opt.l_list);
    GridSearchResult result = grid_search(base, k_grid, lb_grid, m_grid, queries, opt.K,
                                          opt.target, l_values, opt.seed, threads);
    if (!result.feasible) {
      std::fprintf(stderr, "no feasible params: no combination reached precision %.3f\n",
                   opt.target);
      return 4;
    }
    std::printf("k,l_build,m,l,precision,mean_distance_computations,qps\n");
    std::printf("%u,%u,%u,%u,%.6f,%.6f,%.2f\n", result.best.k, result.best.l_build, result.best.m,
                result.best_l, result.best_precision, result.best_mean_dc, result.best_qps);
    return 0;
  }

  std::fprintf(stderr, "%s\n", app.help().c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-based approximate nearest neighbor toolkit"};
  app.require_subcommand(0, 1);
  Options opt;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic fvecs dataset");
  gen->add_option("--kind", opt.kind, "uniform|gaussian");
  gen->add_option("--n", opt.n)->required();
  gen->add_option("--d", opt.d)->required();
  gen->add_option("--seed", opt.seed);
  gen->add_option("--stddev", opt.stddev, "gaussian standard deviation");
  gen->add_option("--out", opt.out)->required();

  auto* bknn = app.add_subcommand("build-knn", "build a kNN graph (exact or nn-descent)");
  bknn->add_option("--base", opt.base)->required();
  bknn->add_option("--k", opt.k)->required();
  bknn->add_option("--method", opt.method, "auto|exact|nndescent (auto: exact when n <= 10000)");
  bknn->add_option("--rho", opt.rho, "nn-descent sample rate");
  bknn->add_option("--iters", opt.iters, "nn-descent max iterations");
  bknn->add_option("--threshold", opt.threshold, "nn-descent convergence threshold");
  bknn->add_option("--seed", opt.seed);
  bknn->add_option("--threads", opt.threads);
  bknn->add_option("--out", opt.out)->required();

  auto* bnsg = app.add_subcommand("build-nsg", "build an NSG from a kNN graph file");
  bnsg->add_option("--base", opt.base)->required();
  bnsg->add_option("--knn", opt.knn)->required();
  bnsg->add_option("--l-build", opt.l_build);
  bnsg->add_option("--m", opt.m)->check(CLI::PositiveNumber);
  bnsg->add_option("--seed", opt.seed);
  bnsg->add_option("--threads", opt.threads);
  bnsg->add_option("--out", opt.out)->required();

  auto* bmrng = app.add_subcommand("build-mrng", "exact MRNG construction (quadratic)");
  bmrng->add_option("--base", opt.base)->required();
  bmrng->add_option("--out", opt.out)->required();
  bmrng->add_option("--threads", opt.threads);
  bmrng->add_flag("--force", opt.force, "allow large datasets");

  auto* brng = app.add_subcommand("build-rng", "exact RNG construction (cubic)");
  brng->add_option("--base", opt.base)->required();
  brng->add_option("--out", opt.out)->required();
  brng->add_option("--threads", opt.threads);
  brng->add_flag("--force", opt.force, "allow large datasets");

  auto* search = app.add_subcommand("search", "query an NSG index");
  search->add_option("--index", opt.index)->required();
  search->add_option("--base", opt.base)->required();
  search->add_option("--query", opt.query)->required();
  search->add_option("--l", opt.l);
  search->add_option("--K", opt.K);
  search->add_option("--out", opt.out)->required();

  auto* split = app.add_subcommand("split", "hold out a validation query set (default one percent)");
  split->add_option("--base", opt.base)->required();
  split->add_option("--out", opt.out, "remaining base fvecs")->required();
  split->add_option("--query", opt.query, "held-out query fvecs")->required();
  split->add_option("--count", opt.query_count, "queries to hold out; 0 = n/100");
  split->add_option("--seed", opt.seed);

  auto* gt = app.add_subcommand("ground-truth", "exact top-K by serial scan");
  gt->add_option("--base", opt.base)->required();
  gt->add_option("--query", opt.query)->required();
  gt->add_option("--K", opt.K);
  gt->add_option("--out", opt.out, "ids ivecs path")->required();
  gt->add_option("--out-dists", opt.out_dists, "distances fvecs path")->required();
  gt->add_option("--threads", opt.threads);

  auto* bench = app.add_subcommand("bench", "precision / QPS sweep over l values");
  bench->add_option("--index", opt.index)->required();
  bench->add_option("--base", opt.base)->required();
  bench->add_option("--query", opt.query)->required();
  bench->add_option("--gt", opt.gt, "ids ivecs; computed when omitted");
  bench->add_option("--l", opt.l_list, "comma list of pool sizes");
  bench->add_option("--K", opt.K);
  bench->add_option("--threads", opt.threads);

  auto* analyze = app.add_subcommand("analyze", "degree / NN% / SCC / reachability report");
  analyze->add_option("--index", opt.index)->required();
  analyze->add_option("--base", opt.base)->required();
  analyze->add_option("--threads", opt.threads);

  auto* msnet = app.add_subcommand("check-msnet", "all-pairs greedy reachability check");
  msnet->add_option("--index", opt.index)->required();
  msnet->add_option("--base", opt.base)->required();
  msnet->add_option("--threads", opt.threads);

  auto* dr = app.add_subcommand("delta-r", "minimum non-isosceles side difference");
  dr->add_option("--base", opt.base)->required();
  dr->add_option("--threads", opt.threads);
  dr->add_flag("--force", opt.force, "allow n > 2000");

  auto* hops = app.add_subcommand("hop-scaling", "hops vs dataset size at fixed precision");
  hops->add_option("--base", opt.base)->required();
  hops->add_option("--query", opt.query)->required();
  hops->add_option("--sizes", opt.sizes, "comma list of prefix sizes");
  hops->add_option("--K", opt.K);
  hops->add_option("--target-precision", opt.target);
  hops->add_option("--k", opt.k);
  hops->add_option("--l-build", opt.l_build);
  hops->add_option("--m", opt.m);
  hops->add_option("--l", opt.l_list, "comma list of pool sizes to try");
  hops->add_option("--seed", opt.seed);
  hops->add_option("--threads", opt.threads);

  auto* grid = app.add_subcommand("grid-search", "tune (k, l_build, m) on a sample");
  grid->add_option("--base", opt.base)->required();
  grid->add_option("--query", opt.query)->required();
  grid->add_option("--k-grid", opt.k_grid)->required();
  grid->add_option("--l-build-grid", opt.l_build_grid)->required();
  grid->add_option("--m-grid", opt.m_grid)->required();
  grid->add_option("--K", opt.K);
  grid->add_option("--target-precision", opt.target);
  grid->add_option("--l", opt.l_list, "comma list of pool sizes");
  grid->add_option("--seed", opt.seed);
  grid->add_option("--threads", opt.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app, opt);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
