#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "cheapbandits/error.hpp"
#include "cheapbandits/ingest.hpp"

using namespace cheapbandits;

namespace {

Eigen::MatrixXd blobs(std::mt19937_64& rng, int per, const std::vector<Eigen::Vector2d>& means,
                      double sd) {
  std::normal_distribution<double> n(0.0, sd);
  Eigen::MatrixXd pts(per * static_cast<int>(means.size()), 2);
  for (std::size_t b = 0; b < means.size(); ++b)
    for (int i = 0; i < per; ++i) pts.row(b * per + i) = means[b].transpose() + Eigen::RowVector2d(n(rng), n(rng));
  return pts;
}

// Minimum two-cluster inertia by enumerating every bipartition.
double best_bipartition(const Eigen::MatrixXd& pts) {
  const int m = static_cast<int>(pts.rows());
  double best = 1e300;
  for (unsigned mask = 1; mask < (1u << m) - 1; ++mask) {
    if (mask & 1u) continue;  // symmetry
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(pts.cols());
      int count = 0;
      for (int i = 0; i < m; ++i)
        if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
          mean += pts.row(i);
          ++count;
        }
      mean /= count;
      for (int i = 0; i < m; ++i)
        if (((mask >> i) & 1u) == static_cast<unsigned>(side)) total += (pts.row(i) - mean).squaredNorm();
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace

TEST_CASE("points CSV") {
  std::stringstream ss("f1,f2,label\n0.5,1,a\n2,-1,b\n");
  const PointSet ps = read_points_csv(ss);
  REQUIRE(ps.size() == 2);
  CHECK(ps.dimension() == 2);
  CHECK(ps.points(1, 1) == -1.0);
  CHECK(ps.labels[0] == "a");
  std::stringstream out;
  write_points_csv(out, ps);
  CHECK(out.str() == "f1,f2,label\n0.5,1,a\n2,-1,b\n");

  std::stringstream short_row("f1,f2,label\n1,a\n");
  CHECK_THROWS_AS(read_points_csv(short_row), InvalidArgument);
  std::stringstream bad_num("f1,label\nx,a\n");
  CHECK_THROWS_AS(read_points_csv(bad_num), InvalidArgument);
  std::stringstream no_label("f1,f2\n1,2\n");
  CHECK_THROWS_AS(read_points_csv(no_label), InvalidArgument);
}

TEST_CASE("normalize features") {
  Eigen::MatrixXd pts(3, 2);
  pts << 1, 5, 3, 5, 2, 5;
  const Eigen::MatrixXd n = normalize_features(pts);
  CHECK(n(0, 0) == 0.0);
  CHECK(n(1, 0) == 1.0);
  CHECK(n(2, 0) == 0.5);
  CHECK(n.col(1).isZero());
}

TEST_CASE("k-means") {
  std::mt19937_64 rng(1);
  SUBCASE("k equal to the point count") {
    const Eigen::MatrixXd pts = blobs(rng, 5, {{0, 0}, {1, 1}}, 0.3);
    const Clustering cl = cluster(pts, 10, 3);
    CHECK(cl.inertia() == doctest::Approx(0.0));
    CHECK(std::set<int>(cl.assignment.begin(), cl.assignment.end()).size() == 10);
  }
  SUBCASE("two blobs reach the optimal bipartition") {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd pts = blobs(rng, 6, {{0, 0}, {4, 4}}, 0.5);
      const Clustering cl = cluster(pts, 2, trial);
      CHECK(cl.inertia() == doctest::Approx(best_bipartition(pts)).epsilon(1e-9));
    }
  }
  SUBCASE("inertia never increases") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd pts = blobs(rng, 40, {{0, 0}, {1, 0}, {0, 1}, {3, 3}}, 0.6);
      const Clustering cl = cluster(pts, 7, trial);
      for (std::size_t i = 1; i < cl.inertia_trace.size(); ++i)
        CHECK(cl.inertia_trace[i] <= cl.inertia_trace[i - 1] * (1 + 1e-12));
      CHECK(cl.iterations <= 100);
    }
  }
  SUBCASE("deterministic in the seed") {
    const Eigen::MatrixXd pts = blobs(rng, 30, {{0, 0}, {2, 2}}, 1.0);
    CHECK(cluster(pts, 5, 9).assignment == cluster(pts, 5, 9).assignment);
  }
  SUBCASE("errors") {
    const Eigen::MatrixXd pts = blobs(rng, 2, {{0, 0}}, 1.0);
    CHECK_THROWS_AS(cluster(pts, 3, 0), InvalidArgument);
    CHECK_THROWS_AS(cluster(pts, 0, 0), InvalidArgument);
  }
}

TEST_CASE("cluster rewards") {
  const auto r = cluster_rewards({0, 0, 1, 1, 1, 2}, {"x", "y", "x", "x", "x", "y"}, "x", 4);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 0.0);
  CHECK(r[3] == 0.0);
  const auto none = cluster_rewards({0, 1}, {"a", "b"}, "z", 2);
  CHECK(none == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(cluster_rewards({0, 2}, {"a", "b"}, "a", 2), InvalidArgument);
}

TEST_CASE("kNN graph") {
  SUBCASE("collinear points") {
    Eigen::MatrixXd c(3, 1);
    c << 0, 1, 3;
    const Graph g = knn_graph(c, 1);
    REQUIRE(g.edges().size() == 2);
    CHECK(g.edges()[0].u == 0);
    CHECK(g.edges()[0].v == 1);
    CHECK(g.edges()[1].u == 1);
    CHECK(g.edges()[1].v == 2);
    for (const auto& e : g.edges()) CHECK(e.weight == 1.0);
  }
  SUBCASE("k = n-1 is complete") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd c = blobs(rng, 8, {{0, 0}}, 1.0);
    CHECK(knn_graph(c, 7).edges().size() == 28);
  }
  SUBCASE("every node has degree at least k") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd c = blobs(rng, 30, {{0, 0}, {5, 0}}, 1.0);
    for (int k : {1, 3, 10}) {
      const Graph g = knn_graph(c, k);
      CHECK(g.min_degree() >= k);
    }
  }
  SUBCASE("errors") {
    Eigen::MatrixXd c(3, 1);
    c << 0, 1, 2;
    CHECK_THROWS_AS(knn_graph(c, 3), InvalidArgument);
    CHECK_THROWS_AS(knn_graph(c, 0), InvalidArgument);
  }
}

TEST_CASE("ingest pipeline") {
  std::mt19937_64 rng(4);
  PointSet ps;
  ps.points = blobs(rng, 50, {{0, 0}, {10, 10}}, 1.0);
  for (int i = 0; i < 100; ++i) ps.labels.push_back(i < 50 ? "pos" : "neg");
  const IngestResult res = ingest(ps, 10, 3, "pos", 1);
  CHECK(res.graph.num_nodes() == 10);
  CHECK(res.rewards.size() == 10);
  CHECK(res.rewards.minCoeff() >= 0.0);
  CHECK(res.rewards.maxCoeff() <= 1.0);
  // Well separated blobs: every cluster is pure.
  for (int c = 0; c < 10; ++c) CHECK((res.rewards[c] == 0.0 || res.rewards[c] == 1.0));
}
