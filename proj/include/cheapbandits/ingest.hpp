#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cheapbandits/graph.hpp"

namespace cheapbandits {

/// M labeled feature vectors of dimension F (one per row).
struct PointSet {
  Eigen::MatrixXd points;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(points.rows()); }
  int dimension() const { return static_cast<int>(points.cols()); }
};

/// Header `f1,...,fF,label`, one sample per row.
PointSet read_points_csv(std::istream& is);
void write_points_csv(std::ostream& os, const PointSet& ps);

/// Min-max scales every column to [0, 1]; constant columns become 0.
Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& points);

struct Clustering {
  std::vector<int> assignment;
  Eigen::MatrixXd centers;            // k x F
  std::vector<double> inertia_trace;  // after each assignment pass
  int iterations = 0;

  double inertia() const { return inertia_trace.empty() ? 0.0 : inertia_trace.back(); }
};

/// Lloyd's k-means with D^2-weighted seeding. Stops after 100 iterations or
/// when inertia changes by less than 1e-6 relative. A cluster that empties
/// is re-seeded at the point farthest from its center.
Clustering cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

/// Fraction of each cluster's samples carrying `target_label`.
std::vector<double> cluster_rewards(const std::vector<int>& assignment,
                                    const std::vector<std::string>& labels,
                                    const std::string& target_label, int k);

/// Unit-weight union of the directed k-nearest-neighbor relations among the
/// rows of `centers`. Distance ties go to the lower index.
Graph knn_graph(const Eigen::MatrixXd& centers, int k_nn);

struct IngestResult {
  Graph graph;
  Eigen::VectorXd rewards;
  Clustering clustering;
};

/// normalize -> cluster -> per-cluster rewards -> kNN graph over centers.
IngestResult ingest(const PointSet& ps, int clusters, int k_nn, const std::string& target_label,
                    std::uint64_t seed);

}  // namespace cheapbandits
