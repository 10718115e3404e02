#include "cheapbandits/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"
#include "cheapbandits/seeding.hpp"

namespace cheapbandits {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

PointSet read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("points CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "label")
    throw InvalidArgument("points CSV header must be `f1,...,fF,label`");
  const std::size_t dim = header.size() - 1;

  std::vector<double> values;
  PointSet ps;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != dim + 1)
      throw InvalidArgument(
          fmt::format("points CSV row {}: expected {} fields, got {}", row, dim + 1, fields.size()));
    for (std::size_t j = 0; j < dim; ++j) {
      try {
        values.push_back(std::stod(fields[j]));
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("points CSV row {}: bad number '{}'", row, fields[j]));
      }
    }
    ps.labels.push_back(fields[dim]);
  }
  const auto m = static_cast<Eigen::Index>(ps.labels.size());
  ps.points = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), m, static_cast<Eigen::Index>(dim));
  return ps;
}

void write_points_csv(std::ostream& os, const PointSet& ps) {
  for (int j = 0; j < ps.dimension(); ++j) os << 'f' << j + 1 << ',';
  os << "label\n";
  for (int i = 0; i < ps.size(); ++i) {
    for (int j = 0; j < ps.dimension(); ++j) os << fmt::format("{},", ps.points(i, j));
    os << ps.labels[i] << '\n';
  }
}

Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd out = points;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double lo = points.col(j).minCoeff();
    const double span = points.col(j).maxCoeff() - lo;
    if (span > 0.0)
      out.col(j) = (points.col(j).array() - lo) / span;
    else
      out.col(j).setZero();
  }
  return out;
}

namespace {

// Squared distance from every point to its nearest center; fills `assignment`.
double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
              std::vector<int>& assignment, std::vector<double>& dist2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assignment[i] = best;
    dist2[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

}  // namespace

Clustering cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  const auto m = static_cast<int>(points.rows());
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k > m) throw InvalidArgument(fmt::format("k={} exceeds the {} points", k, m));
  Rng rng = make_rng(seed, Stream::Cluster);

  // D^2 seeding.
  Clustering out;
  out.centers.resize(k, points.cols());
  std::vector<bool> taken(m, false);
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  int first = std::uniform_int_distribution<int>(0, m - 1)(rng);
  for (int c = 0; c < k; ++c) {
    int pick = first;
    if (c > 0) {
      const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
      if (total > 0.0) {
        double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        pick = m - 1;
        for (int i = 0; i < m; ++i) {
          if (nearest[i] <= 0.0) continue;
          if (u < nearest[i]) {
            pick = i;
            break;
          }
          u -= nearest[i];
        }
        while (taken[pick]) pick = (pick + m - 1) % m;
      } else {
        pick = static_cast<int>(std::find(taken.begin(), taken.end(), false) - taken.begin());
      }
    }
    taken[pick] = true;
    out.centers.row(c) = points.row(pick);
    for (int i = 0; i < m; ++i)
      nearest[i] = std::min(nearest[i], (points.row(i) - out.centers.row(c)).squaredNorm());
  }

  out.assignment.assign(m, 0);
  std::vector<double> dist2(m, 0.0);
  double inertia = assign(points, out.centers, out.assignment, dist2);
  out.inertia_trace.push_back(inertia);
  std::vector<int> counts(k);
  for (out.iterations = 1; out.iterations <= 100; ++out.iterations) {
    out.centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < m; ++i) {
      out.centers.row(out.assignment[i]) += points.row(i);
      ++counts[out.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        out.centers.row(c) /= counts[c];
        continue;
      }
      const int far = static_cast<int>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
      out.centers.row(c) = points.row(far);
      dist2[far] = 0.0;
    }
    const double next = assign(points, out.centers, out.assignment, dist2);
    out.inertia_trace.push_back(next);
    const double change = std::abs(inertia - next);
    inertia = next;
    if (change <= 1e-6 * std::max(inertia, std::numeric_limits<double>::min())) break;
  }
  out.iterations = std::min(out.iterations, 100);
  return out;
}

std::vector<double> cluster_rewards(const std::vector<int>& assignment,
                                    const std::vector<std::string>& labels,
                                    const std::string& target_label, int k) {
  if (assignment.size() != labels.size())
    throw InvalidArgument("assignment and labels differ in length");
  std::vector<double> hits(k, 0.0), sizes(k, 0.0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int c = assignment[i];
    if (c < 0 || c >= k) throw InvalidArgument(fmt::format("cluster id {} out of range", c));
    sizes[c] += 1.0;
    if (labels[i] == target_label) hits[c] += 1.0;
  }
  std::vector<double> rewards(k, 0.0);
  for (int c = 0; c < k; ++c) rewards[c] = sizes[c] > 0.0 ? hits[c] / sizes[c] : 0.0;
  return rewards;
}

Graph knn_graph(const Eigen::MatrixXd& centers, int k_nn) {
  const auto n = static_cast<int>(centers.rows());
  if (k_nn < 1 || k_nn >= n)
    throw InvalidArgument(fmt::format("k_nn={} must lie in [1, {})", k_nn, n));
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  std::vector<std::pair<double, int>> ranked;
  for (int i = 0; i < n; ++i) {
    ranked.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) ranked.emplace_back((centers.row(i) - centers.row(j)).squaredNorm(), j);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + k_nn, ranked.end());
    for (int r = 0; r < k_nn; ++r) {
      const int j = ranked[r].second;
      linked[std::min(i, j)][std::max(i, j)] = true;
    }
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (linked[i][j]) edges.push_back({i, j, 1.0});
    }
  }
  return Graph::from_edge_list(n, edges);
}

IngestResult ingest(const PointSet& ps, int clusters, int k_nn, const std::string& target_label,
                    std::uint64_t seed) {
  const Eigen::MatrixXd features = normalize_features(ps.points);
  Clustering cl = cluster(features, clusters, seed);
  const auto rewards = cluster_rewards(cl.assignment, ps.labels, target_label, clusters);
  Graph g = knn_graph(cl.centers, k_nn);
  Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(rewards.data(), clusters);
  return {std::move(g), std::move(f), std::move(cl)};
}

}  // namespace cheapbandits
