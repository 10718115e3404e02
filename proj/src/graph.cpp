#include "cheapbandits/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"
#include "cheapbandits/seeding.hpp"

namespace cheapbandits {

Graph Graph::from_edge_list(int num_nodes, std::span<const Edge> edges) {
  if (num_nodes < 1) throw InvalidArgument("graph needs at least one node");
  Graph g;
  g.num_nodes_ = num_nodes;
  g.edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes)
      throw InvalidArgument(fmt::format("edge ({}, {}) out of range for N={}", e.u, e.v, num_nodes));
    if (e.u == e.v) throw InvalidArgument(fmt::format("self-loop at node {}", e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidArgument(fmt::format("edge ({}, {}) has non-positive weight", e.u, e.v));
    g.edges_.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t k = 1; k < g.edges_.size(); ++k) {
    if (g.edges_[k].u == g.edges_[k - 1].u && g.edges_[k].v == g.edges_[k - 1].v)
      throw InvalidArgument(
          fmt::format("duplicate edge ({}, {})", g.edges_[k].u, g.edges_[k].v));
  }

  g.adjacency_.assign(num_nodes, {});
  for (const Edge& e : g.edges_) {
    g.adjacency_[e.u].push_back({e.v, e.weight});
    g.adjacency_[e.v].push_back({e.u, e.weight});
  }
  for (auto& nbrs : g.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  g.kappa_ = 0;
  g.min_degree_ = g.degree(0);
  for (NodeId i = 0; i < num_nodes; ++i) {
    g.kappa_ = std::max(g.kappa_, g.degree(i));
    g.min_degree_ = std::min(g.min_degree_, g.degree(i));
  }
  return g;
}

Eigen::MatrixXd Graph::laplacian() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(num_nodes_, num_nodes_);
  for (const Edge& e : edges_) {
    L(e.u, e.v) -= e.weight;
    L(e.v, e.u) -= e.weight;
    L(e.u, e.u) += e.weight;
    L(e.v, e.v) += e.weight;
  }
  return L;
}

ShiftedSpectrum::ShiftedSpectrum(Spectrum s, double shift_) : base(std::move(s)), shift(shift_) {
  if (!(shift > 0.0)) throw InvalidArgument("regularizer shift must be positive");
  for (int i = 0; i < base.size(); ++i) {
    if (!(eigenvalue(i) > 0.0))
      throw InvalidArgument(fmt::format("shifted eigenvalue {} is not positive", i));
  }
}

Spectrum spectral_decomposition(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.laplacian());
  if (solver.info() != Eigen::Success)
    throw NumericFailure("Laplacian eigensolver did not converge");
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  for (int c = 0; c < s.Q.cols(); ++c) {
    for (int r = 0; r < s.Q.rows(); ++r) {
      if (std::abs(s.Q(r, c)) > 1e-10) {
        if (s.Q(r, c) < 0.0) s.Q.col(c) *= -1.0;
        break;
      }
    }
  }
  return s;
}

Spectrum identity_spectrum(int n) {
  return Spectrum{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
}

int zero_eigenvalue_multiplicity(const Spectrum& s, double tol) {
  return static_cast<int>((s.eigenvalues.array().abs() <= tol).count());
}

int connected_components(const Graph& g) {
  std::vector<int> parent(g.num_nodes());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = g.num_nodes();
  for (const Edge& e : g.edges()) {
    int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

int effective_dimension(const ShiftedSpectrum& s, int horizon) {
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  const double threshold = horizon / std::log(1.0 + horizon / s.shift);
  int d = 1;
  for (int k = 2; k <= s.size(); ++k) {
    if ((k - 1) * s.eigenvalue(k - 1) <= threshold) d = k;
  }
  return d;
}

namespace {

// Uniform on (0, 1].
double positive_unit(Rng& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(fmt::format("{} must lie in [0, 1]", name));
}

}  // namespace

Graph generate_er(int n, double p, std::uint64_t seed) {
  check_probability(p, "p");
  Rng rng{seed};
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({i, j, positive_unit(rng)});
    }
  }
  return Graph::from_edge_list(n, edges);
}

Graph generate_ba(int n, int m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw InvalidArgument("BA requires 1 <= m < n");
  Rng rng{seed};
  std::vector<Edge> edges;
  // Each node appears once per incident edge, so a uniform draw from this
  // list is degree-proportional.
  std::vector<NodeId> endpoints;
  for (NodeId i = 0; i <= m; ++i) {
    for (NodeId j = i + 1; j <= m; ++j) {
      edges.push_back({i, j, positive_unit(rng)});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId v = m + 1; v < n; ++v) {
    targets.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (static_cast<int>(targets.size()) < m) {
      NodeId t = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.push_back({t, v, positive_unit(rng)});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edge_list(n, edges);
}

Graph generate_sbm(std::span<const int> block_sizes, double p_in, double p_out,
                   std::uint64_t seed) {
  check_probability(p_in, "p_in");
  check_probability(p_out, "p_out");
  std::vector<int> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (block_sizes[b] < 1) throw InvalidArgument("SBM block sizes must be positive");
    block_of.insert(block_of.end(), block_sizes[b], static_cast<int>(b));
  }
  const int n = static_cast<int>(block_of.size());
  Rng rng{seed};
  std::bernoulli_distribution intra(p_in), inter(p_out);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      bool linked = block_of[i] == block_of[j] ? intra(rng) : inter(rng);
      if (linked) edges.push_back({i, j, 1.0});
    }
  }
  return Graph::from_edge_list(n, edges);
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) os << fmt::format("{} {} {}\n", e.u, e.v, e.weight);
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    if (n < 0) {
      if (!(fields >> n) || n < 1)
        throw InvalidArgument(fmt::format("edge list line {}: bad node count", line_no));
      continue;
    }
    Edge e;
    if (!(fields >> e.u >> e.v >> e.weight))
      throw InvalidArgument(fmt::format("edge list line {}: expected `i j w`", line_no));
    edges.push_back(e);
  }
  if (n < 0) throw InvalidArgument("edge list is empty");
  return Graph::from_edge_list(n, edges);
}

}  // namespace cheapbandits
