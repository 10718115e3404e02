#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cheapbandits {

using NodeId = int;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 1.0;
};

/// Weighted undirected simple graph. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Validates and builds a graph. Edges are stored with u < v, sorted.
  /// Throws InvalidArgument on self-loops, duplicates, bad indices or weights.
  static Graph from_edge_list(int num_nodes, std::span<const Edge> edges);

  int num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbors of `i`, ascending by node index.
  const std::vector<Neighbor>& neighbors(NodeId i) const { return adjacency_[i]; }
  int degree(NodeId i) const { return static_cast<int>(adjacency_[i].size()); }
  int kappa() const { return kappa_; }
  int min_degree() const { return min_degree_; }

  /// L = D - W with D the weighted degrees.
  Eigen::MatrixXd laplacian() const;

 private:
  int num_nodes_ = 0;
  int kappa_ = 0;
  int min_degree_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Laplacian eigenpairs: eigenvalues ascending, eigenvectors in the columns of Q.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd Q;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Spectrum with the regularizer shift applied: Lambda = Lambda_L + shift * I.
struct ShiftedSpectrum {
  Spectrum base;
  double shift = 0.0;

  ShiftedSpectrum() = default;
  /// Throws InvalidArgument unless every shifted eigenvalue is positive.
  ShiftedSpectrum(Spectrum s, double shift);

  int size() const { return base.size(); }
  double eigenvalue(int i) const { return base.eigenvalues[i] + shift; }
  Eigen::VectorXd eigenvalues() const {
    return base.eigenvalues.array() + shift;
  }
};

/// Dense symmetric eigendecomposition of the Laplacian. Each eigenvector is
/// oriented so that its first entry with magnitude above 1e-10 is positive.
Spectrum spectral_decomposition(const Graph& g);

/// The identity basis with all-zero eigenvalues (node-basis regularizer).
Spectrum identity_spectrum(int n);

/// Eigenvalues within `tol` of zero.
int zero_eigenvalue_multiplicity(const Spectrum& s, double tol = 1e-8);

/// Connected components by union-find.
int connected_components(const Graph& g);

/// Largest d in [1, N] with (d-1) * lambda_d <= T / log(1 + T / shift),
/// lambda_d the d-th shifted eigenvalue (1-based).
int effective_dimension(const ShiftedSpectrum& s, int horizon);

Graph generate_er(int n, double p, std::uint64_t seed);
Graph generate_ba(int n, int m, std::uint64_t seed);
Graph generate_sbm(std::span<const int> block_sizes, double p_in, double p_out,
                   std::uint64_t seed);

/// Plain-text edge list: first line N, then `i j w` per edge; `#` comments.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace cheapbandits
