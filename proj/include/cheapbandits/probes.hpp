#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cheapbandits/graph.hpp"

namespace cheapbandits {

/// Uniform-weight signal over an anchor node and w-1 of its neighbors.
/// Each support node carries weight 1/w.
struct Probe {
  NodeId anchor = 0;
  std::vector<NodeId> support;  // ascending, contains anchor

  int width() const { return static_cast<int>(support.size()); }
  /// Dense signal s in R^n.
  Eigen::VectorXd signal(int n) const;

  friend bool operator==(const Probe&, const Probe&) = default;
};

/// GFT coefficients of a probe.
using GftVector = Eigen::VectorXd;

/// Anchor plus its w-1 heaviest incident neighbors (ties: lower index first).
/// Throws InvalidArgument if w < 1 or w > degree(anchor) + 1.
Probe build_probe(const Graph& g, NodeId anchor, int width);

/// One probe of width w per node, in node order.
std::vector<Probe> probe_set(const Graph& g, int width);

/// Q' s, computed as the mean of Q's rows over the support.
GftVector gft(const Spectrum& s, const Probe& p);

/// Rows are the GFTs of `probes`.
Eigen::MatrixXd gft_matrix(const Spectrum& s, const std::vector<Probe>& probes);

/// Width-only cost (w-1)/w^2 (1 - 1/N) + 1/w^2.
double cost_closed_form(int width, int num_nodes);

/// sum over edges of w_ij (s_i - s_j)^2.
double cost_edge_sum(const Graph& g, const Probe& p);
/// s' L s.
double cost_quadratic_form(const Eigen::MatrixXd& laplacian, const Probe& p);
/// sum_i lambda_i s~_i^2 over the unshifted spectrum.
double cost_spectral(const Spectrum& s, const GftVector& s_tilde);

/// Laplacian quadratic-form cost, evaluated as the edge sum.
inline double cost_quadratic(const Graph& g, const Probe& p) { return cost_edge_sum(g, p); }

enum class CostModel { Width, Quadratic };

CostModel parse_cost_model(std::string_view name);
std::string_view to_string(CostModel m);

/// Ledger charge of a probe under `model`.
double probe_cost(CostModel model, const Graph& g, const Probe& p);

/// `anchor:width`.
std::string format_probe(const Probe& p);

}  // namespace cheapbandits
