#include "cheapbandits/probes.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"

namespace cheapbandits {

Eigen::VectorXd Probe::signal(int n) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  const double weight = 1.0 / width();
  for (NodeId i : support) s[i] = weight;
  return s;
}

Probe build_probe(const Graph& g, NodeId anchor, int width) {
  if (anchor < 0 || anchor >= g.num_nodes())
    throw InvalidArgument(fmt::format("anchor {} out of range", anchor));
  if (width < 1 || width > g.degree(anchor) + 1)
    throw InvalidArgument(fmt::format("width {} infeasible at node {} (degree {})", width,
                                      anchor, g.degree(anchor)));
  std::vector<Neighbor> ranked = g.neighbors(anchor);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.weight > b.weight; });
  Probe p{anchor, {anchor}};
  for (int k = 0; k < width - 1; ++k) p.support.push_back(ranked[k].node);
  std::sort(p.support.begin(), p.support.end());
  return p;
}

std::vector<Probe> probe_set(const Graph& g, int width) {
  std::vector<Probe> probes;
  probes.reserve(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) probes.push_back(build_probe(g, i, width));
  return probes;
}

GftVector gft(const Spectrum& s, const Probe& p) {
  GftVector out = GftVector::Zero(s.size());
  for (NodeId i : p.support) out += s.Q.row(i).transpose();
  return out / p.width();
}

Eigen::MatrixXd gft_matrix(const Spectrum& s, const std::vector<Probe>& probes) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(probes.size()), s.size());
  for (std::size_t k = 0; k < probes.size(); ++k) rows.row(k) = gft(s, probes[k]).transpose();
  return rows;
}

double cost_closed_form(int width, int num_nodes) {
  if (width < 1 || width > num_nodes)
    throw InvalidArgument(fmt::format("width {} outside [1, {}]", width, num_nodes));
  const double w = width;
  return (w - 1.0) / (w * w) * (1.0 - 1.0 / num_nodes) + 1.0 / (w * w);
}

double cost_edge_sum(const Graph& g, const Probe& p) {
  const Eigen::VectorXd s = p.signal(g.num_nodes());
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double diff = s[e.u] - s[e.v];
    total += e.weight * diff * diff;
  }
  return total;
}

double cost_quadratic_form(const Eigen::MatrixXd& laplacian, const Probe& p) {
  const Eigen::VectorXd s = p.signal(static_cast<int>(laplacian.rows()));
  return s.dot(laplacian * s);
}

double cost_spectral(const Spectrum& s, const GftVector& s_tilde) {
  return (s.eigenvalues.array() * s_tilde.array().square()).sum();
}

CostModel parse_cost_model(std::string_view name) {
  if (name == "width") return CostModel::Width;
  if (name == "quadratic") return CostModel::Quadratic;
  throw InvalidArgument(fmt::format("unknown cost model '{}' (expected width|quadratic)", name));
}

std::string_view to_string(CostModel m) {
  return m == CostModel::Width ? "width" : "quadratic";
}

double probe_cost(CostModel model, const Graph& g, const Probe& p) {
  switch (model) {
    case CostModel::Width:
      return cost_closed_form(p.width(), g.num_nodes());
    case CostModel::Quadratic:
      return cost_quadratic(g, p);
  }
  return 0.0;
}

std::string format_probe(const Probe& p) { return fmt::format("{}:{}", p.anchor, p.width()); }

}  // namespace cheapbandits
