#include "cheapbandits/environment.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"

namespace cheapbandits {

RewardField synthesize_smooth_reward(const ShiftedSpectrum& s, int k,
                                     std::optional<double> budget, double noise_R,
                                     std::uint64_t seed) {
  const int n = s.size();
  if (k < 1 || k > n) throw InvalidArgument(fmt::format("sparsity k={} outside [1, {}]", k, n));
  if (budget && !(*budget > 0.0)) throw InvalidArgument("smoothness budget c must be positive");
  if (noise_R < 0.0) throw InvalidArgument("noise scale R must be non-negative");

  Rng rng{seed};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  RewardField rf;
  rf.noise_R = noise_R;
  rf.alpha_star = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) {
    const double magnitude = 1.0 - unit(rng);
    rf.alpha_star[i] = sign(rng) ? magnitude : -magnitude;
  }
  rf.f = s.base.Q * rf.alpha_star;
  rf.alpha_star /= rf.f.cwiseAbs().maxCoeff();

  const double norm = smoothness_norm(rf.alpha_star, s);
  if (budget && norm > *budget) rf.alpha_star *= *budget / norm;
  rf.f = s.base.Q * rf.alpha_star;
  rf.c = budget ? *budget : smoothness_norm(rf.alpha_star, s);
  return rf;
}

RewardField reward_from_node_values(const ShiftedSpectrum& s, Eigen::VectorXd f, double noise_R) {
  if (f.size() != s.size())
    throw InvalidArgument(fmt::format("{} rewards for {} nodes", f.size(), s.size()));
  RewardField rf;
  rf.alpha_star = s.base.Q.transpose() * f;
  rf.f = std::move(f);
  rf.c = smoothness_norm(rf.alpha_star, s);
  rf.noise_R = noise_R;
  return rf;
}

double smoothness_norm(const Eigen::VectorXd& alpha, const ShiftedSpectrum& s) {
  return std::sqrt((s.eigenvalues().array() * alpha.array().square()).sum());
}

double probe_reward(const RewardField& rf, const Probe& p) {
  double total = 0.0;
  for (NodeId i : p.support) total += rf.f[i];
  return total / p.width();
}

double observe(const RewardField& rf, const Probe& p, Rng& rng) {
  const double noise = std::normal_distribution<double>(0.0, 1.0)(rng);
  return probe_reward(rf, p) + rf.noise_R * noise;
}

std::vector<Probe> arm_universe(const Graph& g, std::optional<int> max_width) {
  std::vector<Probe> arms;
  const int widest = max_width.value_or(g.kappa() + 1);
  for (int w = 1; w <= widest; ++w) {
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      if (w <= g.degree(i) + 1) arms.push_back(build_probe(g, i, w));
    }
  }
  return arms;
}

Probe best_probe(const RewardField& rf, const std::vector<Probe>& universe) {
  if (universe.empty()) throw InvalidArgument("empty arm universe");
  constexpr double kTie = 1e-12;
  const Probe* best = &universe.front();
  double best_value = probe_reward(rf, *best);
  for (const Probe& p : universe) {
    const double value = probe_reward(rf, p);
    const bool better = value > best_value + kTie;
    const bool tied_but_smaller =
        std::abs(value - best_value) <= kTie &&
        std::pair(p.width(), p.anchor) < std::pair(best->width(), best->anchor);
    if (better) {
      best = &p;
      best_value = value;
    } else if (tied_but_smaller) {
      best = &p;
    }
  }
  return *best;
}

LocalSmoothness local_smoothness_gap(const RewardField& rf, const Graph& g) {
  LocalSmoothness out;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto& nbrs = g.neighbors(i);
    if (nbrs.empty()) throw InvalidArgument(fmt::format("node {} is isolated", i));
    double mean = 0.0;
    for (const Neighbor& nb : nbrs) mean += rf.f[nb.node];
    mean /= static_cast<double>(nbrs.size());
    out.gap = std::max(out.gap, std::abs(rf.f[i] - mean));
  }
  const double kappa = g.kappa();
  out.c_prime = 56.0 * kappa * std::sqrt(2.0 * kappa) * rf.c;
  return out;
}

double local_smoothness_bound(double c_prime, int d, const ShiftedSpectrum& s) {
  if (d >= s.size()) return std::numeric_limits<double>::infinity();
  return c_prime * d / s.eigenvalue(d);
}

void write_reward_csv(std::ostream& os, const Eigen::VectorXd& f) {
  os << "node,f\n";
  for (Eigen::Index i = 0; i < f.size(); ++i) os << fmt::format("{},{}\n", i, f[i]);
}

Eigen::VectorXd read_reward_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("node,f", 0) != 0)
    throw InvalidArgument("reward CSV must start with header `node,f`");
  std::vector<double> values;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InvalidArgument(fmt::format("reward CSV row {}: expected `node,f`", row));
    const int node = std::stoi(line.substr(0, comma));
    if (node != static_cast<int>(values.size()))
      throw InvalidArgument(fmt::format("reward CSV row {}: nodes must be listed in order", row));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_alpha_csv(std::ostream& os, const Eigen::VectorXd& alpha) {
  os << "mode,alpha\n";
  for (Eigen::Index i = 0; i < alpha.size(); ++i) os << fmt::format("{},{}\n", i, alpha[i]);
}

}  // namespace cheapbandits
