#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cheapbandits/graph.hpp"
#include "cheapbandits/probes.hpp"
#include "cheapbandits/seeding.hpp"

namespace cheapbandits {

/// Ground truth of one bandit instance: f = Q alpha*, ||alpha*||_Lambda <= c.
struct RewardField {
  Eigen::VectorXd alpha_star;
  Eigen::VectorXd f;
  double c = 0.0;        // smoothness budget
  double noise_R = 0.0;  // observation noise standard deviation
};

/// Sparse alpha* on the k lowest-frequency modes with uniform (0,1] magnitudes
/// and random signs, scaled so that max|f| = 1. If the scaled field still
/// exceeds `budget` in Lambda-norm it is shrunk onto the budget (and max|f|
/// drops below 1). With no budget, c is set to the realized norm.
RewardField synthesize_smooth_reward(const ShiftedSpectrum& s, int k,
                                     std::optional<double> budget, double noise_R,
                                     std::uint64_t seed);

/// Field with the given node rewards; alpha* = Q' f and c = ||alpha*||_Lambda.
RewardField reward_from_node_values(const ShiftedSpectrum& s, Eigen::VectorXd f, double noise_R);

/// sqrt(sum_i (lambda_i + shift) alpha_i^2).
double smoothness_norm(const Eigen::VectorXd& alpha, const ShiftedSpectrum& s);

/// Mean of f over the probe support (= s~' alpha*).
double probe_reward(const RewardField& rf, const Probe& p);

/// probe_reward plus N(0, R^2) noise drawn from `rng`.
double observe(const RewardField& rf, const Probe& p, Rng& rng);

/// Every feasible probe: widths 1..degree+1 at each anchor, ordered by
/// (width, anchor). `max_width` limits the widths enumerated.
std::vector<Probe> arm_universe(const Graph& g, std::optional<int> max_width = std::nullopt);

/// Exhaustive argmax of probe_reward; ties within 1e-12 go to the smaller
/// (width, anchor).
Probe best_probe(const RewardField& rf, const std::vector<Probe>& universe);

struct LocalSmoothness {
  double gap = 0.0;      // max_i |f(i) - mean_{j in N_i} f(j)|
  double c_prime = 0.0;  // 56 kappa sqrt(2 kappa) c
};

/// Throws InvalidArgument if any node is isolated.
LocalSmoothness local_smoothness_gap(const RewardField& rf, const Graph& g);

/// c' d / lambda_{d+1} with lambda_{d+1} the shifted eigenvalue at 1-based
/// index d+1; +inf when d = N.
double local_smoothness_bound(double c_prime, int d, const ShiftedSpectrum& s);

/// `node,f` rows.
void write_reward_csv(std::ostream& os, const Eigen::VectorXd& f);
Eigen::VectorXd read_reward_csv(std::istream& is);
/// `mode,alpha` rows.
void write_alpha_csv(std::ostream& os, const Eigen::VectorXd& alpha);

}  // namespace cheapbandits
