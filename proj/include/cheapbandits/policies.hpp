#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cheapbandits/graph.hpp"
#include "cheapbandits/probes.hpp"

namespace cheapbandits {

/// beta = 2R sqrt(d log(1 + T/lambda) + 2 log(1/delta)) + c, natural log.
double confidence_width(double R, int d, int horizon, double lambda, double delta, double c);

/// Rank-one change applied by RidgeState::update: V_inv -= u u' / denom.
struct RankOneUpdate {
  Eigen::VectorXd u;  // V_inv (before) * x
  double denom = 1.0; // 1 + x' V_inv x
};

/// l2-regularized least squares in the spectral basis.
///
///   V = Lambda + sum x_i x_i',  S = sum r_i x_i,  alpha_hat = V^{-1} S.
///
/// The inverse is carried by Sherman-Morrison updates; every 64 updates it is
/// checked against V by direct multiplication (max |V V_inv - I| <= 1e-6).
class RidgeState {
 public:
  RidgeState() = default;
  /// V = Lambda, V_inv = Lambda^{-1}, S = alpha_hat = 0.
  explicit RidgeState(const ShiftedSpectrum& s);
  /// Diagonal regularizer given directly; entries must be positive.
  explicit RidgeState(const Eigen::VectorXd& regularizer);

  RankOneUpdate update(const GftVector& x, double reward);

  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::MatrixXd& V_inv() const { return V_inv_; }
  const Eigen::VectorXd& S() const { return S_; }
  const Eigen::VectorXd& alpha_hat() const { return alpha_hat_; }
  int steps() const { return steps_; }
  int dimension() const { return static_cast<int>(S_.size()); }

  /// max |V * V_inv - I|.
  double inverse_residual() const;
  /// log det V - log det Lambda.
  double log_det_ratio() const;

 private:
  Eigen::VectorXd regularizer_;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd V_inv_;
  Eigen::VectorXd S_;
  Eigen::VectorXd alpha_hat_;
  int steps_ = 0;
};

inline RidgeState init_estimator(const ShiftedSpectrum& s) { return RidgeState{s}; }

inline RidgeState update_estimator(RidgeState st, const GftVector& x, double reward) {
  st.update(x, reward);
  return st;
}

/// x' alpha_hat + beta ||x||_{V^{-1}}.
double ucb_score(const RidgeState& st, const GftVector& x, double beta);

struct Stage {
  int first = 1;  // 1-based, inclusive
  int last = 1;
  int width = 1;
};

/// Doubling partition of [1, T]: stage j covers [2^{j-1}, min(2^j - 1, T)].
struct StagePlan {
  int J = 1;
  std::vector<Stage> stages;

  /// Probe width at 1-based step t.
  int width_at(int t) const;
  int max_width() const;
};

/// J = ceil(log2(T + 1)) stages; stage j uses width min(J - j + 1, min_degree + 1).
StagePlan stage_schedule(int horizon, int min_degree);

enum class PolicyKind { CheapUCB, SpectralUCB, LinUCB, Oracle };

PolicyKind parse_policy(std::string_view name);
std::string_view to_string(PolicyKind k);

/// Ties within this relative margin resolve to the earlier candidate.
inline constexpr double kScoreTie = 1e-12;

/// Row index of the highest UCB score among the candidate GFT rows.
/// Candidates are ordered by anchor, so ties go to the lowest anchor.
int select_action(const RidgeState& st, const Eigen::MatrixXd& candidate_gfts, double beta);

/// Keeps x' alpha_hat and x' V^{-1} x for a fixed candidate set up to date
/// in O(N^2) per observation, using the rank-one form of the inverse update.
class ArmScorer {
 public:
  ArmScorer(Eigen::MatrixXd candidate_gfts, const RidgeState& st);

  /// Recompute everything from `st` (O(N^3)).
  void refresh(const RidgeState& st);
  /// Incorporate the update just applied to `st`.
  void apply(const RankOneUpdate& upd, const RidgeState& st);

  Eigen::VectorXd scores(double beta) const;
  int select(double beta) const;

  const Eigen::MatrixXd& candidates() const { return gfts_; }

 private:
  Eigen::MatrixXd gfts_;
  Eigen::VectorXd means_;
  Eigen::VectorXd quad_;
};

}  // namespace cheapbandits
