#include "cheapbandits/policies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"

namespace cheapbandits {

double confidence_width(double R, int d, int horizon, double lambda, double delta, double c) {
  if (R < 0.0 || d < 1 || horizon < 1 || !(lambda > 0.0) || !(c >= 0.0))
    throw InvalidArgument("confidence_width: parameters must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("confidence_width: delta outside (0, 1)");
  return 2.0 * R *
             std::sqrt(d * std::log(1.0 + horizon / lambda) + 2.0 * std::log(1.0 / delta)) +
         c;
}

RidgeState::RidgeState(const ShiftedSpectrum& s) : RidgeState(s.eigenvalues()) {}

RidgeState::RidgeState(const Eigen::VectorXd& regularizer) : regularizer_(regularizer) {
  if ((regularizer.array() <= 0.0).any())
    throw InvalidArgument("regularizer must be positive definite");
  V_ = regularizer.asDiagonal();
  V_inv_ = regularizer.cwiseInverse().asDiagonal();
  S_ = Eigen::VectorXd::Zero(regularizer.size());
  alpha_hat_ = Eigen::VectorXd::Zero(regularizer.size());
}

RankOneUpdate RidgeState::update(const GftVector& x, double reward) {
  if (x.size() != S_.size())
    throw InvalidArgument(fmt::format("feature size {} != {}", x.size(), S_.size()));
  RankOneUpdate upd;
  upd.u = V_inv_ * x;
  upd.denom = 1.0 + x.dot(upd.u);
  if (!(upd.denom > 0.0) || !std::isfinite(upd.denom))
    throw NumericFailure("rank-one update denominator is not positive");

  V_.noalias() += x * x.transpose();
  S_ += reward * x;
  V_inv_.noalias() -= (upd.u / upd.denom) * upd.u.transpose();
  alpha_hat_.noalias() = V_inv_ * S_;
  ++steps_;

  if (steps_ % 64 == 0) {
    if (const double res = inverse_residual(); !(res <= 1e-6))
      throw InvariantBreach(fmt::format("V * V_inv deviates from I by {} after {} updates", res,
                                        steps_));
  }
  return upd;
}

double RidgeState::inverse_residual() const {
  const auto n = V_.rows();
  return (V_ * V_inv_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double RidgeState::log_det_ratio() const {
  Eigen::LLT<Eigen::MatrixXd> llt(V_);
  if (llt.info() != Eigen::Success) throw NumericFailure("design matrix is not positive definite");
  const double log_det_v = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return log_det_v - regularizer_.array().log().sum();
}

double ucb_score(const RidgeState& st, const GftVector& x, double beta) {
  if (beta < 0.0) throw InvalidArgument("beta must be non-negative");
  return x.dot(st.alpha_hat()) + beta * std::sqrt(x.dot(st.V_inv() * x));
}

int StagePlan::width_at(int t) const {
  for (const Stage& s : stages) {
    if (t >= s.first && t <= s.last) return s.width;
  }
  throw InvalidArgument(fmt::format("step {} outside the stage plan", t));
}

int StagePlan::max_width() const {
  int w = 1;
  for (const Stage& s : stages) w = std::max(w, s.width);
  return w;
}

StagePlan stage_schedule(int horizon, int min_degree) {
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  StagePlan plan;
  plan.J = std::bit_width(static_cast<unsigned>(horizon));
  const int cap = std::max(min_degree, 0) + 1;
  for (int j = 1; j <= plan.J; ++j) {
    const int first = 1 << (j - 1);
    const int last = std::min((1 << j) - 1, horizon);
    plan.stages.push_back({first, last, std::min(plan.J - j + 1, cap)});
  }
  return plan;
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "CheapUCB") return PolicyKind::CheapUCB;
  if (name == "SpectralUCB") return PolicyKind::SpectralUCB;
  if (name == "LinUCB") return PolicyKind::LinUCB;
  if (name == "Oracle") return PolicyKind::Oracle;
  throw InvalidArgument(
      fmt::format("unknown policy '{}' (expected CheapUCB|SpectralUCB|LinUCB|Oracle)", name));
}

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::CheapUCB:
      return "CheapUCB";
    case PolicyKind::SpectralUCB:
      return "SpectralUCB";
    case PolicyKind::LinUCB:
      return "LinUCB";
    case PolicyKind::Oracle:
      return "Oracle";
  }
  return "?";
}

namespace {

int argmax_with_ties(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int i = 1; i < scores.size(); ++i) {
    const double margin = kScoreTie * std::max(1.0, std::abs(scores[best]));
    if (scores[i] > scores[best] + margin) best = i;
  }
  return best;
}

}  // namespace

int select_action(const RidgeState& st, const Eigen::MatrixXd& candidate_gfts, double beta) {
  if (candidate_gfts.rows() == 0) throw InvalidArgument("no candidate probes");
  Eigen::VectorXd scores(candidate_gfts.rows());
  for (Eigen::Index i = 0; i < candidate_gfts.rows(); ++i)
    scores[i] = ucb_score(st, candidate_gfts.row(i).transpose(), beta);
  return argmax_with_ties(scores);
}

ArmScorer::ArmScorer(Eigen::MatrixXd candidate_gfts, const RidgeState& st)
    : gfts_(std::move(candidate_gfts)) {
  if (gfts_.rows() == 0) throw InvalidArgument("no candidate probes");
  refresh(st);
}

void ArmScorer::refresh(const RidgeState& st) {
  means_.noalias() = gfts_ * st.alpha_hat();
  const Eigen::MatrixXd projected = gfts_ * st.V_inv();
  quad_ = projected.cwiseProduct(gfts_).rowwise().sum();
}

void ArmScorer::apply(const RankOneUpdate& upd, const RidgeState& st) {
  const Eigen::VectorXd proj = gfts_ * upd.u;
  quad_ -= proj.cwiseAbs2() / upd.denom;
  means_.noalias() = gfts_ * st.alpha_hat();
}

Eigen::VectorXd ArmScorer::scores(double beta) const {
  if (beta < 0.0) throw InvalidArgument("beta must be non-negative");
  return means_ + beta * quad_.cwiseMax(0.0).cwiseSqrt();
}

int ArmScorer::select(double beta) const { return argmax_with_ties(scores(beta)); }

}  // namespace cheapbandits
