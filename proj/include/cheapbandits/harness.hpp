#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cheapbandits/environment.hpp"
#include "cheapbandits/graph.hpp"
#include "cheapbandits/policies.hpp"
#include "cheapbandits/probes.hpp"

namespace cheapbandits {

enum class GraphModel { ER, BA, SBM, File };

struct GraphSpec {
  GraphModel model = GraphModel::ER;
  int n = 0;
  double p = 0.0;              // ER
  int m = 0;                   // BA
  std::vector<int> blocks;     // SBM
  double p_in = 0.0;
  double p_out = 0.0;
  std::optional<Graph> fixed;  // File
};

struct RewardSpec {
  int k = 1;
  std::optional<double> c;                    // nullopt: use the realized norm
  std::optional<Eigen::VectorXd> node_values; // fixed rewards instead of synthesis
};

struct ExperimentConfig {
  GraphSpec graph;
  RewardSpec reward;
  double R = 0.01;
  double lambda = 0.01;
  double delta = 0.001;
  int T = 100;
  std::vector<PolicyKind> policies{PolicyKind::CheapUCB, PolicyKind::SpectralUCB,
                                   PolicyKind::LinUCB};
  int runs = 1;
  std::uint64_t base_seed = 0;
  CostModel cost_model = CostModel::Width;
  int threads = 0;  // 0: hardware concurrency

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Seed of run i.
  std::uint64_t run_seed(int i) const { return base_seed + static_cast<std::uint64_t>(i); }
};

/// Everything shared read-only by the policies of one run.
struct Instance {
  Graph graph;
  ShiftedSpectrum spectrum;
  RewardField reward;
  std::vector<Probe> universe;
  Probe best;
  double best_value = 0.0;
};

Graph make_graph(const GraphSpec& spec, std::uint64_t seed);
Instance make_instance(const ExperimentConfig& cfg, std::uint64_t run_seed);
/// Instance around an existing graph, its shifted spectrum and a reward field.
Instance assemble_instance(Graph g, ShiftedSpectrum s, RewardField rf);

struct StepRecord {
  int t = 0;
  NodeId anchor = 0;
  int width = 1;
  double reward = 0.0;  // observed
  double regret = 0.0;  // instantaneous
  double cost = 0.0;    // instantaneous
  double regret_cum = 0.0;
  double cost_cum = 0.0;
};

struct RidgeDigest {
  int updates = 0;
  double log_det_ratio = 0.0;  // log det V_{T+1} / det Lambda
  double alpha_hat_norm = 0.0;
};

struct Trajectory {
  PolicyKind policy = PolicyKind::CheapUCB;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  RidgeDigest digest;
  int effective_dim = 1;
  double beta = 0.0;
  /// max over t of ||sum_i x_i eps_i||_{V_t^{-1}}.
  double self_normalized_max = 0.0;
  StagePlan plan;

  int horizon() const { return static_cast<int>(steps.size()); }
  double final_regret() const { return steps.empty() ? 0.0 : steps.back().regret_cum; }
  double final_cost() const { return steps.empty() ? 0.0 : steps.back().cost_cum; }
};

/// T rounds of select, observe, charge, update. Deterministic in
/// (cfg, instance, policy, seed); noise comes from the seed's noise stream.
/// Throws InvariantBreach if regret goes negative or the ledger stalls.
Trajectory run_trajectory(const ExperimentConfig& cfg, const Instance& inst, PolicyKind policy,
                          std::uint64_t seed);

struct SummaryRow {
  std::string policy;
  int t = 0;
  double regret_mean = 0.0;
  double regret_se = 0.0;
  double cost_mean = 0.0;
  double cost_se = 0.0;
};

/// Per-policy, per-step mean and standard error (sample sd / sqrt(n)) of the
/// cumulative regret and cost. Policies keep their order of first appearance.
std::vector<SummaryRow> aggregate(const std::vector<Trajectory>& trajectories);

struct NeighborhoodResidual {
  int width = 1;
  double gap = 0.0;    // |F(s_*) - F(s_*^w)|
  double bound = 0.0;  // c' sqrt(T) w / lambda_{d+1}
  bool holds = true;
};

struct VerificationReport {
  PolicyKind policy = PolicyKind::CheapUCB;
  std::uint64_t seed = 0;
  double log_det_lhs = 0.0;
  double log_det_rhs = 0.0;
  bool log_det_ok = true;
  bool cost_bound_applicable = false;
  double cost_total = 0.0;
  double cost_bound = 0.0;  // 3T/4 - 1/2
  bool cost_bound_ok = true;
  double self_normalized_max = 0.0;
  double self_normalized_bound = 0.0;  // beta - c
  std::vector<NeighborhoodResidual> neighborhood;

  /// Fatal checks only; neighborhood residuals and the self-normalized bound are
  /// informational.
  bool ok() const { return log_det_ok && (!cost_bound_applicable || cost_bound_ok); }
};

VerificationReport verify_trajectory(const Trajectory& traj, const Instance& inst,
                                     const ExperimentConfig& cfg);

struct RunInfo {
  std::uint64_t seed = 0;
  int min_degree = 0;
  int effective_dim = 1;
  Eigen::VectorXd leading_eigenvalues;  // first (up to) 8 shifted eigenvalues
};

struct ExperimentResult {
  std::vector<Trajectory> trajectories;  // policy-major, seed-minor
  std::vector<VerificationReport> reports;
  std::vector<RunInfo> runs;
};

/// All runs for all policies, fanned over worker threads. Output order does
/// not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories);
/// Rebuilds trajectories (steps only) from the CSV; rows of one (policy, seed)
/// must be contiguous and in step order.
std::vector<Trajectory> read_trajectories_csv(std::istream& is);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace cheapbandits
