#include "cheapbandits/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cheapbandits/error.hpp"
#include "cheapbandits/seeding.hpp"

namespace cheapbandits {

void ExperimentConfig::validate() const {
  if (T < 1) throw InvalidArgument("T must be at least 1");
  if (runs < 1) throw InvalidArgument("runs must be at least 1");
  if (!(R >= 0.0)) throw InvalidArgument("R must be non-negative");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (policies.empty()) throw InvalidArgument("policies must not be empty");
  if (reward.c && !(*reward.c > 0.0)) throw InvalidArgument("c must be positive");
  if (!reward.node_values && reward.k < 1) throw InvalidArgument("k must be at least 1");
  switch (graph.model) {
    case GraphModel::ER:
      if (graph.n < 1) throw InvalidArgument("n must be at least 1");
      break;
    case GraphModel::BA:
      if (graph.m < 1 || graph.m >= graph.n) throw InvalidArgument("BA needs 1 <= m < n");
      break;
    case GraphModel::SBM:
      if (graph.blocks.empty()) throw InvalidArgument("blocks must not be empty");
      break;
    case GraphModel::File:
      if (!graph.fixed) throw InvalidArgument("edge_list graph was not loaded");
      break;
  }
}

Graph make_graph(const GraphSpec& spec, std::uint64_t seed) {
  switch (spec.model) {
    case GraphModel::ER:
      return generate_er(spec.n, spec.p, seed);
    case GraphModel::BA:
      return generate_ba(spec.n, spec.m, seed);
    case GraphModel::SBM:
      return generate_sbm(spec.blocks, spec.p_in, spec.p_out, seed);
    case GraphModel::File:
      if (!spec.fixed) throw InvalidArgument("no graph loaded");
      return *spec.fixed;
  }
  throw InvalidArgument("unknown graph model");
}

Instance assemble_instance(Graph g, ShiftedSpectrum s, RewardField rf) {
  Instance inst{std::move(g), std::move(s), std::move(rf), {}, {}, 0.0};
  inst.universe = arm_universe(inst.graph);
  inst.best = best_probe(inst.reward, inst.universe);
  inst.best_value = probe_reward(inst.reward, inst.best);
  return inst;
}

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  Graph g = make_graph(cfg.graph, derive_seed(run_seed, Stream::Graph));
  ShiftedSpectrum spectrum(spectral_decomposition(g), cfg.lambda);
  RewardField rf =
      cfg.reward.node_values
          ? reward_from_node_values(spectrum, *cfg.reward.node_values, cfg.R)
          : synthesize_smooth_reward(spectrum, cfg.reward.k, cfg.reward.c, cfg.R,
                                     derive_seed(run_seed, Stream::Reward));
  return assemble_instance(std::move(g), std::move(spectrum), std::move(rf));
}

Trajectory run_trajectory(const ExperimentConfig& cfg, const Instance& inst, PolicyKind policy,
                          std::uint64_t seed) {
  const Graph& g = inst.graph;
  const int n = g.num_nodes();
  const ShiftedSpectrum basis = policy == PolicyKind::LinUCB
                                    ? ShiftedSpectrum(identity_spectrum(n), cfg.lambda)
                                    : inst.spectrum;

  Trajectory tr;
  tr.policy = policy;
  tr.seed = seed;
  tr.plan = stage_schedule(cfg.T, policy == PolicyKind::CheapUCB ? g.min_degree() : 0);
  tr.effective_dim = effective_dimension(basis, cfg.T);
  tr.beta = confidence_width(cfg.R, tr.effective_dim, cfg.T, cfg.lambda, cfg.delta,
                             inst.reward.c);
  tr.steps.reserve(cfg.T);

  RidgeState st(basis);
  Rng noise = make_rng(seed, Stream::Noise);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
  std::vector<Probe> candidates;
  std::optional<ArmScorer> scorer;
  int current_width = 0;
  double regret_cum = 0.0, cost_cum = 0.0;

  for (int t = 1; t <= cfg.T; ++t) {
    Probe chosen;
    GftVector x;
    if (policy == PolicyKind::Oracle) {
      chosen = inst.best;
      x = gft(basis.base, chosen);
    } else {
      if (const int w = tr.plan.width_at(t); w != current_width) {
        candidates = probe_set(g, w);
        scorer.emplace(gft_matrix(basis.base, candidates), st);
        current_width = w;
      }
      const int idx = scorer->select(tr.beta);
      chosen = candidates[idx];
      x = scorer->candidates().row(idx).transpose();
    }

    const double value = probe_reward(inst.reward, chosen);
    const double r = observe(inst.reward, chosen, noise);
    double regret = inst.best_value - value;
    if (regret < -1e-9)
      throw InvariantBreach(fmt::format("negative regret {} at t={} ({})", regret, t,
                                        format_probe(chosen)));
    regret = std::max(regret, 0.0);
    const double cost = probe_cost(cfg.cost_model, g, chosen);
    if (cost < 0.0 || (cfg.cost_model == CostModel::Width && !(cost > 0.0)))
      throw InvariantBreach(fmt::format("cost ledger did not advance at t={}", t));
    regret_cum += regret;
    cost_cum += cost;
    tr.steps.push_back({t, chosen.anchor, chosen.width(), r, regret, cost, regret_cum, cost_cum});

    const RankOneUpdate upd = st.update(x, r);
    if (scorer) {
      if (st.steps() % 64 == 0)
        scorer->refresh(st);
      else
        scorer->apply(upd, st);
    }
    xi += (r - value) * x;
    tr.self_normalized_max =
        std::max(tr.self_normalized_max, std::sqrt(std::max(0.0, xi.dot(st.V_inv() * xi))));
  }

  tr.digest = {st.steps(), st.log_det_ratio(), st.alpha_hat().norm()};
  return tr;
}

std::vector<SummaryRow> aggregate(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw InvalidArgument("nothing to aggregate");
  const int horizon = trajectories.front().horizon();
  std::vector<PolicyKind> order;
  for (const Trajectory& tr : trajectories) {
    if (tr.horizon() != horizon)
      throw InvalidArgument(
          fmt::format("mixed horizons: {} vs {}", tr.horizon(), horizon));
    if (std::find(order.begin(), order.end(), tr.policy) == order.end())
      order.push_back(tr.policy);
  }

  auto mean_se = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return std::pair(mean, 0.0);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair(mean, std::sqrt(ss / (n - 1.0) / n));
  };

  std::vector<SummaryRow> rows;
  std::vector<double> regrets, costs;
  for (PolicyKind policy : order) {
    for (int t = 0; t < horizon; ++t) {
      regrets.clear();
      costs.clear();
      for (const Trajectory& tr : trajectories) {
        if (tr.policy != policy) continue;
        regrets.push_back(tr.steps[t].regret_cum);
        costs.push_back(tr.steps[t].cost_cum);
      }
      const auto [rm, rs] = mean_se(regrets);
      const auto [cm, cs] = mean_se(costs);
      rows.push_back({std::string(to_string(policy)), t + 1, rm, rs, cm, cs});
    }
  }
  return rows;
}

VerificationReport verify_trajectory(const Trajectory& traj, const Instance& inst,
                                     const ExperimentConfig& cfg) {
  VerificationReport rep;
  rep.policy = traj.policy;
  rep.seed = traj.seed;
  const int T = traj.horizon();

  rep.log_det_lhs = traj.digest.log_det_ratio;
  rep.log_det_rhs = 2.0 * traj.effective_dim * std::log(1.0 + T / cfg.lambda);
  rep.log_det_ok = rep.log_det_lhs <= rep.log_det_rhs;

  rep.cost_total = traj.final_cost();
  rep.cost_bound = 0.75 * T - 0.5;
  rep.cost_bound_applicable = traj.policy == PolicyKind::CheapUCB &&
                              cfg.cost_model == CostModel::Width &&
                              inst.graph.min_degree() + 1 >= traj.plan.J;
  rep.cost_bound_ok = rep.cost_total <= rep.cost_bound + 1e-9;

  rep.self_normalized_max = traj.self_normalized_max;
  rep.self_normalized_bound = traj.beta - inst.reward.c;

  const int d = effective_dimension(inst.spectrum, T);
  const double c_prime = 56.0 * inst.graph.kappa() * std::sqrt(2.0 * inst.graph.kappa()) *
                         inst.reward.c;
  const double lambda_next =
      d < inst.spectrum.size() ? inst.spectrum.eigenvalue(d) : std::numeric_limits<double>::infinity();
  const NodeId star = inst.best.anchor;
  std::vector<int> widths;
  for (const Stage& s : traj.plan.stages) {
    if (std::find(widths.begin(), widths.end(), s.width) == widths.end()) widths.push_back(s.width);
  }
  for (int w : widths) {
    if (w > inst.graph.degree(star) + 1) continue;
    NeighborhoodResidual res;
    res.width = w;
    res.gap = std::abs(inst.best_value - probe_reward(inst.reward, build_probe(inst.graph, star, w)));
    res.bound = c_prime * std::sqrt(static_cast<double>(T)) * w / lambda_next;
    res.holds = res.gap <= res.bound;
    rep.neighborhood.push_back(res);
  }
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int runs = cfg.runs;
  const std::size_t np = cfg.policies.size();
  std::vector<Trajectory> trajs(runs * np);
  std::vector<VerificationReport> reps(runs * np);
  std::vector<RunInfo> infos(runs);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) {
      try {
        const std::uint64_t seed = cfg.run_seed(i);
        const Instance inst = make_instance(cfg, seed);
        RunInfo& info = infos[i];
        info.seed = seed;
        info.min_degree = inst.graph.min_degree();
        info.effective_dim = effective_dimension(inst.spectrum, cfg.T);
        info.leading_eigenvalues = inst.spectrum.eigenvalues().head(std::min(8, inst.spectrum.size()));
        for (std::size_t p = 0; p < np; ++p) {
          const std::size_t slot = p * runs + i;
          trajs[slot] = run_trajectory(cfg, inst, cfg.policies[p], seed);
          reps[slot] = verify_trajectory(trajs[slot], inst, cfg);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return {std::move(trajs), std::move(reps), std::move(infos)};
}

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories) {
  os << "policy,seed,t,anchor,width,reward,regret_cum,cost_cum\n";
  for (const Trajectory& tr : trajectories) {
    for (const StepRecord& s : tr.steps) {
      os << fmt::format("{},{},{},{},{},{},{},{}\n", to_string(tr.policy), tr.seed, s.t, s.anchor,
                        s.width, s.reward, s.regret_cum, s.cost_cum);
    }
  }
}

std::vector<Trajectory> read_trajectories_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      line.rfind("policy,seed,t,anchor,width,reward,regret_cum,cost_cum", 0) != 0)
    throw InvalidArgument("trajectory CSV has an unexpected header");
  std::vector<Trajectory> out;
  int row = 1;
  std::vector<std::string> fields;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fields.clear();
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 8)
      throw InvalidArgument(fmt::format("trajectory CSV row {}: expected 8 fields", row));
    try {
      const PolicyKind policy = parse_policy(fields[0]);
      const std::uint64_t seed = std::stoull(fields[1]);
      StepRecord s;
      s.t = std::stoi(fields[2]);
      s.anchor = std::stoi(fields[3]);
      s.width = std::stoi(fields[4]);
      s.reward = std::stod(fields[5]);
      s.regret_cum = std::stod(fields[6]);
      s.cost_cum = std::stod(fields[7]);
      if (out.empty() || out.back().policy != policy || out.back().seed != seed ||
          s.t == 1) {
        out.emplace_back();
        out.back().policy = policy;
        out.back().seed = seed;
      }
      Trajectory& tr = out.back();
      if (s.t != tr.horizon() + 1)
        throw InvalidArgument(fmt::format("trajectory CSV row {}: step {} out of order", row, s.t));
      const double prev_regret = tr.steps.empty() ? 0.0 : tr.steps.back().regret_cum;
      const double prev_cost = tr.steps.empty() ? 0.0 : tr.steps.back().cost_cum;
      s.regret = s.regret_cum - prev_regret;
      s.cost = s.cost_cum - prev_cost;
      tr.steps.push_back(s);
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InvalidArgument*>(&e)) throw;
      throw InvalidArgument(fmt::format("trajectory CSV row {}: {}", row, e.what()));
    }
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "policy,t,regret_mean,regret_se,cost_mean,cost_se\n";
  for (const SummaryRow& r : rows) {
    os << fmt::format("{},{},{},{},{},{}\n", r.policy, r.t, r.regret_mean, r.regret_se,
                      r.cost_mean, r.cost_se);
  }
}

}  // namespace cheapbandits
