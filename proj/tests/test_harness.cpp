#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cheapbandits/error.hpp"
#include "cheapbandits/harness.hpp"
#include "fixtures.hpp"

using namespace cheapbandits;
using namespace cheapbandits::testing;

namespace {

ExperimentConfig er_config(int T, int runs = 1) {
  ExperimentConfig cfg;
  cfg.graph.model = GraphModel::ER;
  cfg.graph.n = 40;
  cfg.graph.p = 0.2;
  cfg.reward.k = 4;
  cfg.T = T;
  cfg.runs = runs;
  cfg.threads = 1;
  return cfg;
}

Trajectory fake(PolicyKind k, std::uint64_t seed, std::vector<double> regret, std::vector<double> cost) {
  Trajectory tr;
  tr.policy = k;
  tr.seed = seed;
  for (std::size_t i = 0; i < regret.size(); ++i) {
    StepRecord s;
    s.t = static_cast<int>(i) + 1;
    s.regret_cum = regret[i];
    s.cost_cum = cost[i];
    tr.steps.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = er_config(10);
  CHECK_NOTHROW(cfg.validate());
  cfg.T = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = er_config(10);
  cfg.delta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = er_config(10);
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = er_config(10);
  cfg.policies.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("single step regret and cost") {
  ExperimentConfig cfg = er_config(1);
  const Instance inst = make_instance(cfg, 5);
  for (PolicyKind k : {PolicyKind::CheapUCB, PolicyKind::SpectralUCB, PolicyKind::LinUCB}) {
    const Trajectory tr = run_trajectory(cfg, inst, k, 5);
    REQUIRE(tr.horizon() == 1);
    const StepRecord& s = tr.steps[0];
    const Probe p = build_probe(inst.graph, s.anchor, s.width);
    CHECK(s.regret == doctest::Approx(inst.best_value - probe_reward(inst.reward, p)));
    CHECK(s.regret >= 0.0);
    CHECK(s.cost == doctest::Approx(cost_closed_form(s.width, inst.graph.num_nodes())));
    CHECK(tr.digest.updates == 1);
  }
}

TEST_CASE("oracle policy has zero regret") {
  ExperimentConfig cfg = er_config(30);
  cfg.policies = {PolicyKind::Oracle};
  const Instance inst = make_instance(cfg, 2);
  const Trajectory tr = run_trajectory(cfg, inst, PolicyKind::Oracle, 2);
  CHECK(tr.final_regret() == 0.0);
  for (const auto& s : tr.steps) CHECK(s.cost == doctest::Approx(cost_closed_form(s.width, 40)));
}

TEST_CASE("trajectories are deterministic") {
  ExperimentConfig cfg = er_config(40, 2);
  const ExperimentResult a = run_experiment(cfg);
  cfg.threads = 3;
  const ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.trajectories.size() == 6);
  REQUIRE(b.trajectories.size() == 6);
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    CHECK(a.trajectories[i].policy == b.trajectories[i].policy);
    CHECK(a.trajectories[i].seed == b.trajectories[i].seed);
    for (int t = 0; t < 40; ++t) {
      CHECK(a.trajectories[i].steps[t].anchor == b.trajectories[i].steps[t].anchor);
      CHECK(a.trajectories[i].steps[t].reward == b.trajectories[i].steps[t].reward);
    }
  }
  CHECK(a.trajectories[0].policy == PolicyKind::CheapUCB);
  CHECK(a.trajectories[1].policy == PolicyKind::CheapUCB);
  CHECK(a.trajectories[1].seed == 1);
  CHECK(a.trajectories[2].policy == PolicyKind::SpectralUCB);
}

TEST_CASE("ledger monotone and regret non-decreasing") {
  ExperimentConfig cfg = er_config(64, 3);
  const ExperimentResult res = run_experiment(cfg);
  for (const auto& tr : res.trajectories) {
    double prev_cost = 0.0, prev_regret = 0.0;
    for (const auto& s : tr.steps) {
      CHECK(s.cost_cum > prev_cost);
      CHECK(s.regret_cum >= prev_regret);
      prev_cost = s.cost_cum;
      prev_regret = s.regret_cum;
    }
  }
}

TEST_CASE("spectral baselines pay one per step") {
  ExperimentConfig cfg = er_config(50);
  const Instance inst = make_instance(cfg, 0);
  for (PolicyKind k : {PolicyKind::SpectralUCB, PolicyKind::LinUCB}) {
    const Trajectory tr = run_trajectory(cfg, inst, k, 0);
    CHECK(tr.final_cost() == doctest::Approx(50.0));
    for (const auto& s : tr.steps) CHECK(s.width == 1);
  }
}

TEST_CASE("cheap policy cost on a dense graph") {
  // min degree >= J-1 so the schedule is uncapped.
  ExperimentConfig cfg;
  cfg.graph.model = GraphModel::File;
  cfg.graph.fixed = complete_graph(250);
  cfg.reward.k = 3;
  cfg.T = 100;
  cfg.policies = {PolicyKind::CheapUCB};
  const Instance inst = make_instance(cfg, 0);
  const Trajectory tr = run_trajectory(cfg, inst, PolicyKind::CheapUCB, 0);
  CHECK(tr.final_cost() == doctest::Approx(61.55314068027211).epsilon(1e-10));
  const VerificationReport rep = verify_trajectory(tr, inst, cfg);
  CHECK(rep.cost_bound_applicable);
  CHECK(rep.cost_bound == doctest::Approx(74.5));
  CHECK(rep.cost_bound_ok);
  CHECK(rep.log_det_ok);
  CHECK(rep.ok());
}

TEST_CASE("cheap policy reduces to the spectral one when min degree is zero") {
  std::vector<Edge> edges;
  for (int i = 0; i < 9; ++i) edges.push_back({i, i + 1, 0.5 + 0.05 * i});
  ExperimentConfig cfg;
  cfg.graph.model = GraphModel::File;
  cfg.graph.fixed = Graph::from_edge_list(12, edges);  // nodes 10, 11 isolated
  cfg.reward.k = 3;
  cfg.T = 40;
  const Instance inst = make_instance(cfg, 7);
  const Trajectory cheap = run_trajectory(cfg, inst, PolicyKind::CheapUCB, 7);
  const Trajectory spectral = run_trajectory(cfg, inst, PolicyKind::SpectralUCB, 7);
  for (int t = 0; t < 40; ++t) {
    CHECK(cheap.steps[t].anchor == spectral.steps[t].anchor);
    CHECK(cheap.steps[t].width == 1);
    CHECK(cheap.steps[t].reward == spectral.steps[t].reward);
  }
}

TEST_CASE("verification on regular runs") {
  ExperimentConfig cfg = er_config(80, 2);
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.reports.size() == res.trajectories.size());
  for (const auto& r : res.reports) {
    CHECK(r.log_det_ok);
    CHECK(r.log_det_lhs <= r.log_det_rhs + 1e-9);
  }
  REQUIRE(res.runs.size() == 2);
  CHECK(res.runs[0].leading_eigenvalues.size() == 8);
}

TEST_CASE("aggregate") {
  SUBCASE("two runs") {
    const auto rows = aggregate({fake(PolicyKind::CheapUCB, 0, {3, 4}, {1, 2}),
                                 fake(PolicyKind::CheapUCB, 1, {5, 8}, {1, 2})});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].policy == "CheapUCB");
    CHECK(rows[0].t == 1);
    CHECK(rows[0].regret_mean == doctest::Approx(4.0));
    CHECK(rows[0].regret_se == doctest::Approx(1.0));  // sd sqrt(2) / sqrt(2)
    CHECK(rows[1].regret_mean == doctest::Approx(6.0));
    CHECK(rows[1].regret_se == doctest::Approx(2.0));
    CHECK(rows[1].cost_se == doctest::Approx(0.0));
  }
  SUBCASE("single run has zero standard error") {
    const auto rows = aggregate({fake(PolicyKind::LinUCB, 0, {2, 3}, {1, 2})});
    for (const auto& r : rows) {
      CHECK(r.regret_se == 0.0);
      CHECK(r.cost_se == 0.0);
    }
  }
  SUBCASE("policy order") {
    const auto rows = aggregate({fake(PolicyKind::LinUCB, 0, {1}, {1}),
                                 fake(PolicyKind::CheapUCB, 0, {1}, {1})});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].policy == "LinUCB");
    CHECK(rows[1].policy == "CheapUCB");
  }
  SUBCASE("mixed horizons") {
    CHECK_THROWS_AS(aggregate({fake(PolicyKind::LinUCB, 0, {1}, {1}),
                               fake(PolicyKind::LinUCB, 1, {1, 2}, {1, 2})}),
                    InvalidArgument);
  }
  SUBCASE("noise-free runs") {
    ExperimentConfig cfg = er_config(20, 3);
    cfg.R = 0.0;
    cfg.graph.model = GraphModel::File;
    cfg.graph.fixed = generate_er(30, 0.3, 1);
    cfg.reward.node_values = Eigen::VectorXd::LinSpaced(30, 0.0, 1.0);
    const auto rows = aggregate(run_experiment(cfg).trajectories);
    for (const auto& r : rows) {
      CHECK(r.regret_se == doctest::Approx(0.0));
      CHECK(r.cost_se == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("trajectory CSV round trip") {
  const ExperimentResult res = run_experiment(er_config(15, 2));
  std::stringstream ss;
  write_trajectories_csv(ss, res.trajectories);
  const auto back = read_trajectories_csv(ss);
  REQUIRE(back.size() == res.trajectories.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].policy == res.trajectories[i].policy);
    CHECK(back[i].seed == res.trajectories[i].seed);
    REQUIRE(back[i].horizon() == 15);
    for (int t = 0; t < 15; ++t) {
      CHECK(back[i].steps[t].anchor == res.trajectories[i].steps[t].anchor);
      CHECK(back[i].steps[t].width == res.trajectories[i].steps[t].width);
      CHECK(back[i].steps[t].reward == res.trajectories[i].steps[t].reward);
      CHECK(back[i].steps[t].regret_cum == res.trajectories[i].steps[t].regret_cum);
      CHECK(back[i].steps[t].cost_cum == res.trajectories[i].steps[t].cost_cum);
    }
  }
  std::stringstream bad("policy,seed,t,anchor,width,reward,regret_cum,cost_cum\nCheapUCB,0,2,0,1,0,0,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(bad), InvalidArgument);
}
