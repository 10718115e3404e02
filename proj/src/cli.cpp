#include "cheapbandits/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cheapbandits/error.hpp"
#include "cheapbandits/ingest.hpp"
#include "cheapbandits/seeding.hpp"

namespace cheapbandits {

namespace fs = std::filesystem;
using json = nlohmann::json;

Verb parse_verb(std::string_view name) {
  if (name == "gen-graph") return Verb::GenGraph;
  if (name == "ingest") return Verb::Ingest;
  if (name == "run") return Verb::Run;
  if (name == "report") return Verb::Report;
  throw InvalidArgument(fmt::format("unknown verb '{}' (expected gen-graph|ingest|run|report)", name));
}

namespace {

const json& require(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw ConfigError(fmt::format("missing config key '{}'", key));
  return cfg.at(key);
}

template <typename T>
T get(const json& cfg, const char* key) {
  try {
    return require(cfg, key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config key '{}' has the wrong type: {}", key, e.what()));
  }
}

template <typename T>
T get_or(const json& cfg, const char* key, T fallback) {
  return cfg.contains(key) ? get<T>(cfg, key) : fallback;
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument(fmt::format("cannot read '{}'", p.string()));
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", p.string()));
  return out;
}

json parse_json(const std::string& text) {
  try {
    json cfg = json::parse(text);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return cfg;
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()));
  }
}

GraphSpec load_graph_spec(const json& cfg, const fs::path& base_dir) {
  GraphSpec spec;
  const auto model = get<std::string>(cfg, "graph");
  if (model == "er") {
    spec.model = GraphModel::ER;
    spec.n = get<int>(cfg, "n");
    spec.p = get<double>(cfg, "p");
  } else if (model == "ba") {
    spec.model = GraphModel::BA;
    spec.n = get<int>(cfg, "n");
    spec.m = get<int>(cfg, "m");
  } else if (model == "sbm") {
    spec.model = GraphModel::SBM;
    spec.blocks = get<std::vector<int>>(cfg, "blocks");
    spec.p_in = get<double>(cfg, "p_in");
    spec.p_out = get<double>(cfg, "p_out");
  } else if (model == "file") {
    spec.model = GraphModel::File;
    auto in = open_in(resolve(base_dir, get<std::string>(cfg, "edge_list")));
    spec.fixed = read_edge_list(in);
  } else {
    throw ConfigError(fmt::format("config key 'graph' must be er|ba|sbm|file, got '{}'", model));
  }
  return spec;
}

std::string read_file(const fs::path& p) {
  auto in = open_in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json report_to_json(const VerificationReport& r) {
  json j = {{"policy", to_string(r.policy)},
            {"seed", r.seed},
            {"log_det", {{"lhs", r.log_det_lhs}, {"rhs", r.log_det_rhs}, {"ok", r.log_det_ok}}},
            {"self_normalized",
             {{"max", r.self_normalized_max}, {"bound", r.self_normalized_bound},
              {"ok", r.self_normalized_max <= r.self_normalized_bound}}},
            {"ok", r.ok()}};
  if (r.cost_bound_applicable) {
    j["cost_bound"] = {{"total", r.cost_total}, {"bound", r.cost_bound}, {"ok", r.cost_bound_ok}};
  }
  json residuals = json::array();
  for (const auto& n : r.neighborhood)
    residuals.push_back({{"width", n.width}, {"gap", n.gap}, {"bound", n.bound}, {"holds", n.holds}});
  j["neighborhood_residuals"] = residuals;
  return j;
}

int run_verb(const Command& cmd, const json& cfg_json, const fs::path& base_dir, std::ostream& log,
             std::ostream& err) {
  ExperimentConfig cfg = load_experiment_config(cfg_json.dump(), base_dir);
  if (cmd.seed) cfg.base_seed = *cmd.seed;
  if (cmd.policies) cfg.policies = *cmd.policies;
  if (cmd.runs) cfg.runs = *cmd.runs;
  if (cmd.cost_model) cfg.cost_model = *cmd.cost_model;
  cfg.validate();

  const ExperimentResult result = run_experiment(cfg);
  {
    auto out = open_out(cmd.out / "trajectories.csv");
    write_trajectories_csv(out, result.trajectories);
  }
  {
    auto out = open_out(cmd.out / "summary.csv");
    write_summary_csv(out, aggregate(result.trajectories));
  }

  json verification = json::array();
  int failures = 0, self_normalized_misses = 0;
  for (const auto& r : result.reports) {
    verification.push_back(report_to_json(r));
    if (!r.ok()) ++failures;
    if (r.self_normalized_max > r.self_normalized_bound) ++self_normalized_misses;
  }
  json runs = json::array();
  for (const auto& info : result.runs) {
    runs.push_back({{"seed", info.seed},
                    {"min_degree", info.min_degree},
                    {"effective_dimension", info.effective_dim},
                    {"leading_shifted_eigenvalues",
                     std::vector<double>(info.leading_eigenvalues.data(),
                                         info.leading_eigenvalues.data() +
                                             info.leading_eigenvalues.size())}});
  }
  json report = {{"ok", failures == 0},
                 {"failed_trajectories", failures},
                 {"self_normalized_misses", self_normalized_misses},
                 {"runs", runs},
                 {"trajectories", verification}};
  {
    auto out = open_out(cmd.out / "verification.json");
    out << report.dump(2) << '\n';
  }
  log << fmt::format("run: {} trajectories, {} failed verification -> {}\n",
                     result.trajectories.size(), failures, cmd.out.string());
  if (failures > 0) {
    err << fmt::format("verification failed for {} trajectories (see verification.json)\n",
                       failures);
    return 2;
  }
  return 0;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& json_text, const fs::path& base_dir) {
  const json cfg = parse_json(json_text);
  ExperimentConfig out;
  out.graph = load_graph_spec(cfg, base_dir);
  if (cfg.contains("rewards")) {
    auto in = open_in(resolve(base_dir, get<std::string>(cfg, "rewards")));
    out.reward.node_values = read_reward_csv(in);
  } else {
    out.reward.k = get<int>(cfg, "k");
  }
  if (cfg.contains("c") && !(cfg.at("c").is_string() && cfg.at("c") == "auto"))
    out.reward.c = get<double>(cfg, "c");
  out.R = get_or(cfg, "R", out.R);
  out.lambda = get_or(cfg, "lambda", out.lambda);
  out.delta = get_or(cfg, "delta", out.delta);
  out.T = get<int>(cfg, "T");
  if (cfg.contains("policies")) {
    out.policies.clear();
    for (const auto& name : get<std::vector<std::string>>(cfg, "policies"))
      out.policies.push_back(parse_policy(name));
  }
  out.runs = get_or(cfg, "runs", out.runs);
  out.base_seed = get_or<std::uint64_t>(cfg, "seed", out.base_seed);
  if (cfg.contains("cost_model")) out.cost_model = parse_cost_model(get<std::string>(cfg, "cost_model"));
  out.threads = get_or(cfg, "threads", out.threads);
  if (out.reward.node_values && out.graph.model != GraphModel::File)
    throw ConfigError("config key 'rewards' requires graph = file");
  out.validate();
  return out;
}

int execute(const Command& cmd, std::ostream& log, std::ostream& err) {
  try {
    fs::create_directories(cmd.out);
    json cfg = json::object();
    fs::path base_dir = ".";
    if (cmd.config) {
      cfg = parse_json(read_file(*cmd.config));
      base_dir = cmd.config->parent_path();
    } else if (cmd.verb != Verb::Report) {
      throw ConfigError("--config is required for this verb");
    }

    switch (cmd.verb) {
      case Verb::GenGraph: {
        const GraphSpec spec = load_graph_spec(cfg, base_dir);
        const std::uint64_t seed = cmd.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 0));
        const Graph g = make_graph(spec, derive_seed(seed, Stream::Graph));
        auto out = open_out(cmd.out / "graph.txt");
        write_edge_list(out, g);
        log << fmt::format("gen-graph: N={} edges={} -> {}\n", g.num_nodes(), g.edges().size(),
                           (cmd.out / "graph.txt").string());
        return 0;
      }
      case Verb::Ingest: {
        auto in = open_in(resolve(base_dir, get<std::string>(cfg, "points")));
        const PointSet ps = read_points_csv(in);
        const std::uint64_t seed = cmd.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 0));
        const IngestResult res = ingest(ps, get<int>(cfg, "clusters"), get_or(cfg, "knn", 10),
                                        get<std::string>(cfg, "target_label"), seed);
        {
          auto out = open_out(cmd.out / "graph.txt");
          write_edge_list(out, res.graph);
        }
        {
          auto out = open_out(cmd.out / "rewards.csv");
          write_reward_csv(out, res.rewards);
        }
        log << fmt::format("ingest: {} samples -> {} clusters, {} edges, inertia {}\n", ps.size(),
                           res.graph.num_nodes(), res.graph.edges().size(),
                           res.clustering.inertia());
        return 0;
      }
      case Verb::Run:
        return run_verb(cmd, cfg, base_dir, log, err);
      case Verb::Report: {
        const fs::path source = cfg.contains("trajectories")
                                    ? resolve(base_dir, get<std::string>(cfg, "trajectories"))
                                    : cmd.out / "trajectories.csv";
        auto in = open_in(source);
        const auto trajectories = read_trajectories_csv(in);
        auto out = open_out(cmd.out / "summary.csv");
        write_summary_csv(out, aggregate(trajectories));
        log << fmt::format("report: {} trajectories -> {}\n", trajectories.size(),
                           (cmd.out / "summary.csv").string());
        return 0;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cheapbandits
