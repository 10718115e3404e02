#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cheapbandits/cli.hpp"

using namespace cheapbandits;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cheapbandits_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verb names") {
  CHECK(parse_verb("gen-graph") == Verb::GenGraph);
  CHECK(parse_verb("report") == Verb::Report);
  CHECK_THROWS_AS(parse_verb("plot"), InvalidArgument);
}

TEST_CASE("config loading") {
  const auto cfg = load_experiment_config(
      R"({"graph":"ba","n":50,"m":2,"k":3,"T":20,"c":"auto","policies":["LinUCB"],"seed":9})", ".");
  CHECK(cfg.graph.model == GraphModel::BA);
  CHECK(cfg.graph.m == 2);
  CHECK(!cfg.reward.c);
  CHECK(cfg.policies == std::vector<PolicyKind>{PolicyKind::LinUCB});
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.R == 0.01);

  try {
    load_experiment_config(R"({"graph":"er","n":50,"k":3,"T":20})", ".");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "missing config key 'p'");
  }
  CHECK_THROWS_AS(load_experiment_config(R"({"graph":"er","n":50,"p":0.1,"k":3})", "."), ConfigError);
  CHECK_THROWS_AS(load_experiment_config("[1,2]", "."), ConfigError);
  CHECK_THROWS_AS(load_experiment_config("{", "."), ConfigError);
  CHECK_THROWS_AS(load_experiment_config(R"({"graph":"er","n":"many","p":0.1,"k":3,"T":5})", "."),
                  ConfigError);
}

TEST_CASE("gen-graph round trip") {
  const fs::path dir = scratch("gen");
  write(dir / "cfg.json", R"({"graph":"sbm","blocks":[10,12],"p_in":0.6,"p_out":0.05,"seed":4})");
  Command cmd;
  cmd.verb = Verb::GenGraph;
  cmd.config = dir / "cfg.json";
  cmd.out = dir / "out";
  std::stringstream log, err;
  REQUIRE(execute(cmd, log, err) == 0);
  std::ifstream in(dir / "out" / "graph.txt");
  const Graph g = read_edge_list(in);
  const Graph direct = generate_sbm(std::vector<int>{10, 12}, 0.6, 0.05, derive_seed(4, Stream::Graph));
  CHECK(g.num_nodes() == 22);
  REQUIRE(g.edges().size() == direct.edges().size());
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    CHECK(g.edges()[i].u == direct.edges()[i].u);
    CHECK(g.edges()[i].v == direct.edges()[i].v);
  }
}

TEST_CASE("run then report") {
  const fs::path dir = scratch("run");
  write(dir / "cfg.json", R"({"graph":"er","n":30,"p":0.3,"k":3,"T":25,"runs":2,"threads":1})");
  Command cmd;
  cmd.verb = Verb::Run;
  cmd.config = dir / "cfg.json";
  cmd.out = dir;
  std::stringstream log, err;
  REQUIRE(execute(cmd, log, err) == 0);
  CHECK(fs::exists(dir / "trajectories.csv"));
  CHECK(fs::exists(dir / "verification.json"));
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("policy,t,regret_mean,regret_se,cost_mean,cost_se\n", 0) == 0);

  Command rep;
  rep.verb = Verb::Report;
  rep.out = dir;
  REQUIRE(execute(rep, log, err) == 0);
  CHECK(slurp(dir / "summary.csv") == summary);

  Command again = cmd;
  again.out = dir / "second";
  REQUIRE(execute(again, log, err) == 0);
  CHECK(slurp(dir / "second" / "trajectories.csv") == slurp(dir / "trajectories.csv"));
}

TEST_CASE("errors are reported, not thrown") {
  const fs::path dir = scratch("err");
  write(dir / "cfg.json", R"({"graph":"er","n":30,"k":3,"T":25})");
  Command cmd;
  cmd.verb = Verb::Run;
  cmd.config = dir / "cfg.json";
  cmd.out = dir;
  std::stringstream log, err;
  CHECK(execute(cmd, log, err) == 1);
  CHECK(err.str().find("missing config key 'p'") != std::string::npos);

  Command none;
  none.verb = Verb::Run;
  none.out = dir;
  CHECK(execute(none, log, err) == 1);
}
