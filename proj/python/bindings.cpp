#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cheapbandits/cli.hpp"
#include "cheapbandits/error.hpp"
#include "cheapbandits/harness.hpp"
#include "cheapbandits/ingest.hpp"

namespace py = pybind11;
using namespace cheapbandits;

namespace {

Graph graph_from_tuples(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<Edge> es;
  es.reserve(edges.size());
  for (const auto& [u, v, w] : edges) es.push_back({u, v, w});
  return Graph::from_edge_list(n, es);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cost-aware spectral bandits on graphs.";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_ArithmeticError);
  py::register_exception<InvariantBreach>(m, "InvariantBreach", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def(py::init(&graph_from_tuples), py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("kappa", &Graph::kappa)
      .def_property_readonly("min_degree", &Graph::min_degree)
      .def("degree", &Graph::degree)
      .def("edges",
           [](const Graph& g) {
             std::vector<std::tuple<int, int, double>> out;
             for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
             return out;
           })
      .def("laplacian", &Graph::laplacian)
      .def("__repr__", [](const Graph& g) {
        return "<Graph N=" + std::to_string(g.num_nodes()) +
               " edges=" + std::to_string(g.edges().size()) + ">";
      });

  m.def("generate_er", &generate_er, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("generate_ba", &generate_ba, py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def(
      "generate_sbm",
      [](const std::vector<int>& blocks, double p_in, double p_out, std::uint64_t seed) {
        return generate_sbm(blocks, p_in, p_out, seed);
      },
      py::arg("blocks"), py::arg("p_in"), py::arg("p_out"), py::arg("seed"));
  m.def("connected_components", &connected_components);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("Q", &Spectrum::Q);
  m.def("spectral_decomposition", &spectral_decomposition);
  m.def(
      "effective_dimension",
      [](const Spectrum& s, double lam, int T) { return effective_dimension(ShiftedSpectrum(s, lam), T); },
      py::arg("spectrum"), py::arg("lam"), py::arg("T"));

  py::class_<Probe>(m, "Probe")
      .def_readonly("anchor", &Probe::anchor)
      .def_readonly("support", &Probe::support)
      .def_property_readonly("width", &Probe::width)
      .def("signal", &Probe::signal)
      .def("__repr__", &format_probe);
  m.def("build_probe", &build_probe, py::arg("graph"), py::arg("anchor"), py::arg("width"));
  m.def("gft", &gft, py::arg("spectrum"), py::arg("probe"));
  m.def("cost_closed_form", &cost_closed_form, py::arg("width"), py::arg("num_nodes"));
  m.def("cost_quadratic", &cost_quadratic, py::arg("graph"), py::arg("probe"));

  m.def("confidence_width", &confidence_width, py::arg("R"), py::arg("d"), py::arg("T"),
        py::arg("lam"), py::arg("delta"), py::arg("c"));
  m.def(
      "stage_schedule",
      [](int T, int min_degree) {
        std::vector<std::tuple<int, int, int>> out;
        for (const Stage& s : stage_schedule(T, min_degree).stages)
          out.emplace_back(s.first, s.last, s.width);
        return out;
      },
      py::arg("T"), py::arg("min_degree"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("policy", [](const Trajectory& t) { return std::string(to_string(t.policy)); })
      .def_readonly("seed", &Trajectory::seed)
      .def_readonly("beta", &Trajectory::beta)
      .def_readonly("effective_dim", &Trajectory::effective_dim)
      .def_property_readonly("anchors",
                             [](const Trajectory& t) {
                               std::vector<int> out;
                               for (const auto& s : t.steps) out.push_back(s.anchor);
                               return out;
                             })
      .def_property_readonly("widths",
                             [](const Trajectory& t) {
                               std::vector<int> out;
                               for (const auto& s : t.steps) out.push_back(s.width);
                               return out;
                             })
      .def_property_readonly("regret",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& s : t.steps) out.push_back(s.regret_cum);
                               return out;
                             })
      .def_property_readonly("cost", [](const Trajectory& t) {
        std::vector<double> out;
        for (const auto& s : t.steps) out.push_back(s.cost_cum);
        return out;
      });

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::filesystem::path& base_dir) {
        ExperimentConfig cfg = load_experiment_config(config_json, base_dir);
        py::gil_scoped_release release;
        ExperimentResult res = run_experiment(cfg);
        std::vector<bool> ok;
        for (const auto& r : res.reports) ok.push_back(r.ok());
        return std::make_pair(std::move(res.trajectories), ok);
      },
      py::arg("config_json"), py::arg("base_dir") = ".",
      "Runs a JSON-configured experiment; returns (trajectories, verification ok flags).");

  m.def(
      "ingest",
      [](const Eigen::MatrixXd& points, const std::vector<std::string>& labels, int clusters,
         const std::string& target, int knn, std::uint64_t seed) {
        if (static_cast<std::size_t>(points.rows()) != labels.size())
          throw InvalidArgument("points and labels differ in length");
        IngestResult res = ingest(PointSet{points, labels}, clusters, knn, target, seed);
        return std::make_pair(std::move(res.graph), Eigen::VectorXd(res.rewards));
      },
      py::arg("points"), py::arg("labels"), py::arg("clusters"), py::arg("target"),
      py::arg("knn") = 10, py::arg("seed") = 0);
}
