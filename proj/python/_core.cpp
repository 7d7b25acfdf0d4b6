#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/oracle.hpp"
#include "cliqueopt/simnet.hpp"

namespace py = pybind11;
using namespace cliqueopt;

namespace {

std::vector<std::vector<NodeId>> one_based(const std::vector<std::vector<NodeId>>& cliques) {
  auto out = cliques;
  for (auto& c : out) {
    for (auto& v : c) ++v;
  }
  return out;
}

Graph graph_from_one_based(std::size_t n, const std::vector<std::pair<long long, long long>>& edges) {
  std::vector<Edge> zero_based;
  for (const auto& [i, j] : edges) {
    if (i < 1 || j < 1) throw InputError("node ids are 1-based");
    zero_based.emplace_back(static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1));
  }
  return Graph(n, zero_based);
}

py::dict trace_to_dict(const Trace& trace) {
  std::vector<std::size_t> k;
  std::vector<double> f, V, J, gap;
  for (const auto& r : trace.records) {
    k.push_back(r.k);
    f.push_back(r.f);
    V.push_back(r.V);
    J.push_back(r.J.value_or(std::numeric_limits<double>::quiet_NaN()));
    gap.push_back(r.rel_gap.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  py::dict out;
  out["k"] = k;
  out["f"] = f;
  out["V"] = V;
  out["J"] = J;
  out["rel_gap"] = gap;
  out["x"] = trace.final_x;
  out["iterations"] = trace.iterations;
  return out;
}

SolverConfig make_config(const std::string& algorithm, std::size_t p, const std::optional<std::string>& step,
                         std::size_t max_iters, std::size_t record_every, const std::optional<Vector>& x0,
                         const std::optional<double>& f_star, double L) {
  SolverConfig config;
  config.algorithm = parse_algorithm(algorithm == "apgd" ? "acpgd" : algorithm);
  config.p = p;
  config.schedule = step ? StepSchedule::parse(*step) : StepSchedule::fixed(1.0 / L);
  config.max_iters = max_iters;
  config.record_every = record_every;
  config.x0 = x0;
  config.f_star = f_star;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clique-based projected gradient descent (compiled core)";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<OracleError>(m, "OracleError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());

  m.def(
      "maximal_cliques",
      [](std::size_t n, const std::vector<std::pair<long long, long long>>& edges) {
        const CliqueCover cover = maximal_cliques(graph_from_one_based(n, edges));
        return py::make_tuple(one_based(cover.cliques), cover.weights);
      },
      py::arg("n"), py::arg("edges"),
      "Maximal cliques (1-based, canonical order) and the weights 1/|clq_i| of a graph.");

  py::class_<ConvexSet>(m, "ConvexSet")
      .def_static("free", &ConvexSet::free, py::arg("dim"))
      .def_static("affine", &ConvexSet::affine, py::arg("A"), py::arg("b"))
      .def_static("sum_equality", &ConvexSet::sum_equality, py::arg("target"), py::arg("dim"))
      .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
      .def_static("halfspace", &ConvexSet::halfspace, py::arg("a"), py::arg("b"))
      .def_static("box", &ConvexSet::box, py::arg("lo"), py::arg("hi"))
      .def_static("consensus", &ConvexSet::consensus, py::arg("members"), py::arg("block_dim") = 1)
      .def_property_readonly("dim", &ConvexSet::dim)
      .def_property_readonly("kind", [](const ConvexSet& s) { return std::string(s.kind()); })
      .def("violation", &ConvexSet::violation, py::arg("x"))
      .def("__repr__", [](const ConvexSet& s) {
        return "<ConvexSet " + std::string(s.kind()) + " dim=" + std::to_string(s.dim()) + ">";
      });

  m.def(
      "project_weighted",
      [](const ConvexSet& set, const Vector& x, const std::optional<Vector>& weights) {
        return project_weighted(set, x, weights ? WeightedNorm(*weights) : WeightedNorm::uniform(set.dim()));
      },
      py::arg("set"), py::arg("x"), py::arg("weights") = py::none(),
      "argmin over the set of ||z - x||_W with W = diag(weights) (uniform when omitted).");

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def_static(
          "from_json", [](const std::string& text) { return std::make_shared<Problem>(build_problem(nlohmann::json::parse(text))); },
          py::arg("text"), "Problem from its JSON description (same schema as the CLI configs).")
      .def_static(
          "allocation", [](std::uint64_t seed) { return std::make_shared<Problem>(generate_allocation_problem(seed)); },
          py::arg("seed"), "The 20-node resource allocation benchmark.")
      .def_property_readonly("agents", &Problem::agents)
      .def_property_readonly("agent_dim", &Problem::agent_dim)
      .def_property_readonly("dim", &Problem::total_dim)
      .def_property_readonly("L", [](const Problem& p) { return p.objective.smoothness(); })
      .def_property_readonly("cliques", [](const Problem& p) { return one_based(p.op.cover().cliques); })
      .def_property_readonly("gamma", [](const Problem& p) { return p.op.cover().weights; })
      .def_property_readonly("edges",
                             [](const Problem& p) {
                               std::vector<std::pair<NodeId, NodeId>> out;
                               for (const auto& [i, j] : p.graph.edges()) out.emplace_back(i + 1, j + 1);
                               return out;
                             })
      .def("f", [](const Problem& p, const Vector& x) { return p.objective.value(x); }, py::arg("x"))
      .def("grad_f", [](const Problem& p, const Vector& x) { return p.objective.gradient(x); }, py::arg("x"))
      .def("T", [](const Problem& p, const Vector& x, std::size_t power) { return apply_T_power(p.op, x, power); },
           py::arg("x"), py::arg("p") = 1, "Clique-based projection applied p times.")
      .def("V", [](const Problem& p, const Vector& x) { return eval_V(p.op, x); }, py::arg("x"))
      .def("grad_V", [](const Problem& p, const Vector& x) { return grad_V(p.op, x); }, py::arg("x"))
      .def("J", [](const Problem& p, const Vector& x, double t) { return eval_J(p.op, p.objective, x, t); },
           py::arg("x"), py::arg("t"))
      .def("violation", [](const Problem& p, const Vector& x) { return p.op.violation(x); }, py::arg("x"))
      .def("project_D", [](const Problem& p, const Vector& x) { return make_full_projection(p.op)(x); },
           py::arg("x"), "Euclidean projection onto the full feasible set.");

  m.def(
      "solve_equality_qp",
      [](const Problem& p) {
        const KktSolution sol = solve_equality_qp(p.objective, p.op);
        py::dict out;
        out["x_star"] = sol.x_star;
        out["f_star"] = sol.f_star;
        out["multipliers"] = sol.multipliers;
        out["primal_residual"] = sol.primal_residual;
        out["dual_residual"] = sol.dual_residual;
        return out;
      },
      py::arg("problem"));

  m.def(
      "solve",
      [](const Problem& p, const std::string& algorithm, std::size_t inner, const std::optional<std::string>& step,
         std::size_t max_iters, std::size_t record_every, const std::optional<Vector>& x0,
         const std::optional<double>& f_star) {
        const SolverConfig config =
            make_config(algorithm, inner, step, max_iters, record_every, x0, f_star, p.objective.smoothness());
        Trace trace;
        {
          py::gil_scoped_release release;
          trace = algorithm == "pgd" || algorithm == "apgd" ? run_pgd(p, make_full_projection(p.op), config)
                                                            : run_solver(p, config);
        }
        return trace_to_dict(trace);
      },
      py::arg("problem"), py::arg("algorithm") = "cpgd", py::arg("p") = 1, py::arg("step") = py::none(),
      py::arg("max_iters") = 1000, py::arg("record_every") = 1, py::arg("x0") = py::none(),
      py::arg("f_star") = py::none(),
      "Runs cpgd, acpgd, pgd or apgd. `step` is fixed:<t>, invk:<c> or invsqrtk:<c>; default fixed 1/L.");

  m.def(
      "simulate",
      [](const Problem& p, const std::string& algorithm, std::size_t inner, const std::optional<std::string>& step,
         std::size_t max_iters, std::size_t threads) {
        const SolverConfig config =
            make_config(algorithm, inner, step, max_iters, 1, std::nullopt, std::nullopt, p.objective.smoothness());
        SimnetOptions options;
        options.threads = threads;
        DistributedRun run;
        {
          py::gil_scoped_release release;
          run = run_distributed_cpgd(p, p.op.cover(), config, options);
        }
        py::dict out = trace_to_dict(run.trace);
        out["messages_per_iteration"] = run.messages_per_iteration;
        out["non_neighbour_reads"] = locality_audit(run, p.graph).violating_reads;
        return out;
      },
      py::arg("problem"), py::arg("algorithm") = "cpgd", py::arg("p") = 1, py::arg("step") = py::none(),
      py::arg("max_iters") = 100, py::arg("threads") = 1,
      "Message-passing run of cpgd or acpgd with a locality audit.");

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::optional<std::filesystem::path>& out_dir) {
        const ExperimentConfig config = parse_experiment_config(nlohmann::json::parse(config_json));
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config);
        }
        py::dict series;
        for (const auto& s : result.series) series[py::str(s.label)] = trace_to_dict(s.trace);
        py::dict out;
        out["f_star"] = result.f_star;
        out["f_star_approximate"] = result.f_star_approximate;
        out["series"] = series;
        out["files"] = out_dir ? emit_plot_data(result, config, *out_dir) : std::vector<std::filesystem::path>{};
        return out;
      },
      py::arg("config_json"), py::arg("out_dir") = py::none(),
      "Runs an experiment grid; writes CSVs and the manifest when out_dir is given.");
}
