#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cliqueopt/bench.hpp"
#include "cliqueopt/checks/acceptance.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/simnet.hpp"
#include "json.hpp"

namespace {

using namespace cliqueopt;
using nlohmann::json;

int verbosity = 0;

void log(int level, const std::string& message) {
  if (level <= verbosity) std::cerr << message << '\n';
}

struct RunOptions {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algo;
  std::optional<std::size_t> p;
  std::optional<std::string> step;
  std::optional<std::size_t> iters;
  std::optional<std::size_t> threads;
};

ExperimentConfig load_with_overrides(const RunOptions& o) {
  ExperimentConfig config = load_experiment_config(o.config);
  if (o.seed) config.problem["seed"] = *o.seed;
  if (o.algo) config.grid = {parse_series(*o.algo, o.step, o.p.value_or(1))};
  if (o.p || o.step) {
    for (auto& s : config.grid) {
      const auto kept = s.schedule;
      s = parse_series(s.method(), o.step, o.p.value_or(s.p));
      if (!o.step) s.schedule = kept;
    }
  }
  if (o.iters) config.max_iters = *o.iters;
  if (o.out) config.out_dir = *o.out;
  if (o.threads) config.threads = *o.threads;
  return config;
}

int cmd_run(const RunOptions& o) {
  const ExperimentConfig config = load_with_overrides(o);
  if (config.grid.empty()) {
    log(0, "warning: the algorithm grid is empty; nothing to run");
    return 0;
  }
  log(1, "running " + std::to_string(config.grid.size()) + " series for " + std::to_string(config.max_iters) +
             " iterations");
  const ExperimentResult result = run_experiment(config);
  log(1, std::string("f* = ") + format_double(result.f_star) + (result.f_star_approximate ? " (approximate)" : ""));
  for (const auto& s : result.series) {
    const auto& last = s.trace.records.back();
    char line[256];
    std::snprintf(line, sizeof line, "%-28s k=%zu rel_gap=%.3e V=%.3e", s.label.c_str(), last.k,
                  last.rel_gap.value_or(0.0), last.V);
    log(0, line);
  }
  for (const auto& path : emit_plot_data(result, config, config.out_dir)) log(2, "wrote " + path.string());
  log(0, "results in " + config.out_dir.string());
  return 0;
}

struct SimulateOptions {
  RunOptions run;
  std::optional<std::string> message_log;
  std::size_t workers = 1;
};

int cmd_simulate(const SimulateOptions& o) {
  ExperimentConfig config = load_with_overrides(o.run);
  const Problem problem = build_problem(config.problem);
  if (config.grid.empty()) {
    log(0, "warning: the algorithm grid is empty; nothing to run");
    return 0;
  }
  const SeriesSpec& spec = config.grid.front();
  if (spec.full_projection) throw InputError("simulate: only cpgd and acpgd run as agents");
  if (config.grid.size() > 1) {
    log(0, "warning: simulating only the first grid entry, " + spec.label(problem.objective.smoothness()));
  }
  SolverConfig sc;
  sc.algorithm = spec.algorithm;
  sc.p = spec.p;
  sc.schedule = spec.resolve_schedule(problem.objective.smoothness());
  sc.max_iters = config.max_iters;
  sc.record_every = config.record_every;
  std::ofstream log_file;
  SimnetOptions options;
  options.threads = o.workers;
  if (o.message_log) {
    log_file.open(*o.message_log);
    if (!log_file) throw IoError("cannot write " + *o.message_log);
    options.message_log = &log_file;
  }
  const DistributedRun run = run_distributed_cpgd(problem, problem.op.cover(), sc, options);
  const LocalityReport report = locality_audit(run, problem.graph);
  json out = {{"iterations", run.trace.iterations},
              {"messages_per_iteration", run.messages_per_iteration.empty() ? 0 : run.messages_per_iteration.front()},
              {"edges", problem.graph.edge_count()},
              {"final_f", run.trace.records.back().f},
              {"final_V", run.trace.records.back().V},
              {"non_neighbour_reads", report.violating_reads}};
  std::cout << out.dump(2) << '\n';
  return report.clean() ? 0 : 3;
}

int cmd_verify() {
  std::size_t failed = 0;
  checks::run_acceptance([&](const checks::CriterionResult& r) {
    std::cout << checks::format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  });
  std::cout << failed << " of 8 criteria failed" << std::endl;
  return failed == 0 ? 0 : 1;
}

int cmd_cliques(const std::string& path, bool as_json) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (j.contains("graph")) {
    j = j["graph"];
  } else if (j.contains("problem")) {
    j = j["problem"];
  }
  const Graph g = j.contains("generator") ? build_problem(j).graph : parse_graph(j);
  const CliqueCover cover = maximal_cliques(g);
  json cliques = json::array();
  for (const auto& c : cover.cliques) {
    json members = json::array();
    for (NodeId v : c) members.push_back(v + 1);
    cliques.push_back(members);
  }
  if (as_json) {
    std::cout << json{{"cliques", cliques}, {"gamma", cover.weights}}.dump() << '\n';
    return 0;
  }
  for (std::size_t l = 0; l < cliques.size(); ++l) std::cout << "C" << l + 1 << ": " << cliques[l].dump() << '\n';
  for (NodeId i = 0; i < g.size(); ++i) {
    std::cout << "gamma_" << i + 1 << " = " << format_double(cover.weights[i]) << '\n';
  }
  return 0;
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (default: config 'out' or ./results)");
  cmd->add_option("--seed", o.seed, "seed for generated problems");
  cmd->add_option("--algo", o.algo, "run a single method instead of the grid")
      ->check(CLI::IsMember({"cpgd", "acpgd", "pgd", "apgd"}));
  cmd->add_option("--p", o.p, "inner projection rounds per iteration")->check(CLI::PositiveNumber);
  cmd->add_option("--step", o.step, "fixed:<t> | invk:<c> | invsqrtk:<c>");
  cmd->add_option("--iters", o.iters, "iteration budget");
  cmd->add_option("--threads", o.threads, "grid entries run concurrently")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clique-based projected gradient descent: experiments, simulation and verification"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbosity, "more log output (repeatable)");

  RunOptions run_options;
  auto* run = app.add_subcommand("run", "run an experiment grid and write CSV traces");
  add_run_flags(run, run_options);

  SimulateOptions sim_options;
  auto* simulate = app.add_subcommand("simulate", "run the first grid entry as message-passing agents");
  add_run_flags(simulate, sim_options.run);
  simulate->add_option("--message-log", sim_options.message_log, "write every delivered message as a JSON line");
  simulate->add_option("--workers", sim_options.workers, "agent worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  std::string graph_path;
  bool as_json = false;
  auto* cliques = app.add_subcommand("cliques", "print maximal cliques and weights of a graph");
  cliques->add_option("--graph", graph_path, "graph JSON: {n, edges} or {n, cliques}")->required();
  cliques->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_options);
    if (*simulate) return cmd_simulate(sim_options);
    if (*verify) return cmd_verify();
    if (*cliques) return cmd_cliques(graph_path, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
