#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/errors.hpp"

using namespace cliqueopt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cliqueopt_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig config = parse_experiment_config({{"problem", {{"generator", "allocation"}}}, {"seed", seed}});
  config.max_iters = 200;
  return config;
}

}  // namespace

TEST(Allocation, ProblemShape) {
  const Problem problem = generate_allocation_problem(42);
  EXPECT_EQ(problem.agents(), 20u);
  EXPECT_EQ(problem.agent_dim(), 1u);
  EXPECT_EQ(kAllocationTargets, (std::vector<double>{7, 3, 5, 10}));
  ASSERT_EQ(problem.op.clique_count(), 4u);
  EXPECT_DOUBLE_EQ(problem.op.cover().weights[8], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(problem.objective.smoothness(), 1.0);
  for (const auto& term : problem.objective.terms()) {
    const double a = std::get<QuadraticTerm>(term).a[0];
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 10.0);
  }
  for (std::size_t l = 0; l < 4; ++l) {
    const auto& s = std::get<SumEquality>(problem.op.set(l).spec());
    EXPECT_DOUBLE_EQ(s.target, kAllocationTargets[l]);
  }
}

TEST(Allocation, SeedsAreReproducible) {
  const Vector a = generate_allocation_problem(7).objective.gradient(Vector::Zero(20));
  EXPECT_EQ(a, generate_allocation_problem(7).objective.gradient(Vector::Zero(20)));
  EXPECT_NE(a, generate_allocation_problem(8).objective.gradient(Vector::Zero(20)));
  SeededUniform u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Bench, HashAndFormatting) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Bench, DefaultGridMirrorsThePaperPanels) {
  const auto grid = default_grid();
  EXPECT_EQ(grid.size(), 12u);
  std::set<std::string> labels;
  for (const auto& s : grid) labels.insert(s.label(1.0));
  EXPECT_TRUE(labels.count("cpgd_p50_invk:1"));
  EXPECT_TRUE(labels.count("acpgd_p10_fixed:0.001"));
  EXPECT_TRUE(labels.count("apgd_fixed:0.001"));
  EXPECT_THROW(parse_series("newton", std::nullopt, 1), InputError);
  EXPECT_THROW(parse_series("acpgd", std::string("invk:1"), 1), InputError);
  EXPECT_THROW(parse_series("cpgd", std::string("fixed:0.1"), 0), InputError);
}

TEST(Bench, ConfigValidation) {
  EXPECT_THROW(parse_experiment_config(json::object()), InputError);
  EXPECT_THROW(parse_experiment_config({{"problem", {{"generator", "allocation"}}}}), InputError);
  EXPECT_THROW(parse_experiment_config({{"problem", {{"generator", "allocation"}}}, {"seed", 1}, {"grid", 3}}),
               InputError);
  EXPECT_THROW(build_problem({{"generator", "traffic"}, {"seed", 1}}), InputError);
}

TEST(Bench, InlineProblemWithCliqueList) {
  const json spec = json::parse(R"({
    "n": 3, "d": 1, "cliques": [[2, 3], [1, 2]],
    "objective": {"a": [1, 2, 3]},
    "constraints": [{"clique": 1, "kind": "sum_eq", "target": 4},
                    {"members": [1, 2], "kind": "consensus"}]
  })");
  const Problem problem = build_problem(spec);
  EXPECT_EQ(problem.op.cover().cliques, (std::vector<std::vector<NodeId>>{{0, 1}, {1, 2}}));
  EXPECT_EQ(problem.op.set(1).kind(), "sum_eq");
  EXPECT_EQ(problem.op.set(0).kind(), "consensus");

  json bad = spec;
  bad["cliques"] = {{1, 2}, {2, 3}, {1, 3}};
  EXPECT_THROW(build_problem(bad), InputError);
  bad = spec;
  bad["constraints"][0]["clique"] = 9;
  EXPECT_THROW(build_problem(bad), InputError);
  bad = spec;
  bad["edges"] = {{1, 4}};
  bad.erase("cliques");
  EXPECT_THROW(build_problem(bad), InputError);
}

TEST(Bench, EmptyGridWritesNothing) {
  ExperimentConfig config = small_config(1);
  config.grid.clear();
  const ExperimentResult result = run_experiment(config);
  EXPECT_TRUE(result.series.empty());
  const fs::path dir = scratch_dir("empty");
  EXPECT_TRUE(emit_plot_data(result, config, dir).empty());
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Bench, DefaultGridProducesFourPanelsAndReproducibleBytes) {
  const ExperimentConfig config = small_config(3);
  const fs::path first = scratch_dir("run_a");
  const fs::path second = scratch_dir("run_b");
  const auto files = emit_plot_data(run_experiment(config), config, first);
  emit_plot_data(run_experiment(config), config, second);
  for (const char* panel : {"panel_p1.csv", "panel_p10.csv", "panel_p50.csv", "panel_pgd.csv"}) {
    EXPECT_TRUE(fs::exists(first / panel)) << panel;
  }
  EXPECT_EQ(files.size(), 12u + 4u + 1u);
  for (const auto& f : files) {
    const fs::path rel = fs::relative(f, first);
    ASSERT_EQ(slurp(f), slurp(second / rel)) << rel;
  }
  const json manifest = json::parse(slurp(first / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_GT(manifest["f_star"].get<double>(), 0.0);
  EXPECT_FALSE(manifest["f_star_approximate"].get<bool>());
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  const std::string header = slurp(first / "panel_p1.csv").substr(0, 60);
  EXPECT_EQ(header.rfind("k,cpgd_p1_invk:1,cpgd_p1_fixed:0.001,acpgd_p1_fixed:0.001\n", 0), 0u);
}

TEST(Bench, SingleSeriesGivesTwoColumnPanel) {
  ExperimentConfig config = small_config(1);
  config.grid = {parse_series("cpgd", std::string("invk:1"), 10)};
  config.max_iters = 5;
  const fs::path dir = scratch_dir("single");
  emit_plot_data(run_experiment(config), config, dir);
  std::istringstream panel(slurp(dir / "panel_p10.csv"));
  std::string line;
  std::getline(panel, line);
  EXPECT_EQ(line, "k,cpgd_p10_invk:1");
  std::size_t rows = 0;
  while (std::getline(panel, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 1);
  }
  EXPECT_EQ(rows, 6u);
}

TEST(Bench, UnwritableDirectoryIsAnIoError) {
  ExperimentConfig config = small_config(1);
  config.grid = {parse_series("cpgd", std::nullopt, 1)};
  config.max_iters = 2;
  const fs::path blocker = scratch_dir("blocker");
  std::ofstream(blocker.string()) << "x";
  EXPECT_THROW(emit_plot_data(run_experiment(config), config, blocker / "out"), IoError);
  fs::remove(blocker);
}

TEST(Bench, ApproximateOptimumIsUsedForBallConstraints) {
  const json spec = json::parse(R"({
    "problem": {"n": 2, "edges": [[1, 2]], "objective": {"a": [3, 4]},
                "constraints": [{"clique": 1, "kind": "ball", "radius": 1}]},
    "grid": [{"algorithm": "cpgd", "step": "fixed:1", "p": 1}],
    "max_iters": 20
  })");
  ExperimentConfig config = parse_experiment_config(spec);
  const ExperimentResult result = run_experiment(config);
  EXPECT_TRUE(result.f_star_approximate);
  EXPECT_NEAR(result.f_star, 8.0, 1e-8);  // 1/2 ||(3,4) - (0.6,0.8)||^2
}
