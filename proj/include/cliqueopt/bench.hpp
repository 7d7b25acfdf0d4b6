#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cliqueopt/oracle.hpp"
#include "cliqueopt/problem.hpp"
#include "cliqueopt/solver.hpp"

namespace cliqueopt {

/// Portable uniform draws: mt19937_64 words mapped to [0,1) through the top 53 bits,
/// so a seed gives the same numbers on every platform.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}
  double next();                         ///< [0, 1)
  double next(double lo, double hi);     ///< [lo, hi)

 private:
  std::mt19937_64 engine_;
};

/// Targets of the four community constraints in the allocation benchmark.
inline const std::vector<double> kAllocationTargets = {7.0, 3.0, 5.0, 10.0};

/// 1-based clique lists of the 20-node benchmark network.
std::vector<std::vector<NodeId>> allocation_cliques_one_based();

/// n = 20, d = 1, f_i = 1/2 (x_i - a_i)^2 with a_i ~ U[0, 10) from `seed`,
/// and one sum constraint per community.
Problem generate_allocation_problem(std::uint64_t seed);

/// One line of an experiment grid.
struct SeriesSpec {
  Algorithm algorithm = Algorithm::kCpgd;
  bool full_projection = false;            ///< PGD baselines (plain or accelerated)
  std::optional<StepSchedule> schedule;    ///< unset: fixed step 1/L
  std::size_t p = 1;

  /// "cpgd", "acpgd", "pgd" or "apgd".
  std::string method() const;
  std::string label(double L) const;
  StepSchedule resolve_schedule(double L) const;
};

SeriesSpec parse_series(const std::string& method, const std::optional<std::string>& step, std::size_t p);

/// CPGD with 1/k and 0.001, ACPGD with 0.001, each for p in {1, 10, 50};
/// then PGD with 1/k and 0.001 and accelerated PGD with 0.001.
std::vector<SeriesSpec> default_grid();

struct ExperimentConfig {
  nlohmann::json problem;  ///< inline problem or {"generator": ..., "seed": ...}
  std::vector<SeriesSpec> grid;
  std::size_t max_iters = 10000;
  std::size_t record_every = 1;
  std::filesystem::path out_dir = "results";
  std::size_t threads = 1;
};

/// Validates the JSON and fills defaults. Throws InputError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON form of a config (what the manifest hash covers).
nlohmann::json to_json(const ExperimentConfig& config);

/// Graph from {"n", "edges"} or {"n", "cliques"} (1-based). A clique list is
/// checked against the re-enumerated maximal cliques.
Graph parse_graph(const nlohmann::json& j);

/// Builds a problem from its JSON description or generator reference.
Problem build_problem(const nlohmann::json& j);

nlohmann::json to_json(const KktSolution& sol);

struct ResidualSeries {
  SeriesSpec spec;
  std::string label;
  Trace trace;
};

struct ExperimentResult {
  std::vector<ResidualSeries> series;
  double f_star = 0.0;
  bool f_star_approximate = false;
  std::optional<KktSolution> kkt;
  std::optional<std::uint64_t> seed;
};

/// Runs every grid entry against f* from the KKT oracle (or the approximate
/// fallback). Files are not written here.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Columns k, f, V, J, rel_gap (J empty for diminishing steps).
void write_series_csv(const ResidualSeries& series, const std::filesystem::path& path);

/// Per-panel CSVs (k, then one rel_gap column per series) plus manifest.json.
/// Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const ExperimentResult& result, const ExperimentConfig& config,
                                                  const std::filesystem::path& dir);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// "%.17g"
std::string format_double(double v);

}  // namespace cliqueopt
