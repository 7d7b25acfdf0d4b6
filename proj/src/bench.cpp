#include "cliqueopt/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

using nlohmann::json;

double SeededUniform::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SeededUniform::next(double lo, double hi) { return lo + (hi - lo) * next(); }

std::vector<std::vector<NodeId>> allocation_cliques_one_based() {
  return {{1, 2, 3, 4, 5, 6}, {5, 6, 7, 8, 9}, {8, 9, 10, 11, 12}, {9, 10, 13, 14, 15, 16, 17, 18, 19, 20}};
}

Problem generate_allocation_problem(std::uint64_t seed) {
  constexpr std::size_t n = 20;
  std::vector<std::vector<NodeId>> cliques;
  for (const auto& c : allocation_cliques_one_based()) {
    std::vector<NodeId> zero_based;
    for (NodeId v : c) zero_based.push_back(v - 1);
    cliques.push_back(std::move(zero_based));
  }
  Graph graph = Graph::from_cliques(n, cliques);

  SeededUniform rng(seed);
  Vector a(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) a[static_cast<Eigen::Index>(i)] = rng.next(0.0, 10.0);

  // Blocks are attached by member set, so they land on the right clique
  // whatever the canonical order is.
  const auto canonical = canonical_clique_order(cliques);
  std::vector<ConstraintBlock> blocks;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const auto it = std::find(canonical.begin(), canonical.end(), cliques[c]);
    const auto l = static_cast<std::size_t>(it - canonical.begin());
    blocks.push_back({l, ConvexSet::sum_equality(kAllocationTargets[c], cliques[c].size())});
  }
  Problem problem = make_problem(std::move(graph), Objective::squared_distance(a, 1), std::move(blocks));
  if (problem.op.cover().cliques != canonical) {
    throw NumericError("allocation benchmark: clique enumeration disagrees with the community list");
  }
  return problem;
}

std::string SeriesSpec::method() const {
  if (full_projection) return algorithm == Algorithm::kAcpgd ? "apgd" : "pgd";
  return to_string(algorithm);
}

StepSchedule SeriesSpec::resolve_schedule(double L) const {
  return schedule ? *schedule : StepSchedule::fixed(1.0 / L);
}

std::string SeriesSpec::label(double L) const {
  const std::string step = resolve_schedule(L).describe();
  if (full_projection) return method() + "_" + step;
  return method() + "_p" + std::to_string(p) + "_" + step;
}

SeriesSpec parse_series(const std::string& method, const std::optional<std::string>& step, std::size_t p) {
  SeriesSpec spec;
  if (method == "cpgd") {
    spec.algorithm = Algorithm::kCpgd;
  } else if (method == "acpgd") {
    spec.algorithm = Algorithm::kAcpgd;
  } else if (method == "pgd") {
    spec.algorithm = Algorithm::kPgd;
    spec.full_projection = true;
  } else if (method == "apgd") {
    spec.algorithm = Algorithm::kAcpgd;
    spec.full_projection = true;
  } else {
    throw InputError("unknown algorithm '" + method + "' (expected cpgd, acpgd, pgd or apgd)");
  }
  if (p == 0) throw InputError("grid entry: p must be at least 1");
  spec.p = spec.full_projection ? 1 : p;
  if (step) spec.schedule = StepSchedule::parse(*step);
  if (spec.algorithm == Algorithm::kAcpgd && spec.schedule && !spec.schedule->is_fixed()) {
    throw InputError("grid entry: accelerated methods need a fixed step");
  }
  return spec;
}

std::vector<SeriesSpec> default_grid() {
  std::vector<SeriesSpec> grid;
  for (std::size_t p : {1, 10, 50}) {
    grid.push_back(parse_series("cpgd", "invk:1", p));
    grid.push_back(parse_series("cpgd", "fixed:0.001", p));
    grid.push_back(parse_series("acpgd", "fixed:0.001", p));
  }
  grid.push_back(parse_series("pgd", "invk:1", 1));
  grid.push_back(parse_series("pgd", "fixed:0.001", 1));
  grid.push_back(parse_series("apgd", "fixed:0.001", 1));
  return grid;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(what + ": expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = to_vector(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(what + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<NodeId> to_nodes(const json& j, std::size_t n, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array of node ids");
  std::vector<NodeId> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1 || static_cast<std::size_t>(v.get<long long>()) > n) {
      throw InputError(what + ": node ids must be integers in 1.." + std::to_string(n));
    }
    out.push_back(static_cast<NodeId>(v.get<long long>() - 1));
  }
  return out;
}

std::size_t require_n(const json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1) {
    throw InputError("graph: 'n' must be a positive integer");
  }
  return static_cast<std::size_t>(j["n"].get<long long>());
}

ConvexSet parse_set(const json& j, std::size_t dim, std::size_t members, std::size_t d) {
  const std::string kind = get_or<std::string>(j, "kind", "");
  if (kind == "sum_eq") {
    if (!j.contains("target")) throw InputError("sum_eq block needs 'target'");
    return ConvexSet::sum_equality(j["target"].get<double>(), dim);
  }
  if (kind == "affine_eq") {
    if (!j.contains("A") || !j.contains("b")) throw InputError("affine_eq block needs 'A' and 'b'");
    return ConvexSet::affine(to_matrix(j["A"], "affine_eq.A"), to_vector(j["b"], "affine_eq.b"));
  }
  if (kind == "ball") {
    if (!j.contains("radius")) throw InputError("ball block needs 'radius'");
    Vector center = j.contains("center") ? to_vector(j["center"], "ball.center")
                                         : Vector::Zero(static_cast<Eigen::Index>(dim));
    return ConvexSet::ball(std::move(center), j["radius"].get<double>());
  }
  if (kind == "halfspace") {
    if (!j.contains("a") || !j.contains("b")) throw InputError("halfspace block needs 'a' and 'b'");
    return ConvexSet::halfspace(to_vector(j["a"], "halfspace.a"), j["b"].get<double>());
  }
  if (kind == "box") {
    if (!j.contains("lo") || !j.contains("hi")) throw InputError("box block needs 'lo' and 'hi'");
    return ConvexSet::box(to_vector(j["lo"], "box.lo"), to_vector(j["hi"], "box.hi"));
  }
  if (kind == "consensus") return ConvexSet::consensus(members, d);
  if (kind == "free") return ConvexSet::free(dim);
  throw InputError("unknown constraint kind '" + kind + "'");
}

Objective parse_objective(const json& j, std::size_t n, std::size_t d) {
  std::optional<double> L;
  if (j.contains("L")) L = j["L"].get<double>();
  if (j.contains("a")) {
    const Vector a = to_vector(j["a"], "objective.a");
    if (static_cast<std::size_t>(a.size()) != n * d) {
      throw InputError("objective.a must have n*d = " + std::to_string(n * d) + " entries");
    }
    const auto dd = static_cast<Eigen::Index>(d);
    std::vector<AgentTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
      terms.emplace_back(QuadraticTerm{Matrix::Identity(dd, dd), a.segment(static_cast<Eigen::Index>(i) * dd, dd)});
    }
    return Objective(std::move(terms), d, L);
  }
  if (j.contains("terms")) {
    if (!j["terms"].is_array() || j["terms"].size() != n) {
      throw InputError("objective.terms must list one term per node");
    }
    std::vector<AgentTerm> terms;
    for (const auto& t : j["terms"]) {
      terms.emplace_back(QuadraticTerm{to_matrix(t.at("Q"), "objective.Q"), to_vector(t.at("a"), "objective.a")});
    }
    return Objective(std::move(terms), d, L);
  }
  throw InputError("objective needs 'a' or 'terms'");
}

}  // namespace

Graph parse_graph(const json& j) {
  if (!j.is_object()) throw InputError("graph: expected a JSON object");
  const std::size_t n = require_n(j);
  if (j.contains("cliques")) {
    std::vector<std::vector<NodeId>> given;
    for (const auto& c : j["cliques"]) given.push_back(to_nodes(c, n, "cliques"));
    Graph g = Graph::from_cliques(n, given);
    if (canonical_clique_order(given) != maximal_cliques(g).cliques) {
      throw InputError("graph: the listed cliques are not exactly the maximal cliques of the graph they induce");
    }
    return g;
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      const auto pair = to_nodes(e, n, "edges");
      if (pair.size() != 2) throw InputError("edges: each edge must have two endpoints");
      edges.emplace_back(pair[0], pair[1]);
    }
  }
  return Graph(n, edges);
}

Problem build_problem(const json& j) {
  if (!j.is_object()) throw InputError("problem: expected a JSON object");
  if (j.contains("generator")) {
    const std::string name = j["generator"].get<std::string>();
    if (name != "allocation") throw InputError("unknown problem generator '" + name + "'");
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
      throw InputError("generated problems need an unsigned integer 'seed'");
    }
    return generate_allocation_problem(j["seed"].get<std::uint64_t>());
  }
  Graph graph = parse_graph(j);
  const std::size_t n = graph.size();
  const std::size_t d = get_or<std::size_t>(j, "d", 1);
  if (d == 0) throw InputError("problem: d must be positive");
  if (!j.contains("objective")) throw InputError("problem: missing 'objective'");
  Objective objective = parse_objective(j["objective"], n, d);

  const CliqueCover cover = maximal_cliques(graph);
  // "clique" indices refer to the given clique list when there is one.
  std::vector<std::vector<NodeId>> listed;
  if (j.contains("cliques")) {
    for (const auto& c : j["cliques"]) {
      auto nodes = to_nodes(c, n, "cliques");
      std::sort(nodes.begin(), nodes.end());
      listed.push_back(std::move(nodes));
    }
  } else {
    listed = cover.cliques;
  }
  std::vector<ConstraintBlock> blocks;
  for (const auto& b : j.value("constraints", json::array())) {
    std::vector<NodeId> members;
    if (b.contains("members")) {
      members = to_nodes(b["members"], n, "constraint members");
      std::sort(members.begin(), members.end());
    } else if (b.contains("clique")) {
      const auto idx = b["clique"].get<long long>();
      if (idx < 1 || static_cast<std::size_t>(idx) > listed.size()) {
        throw InputError("constraint clique index " + std::to_string(idx) + " out of range 1.." +
                         std::to_string(listed.size()));
      }
      members = listed[static_cast<std::size_t>(idx - 1)];
    } else {
      throw InputError("constraint block needs 'clique' or 'members'");
    }
    const auto it = std::find(cover.cliques.begin(), cover.cliques.end(), members);
    if (it == cover.cliques.end()) throw InputError("constraint block members do not form a maximal clique");
    const auto l = static_cast<std::size_t>(it - cover.cliques.begin());
    blocks.push_back({l, parse_set(b, members.size() * d, members.size(), d)});
  }
  return make_problem(std::move(graph), std::move(objective), std::move(blocks));
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  ExperimentConfig config;
  if (!j.contains("problem")) throw InputError("config: missing 'problem'");
  config.problem = j["problem"];
  if (j.contains("seed")) config.problem["seed"] = j["seed"];
  if (config.problem.contains("generator") && !config.problem.contains("seed")) {
    throw InputError("config: generated problems need a seed");
  }
  if (j.contains("grid")) {
    if (!j["grid"].is_array()) throw InputError("config: 'grid' must be an array");
    for (const auto& g : j["grid"]) {
      const std::string algo = get_or<std::string>(g, "algorithm", "");
      std::optional<std::string> step;
      if (g.contains("step")) step = g["step"].get<std::string>();
      config.grid.push_back(parse_series(algo, step, get_or<std::size_t>(g, "p", 1)));
    }
  } else {
    config.grid = default_grid();
  }
  config.max_iters = get_or<std::size_t>(j, "max_iters", config.max_iters);
  config.record_every = get_or<std::size_t>(j, "record_every", config.record_every);
  config.out_dir = get_or<std::string>(j, "out", config.out_dir.string());
  config.threads = get_or<std::size_t>(j, "threads", config.threads);
  if (config.record_every == 0) throw InputError("config: record_every must be positive");
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& config) {
  json grid = json::array();
  for (const auto& s : config.grid) {
    json entry = {{"algorithm", s.method()}, {"p", s.p}};
    entry["step"] = s.schedule ? json(s.schedule->describe()) : json("fixed:1/L");
    grid.push_back(entry);
  }
  return {{"problem", config.problem},
          {"grid", grid},
          {"max_iters", config.max_iters},
          {"record_every", config.record_every}};
}

json to_json(const KktSolution& sol) {
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"x_star", vec(sol.x_star)},
          {"f_star", sol.f_star},
          {"multipliers", vec(sol.multipliers)},
          {"primal_residual", sol.primal_residual},
          {"dual_residual", sol.dual_residual}};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  if (config.grid.empty()) return result;
  if (config.problem.contains("seed")) result.seed = config.problem["seed"].get<std::uint64_t>();
  const Problem problem = build_problem(config.problem);
  const double L = problem.objective.smoothness();

  std::optional<Vector> x_star;
  try {
    result.kkt = solve_equality_qp(problem.objective, problem.op);
    result.f_star = result.kkt->f_star;
    x_star = result.kkt->x_star;
  } catch (const UnsupportedError&) {
    const auto approx = approximate_optimum(problem);
    result.f_star = approx.f;
    result.f_star_approximate = true;
  }
  if (!(result.f_star > 0.0)) {
    throw OracleError("relative gaps need f* > 0, got f* = " + format_double(result.f_star));
  }

  const bool any_baseline = std::any_of(config.grid.begin(), config.grid.end(),
                                        [](const SeriesSpec& s) { return s.full_projection; });
  const SetProjection project_D = any_baseline ? make_full_projection(problem.op) : SetProjection{};

  auto run_one = [&](const SeriesSpec& spec) {
    SolverConfig sc;
    sc.algorithm = spec.algorithm;
    sc.p = spec.p;
    sc.schedule = spec.resolve_schedule(L);
    sc.max_iters = config.max_iters;
    sc.record_every = config.record_every;
    sc.f_star = result.f_star;
    ResidualSeries series{spec, spec.label(L), {}};
    try {
      series.trace = spec.full_projection ? run_pgd(problem, project_D, sc) : run_solver(problem, sc);
    } catch (const NumericError& e) {
      throw NumericError(series.label + ": " + e.what());
    } catch (const OracleError& e) {
      throw OracleError(series.label + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(series.label + ": " + e.what());
    }
    return series;
  };

  const std::size_t workers = std::max<std::size_t>(1, config.threads);
  for (std::size_t start = 0; start < config.grid.size(); start += workers) {
    std::vector<std::future<ResidualSeries>> batch;
    for (std::size_t i = start; i < std::min(config.grid.size(), start + workers); ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_one,
                                 std::cref(config.grid[i])));
    }
    for (auto& f : batch) result.series.push_back(f.get());
  }
  return result;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void write_series_csv(const ResidualSeries& series, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "k,f,V,J,rel_gap\n";
  for (const auto& r : series.trace.records) {
    out << r.k << ',' << format_double(r.f) << ',' << format_double(r.V) << ',' << optional_cell(r.J) << ','
        << optional_cell(r.rel_gap) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::filesystem::path> emit_plot_data(const ExperimentResult& result, const ExperimentConfig& config,
                                                  const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (result.series.empty()) return written;
  std::error_code ec;
  std::filesystem::create_directories(dir / "series", ec);
  if (ec) throw IoError("cannot create " + (dir / "series").string() + ": " + ec.message());

  for (const auto& s : result.series) {
    const auto path = dir / "series" / (s.label + ".csv");
    write_series_csv(s, path);
    written.push_back(path);
  }

  // One panel per p for the clique methods, one for the centralized baselines.
  std::map<std::string, std::vector<const ResidualSeries*>> panels;
  for (const auto& s : result.series) {
    const std::string key = s.spec.full_projection ? "panel_pgd" : "panel_p" + std::to_string(s.spec.p);
    panels[key].push_back(&s);
  }
  json panel_index = json::object();
  for (const auto& [name, members] : panels) {
    std::set<std::size_t> ks;
    std::vector<std::map<std::size_t, double>> columns;
    for (const auto* s : members) {
      std::map<std::size_t, double> col;
      for (const auto& r : s->trace.records) {
        ks.insert(r.k);
        if (r.rel_gap) col[r.k] = *r.rel_gap;
      }
      columns.push_back(std::move(col));
    }
    const auto path = dir / (name + ".csv");
    auto out = open_for_write(path);
    out << 'k';
    json labels = json::array();
    for (const auto* s : members) {
      out << ',' << s->label;
      labels.push_back(s->label);
    }
    out << '\n';
    for (std::size_t k : ks) {
      out << k;
      for (const auto& col : columns) {
        out << ',';
        if (auto it = col.find(k); it != col.end()) out << format_double(it->second);
      }
      out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
    panel_index[name + ".csv"] = labels;
    written.push_back(path);
  }

  json manifest;
  manifest["seed"] = result.seed ? json(*result.seed) : json(nullptr);
  manifest["f_star"] = result.f_star;
  manifest["f_star_approximate"] = result.f_star_approximate;
  manifest["config_hash"] = fnv1a_hex(to_json(config).dump());
  manifest["config"] = to_json(config);
  manifest["panels"] = panel_index;
  if (result.kkt) manifest["kkt"] = to_json(*result.kkt);
  const auto path = dir / "manifest.json";
  auto out = open_for_write(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
  written.push_back(path);
  return written;
}

}  // namespace cliqueopt
