#include "cliqueopt/checks/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/checks/instances.hpp"
#include "cliqueopt/checks/oracles.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/oracle.hpp"
#include "cliqueopt/simnet.hpp"
#include "cliqueopt/solver.hpp"

namespace cliqueopt::checks {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kSlack = 1e-9;

template <class... Args>
std::string strf(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Smallest observed value of (rhs - lhs) per named inequality.
class SlackTable {
 public:
  void record(const std::string& name, double slack) {
    auto [it, inserted] = worst_.try_emplace(name, slack);
    if (!inserted) it->second = std::min(it->second, slack);
    ++counts_[name];
  }
  bool all_at_least(double floor) const {
    return std::all_of(worst_.begin(), worst_.end(), [&](const auto& kv) { return kv.second >= floor; });
  }
  std::string summary() const {
    std::string out;
    for (const auto& [name, worst] : worst_) {
      out += strf("%s min slack %.2e over %zu; ", name.c_str(), worst, counts_.at(name));
    }
    return out;
  }
  double worst(const std::string& name) const { return worst_.at(name); }

 private:
  std::map<std::string, double> worst_;
  std::map<std::string, std::size_t> counts_;
};

CriterionResult finish(int id, std::string title, bool passed, std::string detail, Clock::time_point start,
                       double budget) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.seconds = seconds_since(start);
  r.budget_seconds = budget;
  r.detail = std::move(detail);
  if (r.seconds > budget) r.detail += strf(" runtime %.1f s exceeds %.0f s;", r.seconds, budget);
  r.passed = passed && r.seconds <= budget;
  return r;
}

// ---------------------------------------------------------------------------
// Rate-bound battery shared by criteria 2, 3, 4 and 8.

constexpr std::size_t kBatterySize = 50;
constexpr std::size_t kBatteryIters = 1000;

RandomInstance battery_instance(std::size_t index) {
  Rng rng(20000 + index);
  InstanceOptions options;
  options.min_n = 2;
  options.max_n = 10;
  options.family = BlockFamily::kEquality;
  options.constrained_fraction = 0.8;
  options.random_quadratics = true;
  return random_instance(options, rng);
}

struct BatteryRun {
  KktSolution kkt;
  Trace trace;
  double t = 0.0;
};

std::vector<BatteryRun> run_battery(Algorithm algorithm) {
  std::vector<BatteryRun> runs;
  for (std::size_t i = 0; i < kBatterySize; ++i) {
    const RandomInstance inst = battery_instance(i);
    const Problem& problem = inst.problem;
    Rng rng(30000 + i);
    BatteryRun run;
    run.kkt = solve_equality_qp(problem.objective, problem.op);
    run.t = 1.0 / problem.objective.smoothness();
    SolverConfig config;
    config.algorithm = algorithm;
    config.p = 1;
    config.schedule = StepSchedule::fixed(run.t);
    config.max_iters = kBatteryIters;
    config.diagnostics_hk = algorithm == Algorithm::kCpgd;
    config.x0 = rng.normal_vector(problem.total_dim(), 3.0);
    config.f_star = run.kkt.f_star;
    config.x_star = run.kkt.x_star;
    run.trace = run_solver(problem, config);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::optional<std::vector<BatteryRun>>& cached_cpgd_battery() {
  static std::optional<std::vector<BatteryRun>> cache;
  return cache;
}

CriterionResult check_rate_bound(int id, Algorithm algorithm, const char* title) {
  const auto start = Clock::now();
  std::vector<BatteryRun> runs = run_battery(algorithm);
  std::size_t violating = 0;
  std::size_t checked = 0;
  double worst_ratio = 0.0;
  std::string first;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& trace = runs[i].trace;
    for (const auto& r : trace.records) {
      if (!r.bound || !r.J) continue;
      ++checked;
      worst_ratio = std::max(worst_ratio, (*r.J - runs[i].kkt.f_star) / *r.bound);
    }
    if (trace.first_bound_violation) {
      if (violating++ == 0) first = strf(" first: instance %zu at k=%zu;", i, *trace.first_bound_violation);
    }
  }
  const bool passed = violating == 0 && checked == kBatterySize * kBatteryIters;
  std::string detail = strf("%zu instances, %zu bound checks, %zu violating traces, max (J-f*)/bound = %.3g;",
                            runs.size(), checked, violating, worst_ratio) +
                       first;
  if (algorithm == Algorithm::kCpgd) cached_cpgd_battery() = std::move(runs);
  return finish(id, title, passed, detail, start, 20.0);
}

}  // namespace

// ---------------------------------------------------------------------------

CriterionResult check_operator_properties() {
  const auto start = Clock::now();
  SlackTable slack;
  std::size_t fd_failures = 0;
  std::size_t flagged_1d = 0;
  std::size_t infeasible_after_projection = 0;
  double worst_fd = 0.0;

  // Per-set inequalities with random positive weights.
  Rng rng(101);
  for (const auto& kind : family_kinds(BlockFamily::kMixed)) {
    for (int it = 0; it < 500; ++it) {
      const std::size_t members = rng.integer(1, 4);
      const std::size_t d = rng.integer(1, 3);
      const std::size_t dim = members * d;
      Vector witness = rng.normal_vector(dim, 1.5);
      if (kind == "consensus") {
        for (std::size_t m = 1; m < members; ++m) {
          witness.segment(static_cast<Eigen::Index>(m * d), static_cast<Eigen::Index>(d)) =
              witness.head(static_cast<Eigen::Index>(d));
        }
      }
      const ConvexSet set = random_set_containing(kind, members, d, witness, rng);
      Vector w(static_cast<Eigen::Index>(dim));
      for (std::size_t m = 0; m < members; ++m) {
        w.segment(static_cast<Eigen::Index>(m * d), static_cast<Eigen::Index>(d)).setConstant(rng.uniform(0.1, 1.0));
      }
      const WeightedNorm W(w);
      const WeightedProjector P(set, W);
      const Vector x = rng.normal_vector(dim, 3.0);
      const Vector y = rng.normal_vector(dim, 3.0);
      const Vector z = euclidean_projection(set, rng.normal_vector(dim, 3.0));
      const Vector px = P.project(x);
      const Vector py = P.project(y);
      slack.record("set nonexpansive", W(x - y) - W(px - py));
      slack.record("set quasi-nonexpansive", W(x - z) - W(px - z));
      slack.record("set firm", W.inner(x - y, px - py) - W.squared(px - py));
      slack.record("set obtuse angle", -W.inner(x - px, z - px));
      slack.record("set idempotence", 1e-10 - (P.project(px) - px).norm() + kSlack);
      if (set.violation(px) > kFeasibilityTol) ++infeasible_after_projection;
    }
  }

  // Operator-level properties on random graphs with mixed blocks.
  InstanceOptions options;
  options.family = BlockFamily::kMixed;
  std::size_t strict_checked = 0;
  for (std::size_t it = 0; it < 500; ++it) {
    Rng irng(5000 + it);
    const RandomInstance inst = random_instance(options, irng);
    const CliqueOperator& op = inst.problem.op;
    const std::size_t dim = op.total_dim();
    const Vector x = irng.normal_vector(dim, 3.0);
    const Vector y = irng.normal_vector(dim, 3.0);
    const Vector tx = op.apply(x);
    const Vector ty = op.apply(y);
    slack.record("T nonexpansive", (x - y).norm() - (tx - ty).norm());

    const double vx = op.potential(x);
    for (const Vector& z : sample_feasible_points(inst, 4, irng)) {
      const double vz = op.potential(z);
      if (vz <= 1e-20) slack.record("T fixed point", 1e-9 - (op.apply(z) - z).norm() + kSlack);
      if (vx >= 1e-6) {
        ++strict_checked;
        slack.record("T strict decrease", (x - z).norm() - (tx - z).norm());
      }
    }
    slack.record("V zero on D", 1e-18 - op.potential(inst.witness) + kSlack);
    if (op.violation(x) > 1e-6) slack.record("V positive off D", vx);
    if (vx > 0.0 && !(op.potential(op.apply_power(x, 200)) < 1e-3 * vx)) ++flagged_1d;

    const Vector gx = grad_V(op, x);
    const Vector gy = grad_V(op, y);
    const Vector fd = central_difference_gradient([&](const Vector& v) { return op.potential(v); }, x);
    const double fd_err = (gx - fd).norm() / (1.0 + gx.norm());
    worst_fd = std::max(worst_fd, fd_err);
    if (fd_err > 1e-5) ++fd_failures;
    slack.record("V 1-smooth", (x - y).norm() - (gx - gy).norm());
    const double a = irng.uniform();
    slack.record("V convex", a * vx + (1.0 - a) * op.potential(y) - op.potential(a * x + (1.0 - a) * y));
  }

  const bool strict_ok = slack.worst("T strict decrease") > 0.0;
  const bool passed = slack.all_at_least(-kSlack) && strict_ok && fd_failures == 0 && flagged_1d == 0 &&
                      infeasible_after_projection == 0;
  std::string detail = slack.summary();
  detail += strf("grad_V vs finite differences worst rel err %.2e (%zu over 1e-5); ", worst_fd, fd_failures);
  detail += strf("V(T^200 x) >= 1e-3 V(x) on %zu instances; ", flagged_1d);
  detail += strf("projections outside their set: %zu;", infeasible_after_projection);
  return finish(1, "operator property suite", passed, detail, start, 30.0);
}

CriterionResult check_cpgd_rate_bound() {
  return check_rate_bound(2, Algorithm::kCpgd, "CPGD rate bound ||x0-x*||^2/(2tk)");
}

CriterionResult check_acpgd_rate_bound() {
  return check_rate_bound(3, Algorithm::kAcpgd, "ACPGD rate bound 2||x0-x*||^2/(tk^2)");
}

CriterionResult check_hk_diagnostics() {
  const auto start = Clock::now();
  if (!cached_cpgd_battery()) cached_cpgd_battery() = run_battery(Algorithm::kCpgd);
  const auto& runs = *cached_cpgd_battery();
  SlackTable slack;
  std::size_t missing = 0;
  for (const auto& run : runs) {
    const auto& rec = run.trace.records;
    for (std::size_t j = 0; j < rec.size(); ++j) {
      if (rec[j].k == 0) continue;
      if (!rec[j].H || !rec[j].J) {
        ++missing;
        continue;
      }
      slack.record("sandwich f+V_t <= H_k", *rec[j].H - *rec[j].J);
      if (j + 1 < rec.size() && rec[j + 1].H) slack.record("H_{k+1} <= H_k", *rec[j].H - *rec[j + 1].H);
    }
  }
  const bool passed = missing == 0 && slack.all_at_least(-kSlack);
  return finish(4, "H_k diagnostics along CPGD traces", passed,
                slack.summary() + strf("records without H_k: %zu;", missing), start, 20.0);
}

CriterionResult check_complete_graph_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t compared = 0;
  std::string kinds;
  InstanceOptions options;
  options.min_n = 2;
  options.max_n = 8;
  options.family = BlockFamily::kMixed;
  options.constrained_fraction = 1.0;
  options.random_quadratics = true;
  options.complete_graph = true;
  for (std::size_t i = 0; i < 20; ++i) {
    Rng rng(40000 + i);
    const RandomInstance inst = random_instance(options, rng);
    const Problem& problem = inst.problem;
    kinds += std::string(problem.op.set(0).kind()) + (i + 1 < 20 ? "," : "; ");
    const double L = problem.objective.smoothness();
    SolverConfig config;
    config.algorithm = Algorithm::kCpgd;
    config.schedule = i % 2 == 0 ? StepSchedule::fixed(1.0 / L) : StepSchedule::inv_k(1.0 / L);
    config.max_iters = 200;
    config.keep_iterates = true;
    config.x0 = rng.normal_vector(problem.total_dim(), 3.0);
    const Trace cpgd = run_cpgd(problem, config);
    SolverConfig base = config;
    base.algorithm = Algorithm::kPgd;
    const Trace pgd = run_pgd(problem, make_full_projection(problem.op), base);
    for (std::size_t k = 0; k < cpgd.iterates.size(); ++k) {
      worst = std::max(worst, (cpgd.iterates[k] - pgd.iterates[k]).lpNorm<Eigen::Infinity>());
      ++compared;
    }
  }
  const bool passed = worst <= 1e-9 && compared == 20 * 201;
  return finish(5, "complete graph: CPGD equals PGD", passed,
                strf("20 problems, %zu iterates compared, max coordinate difference %.2e; block kinds ", compared,
                     worst) +
                    kinds,
                start, 60.0);
}

CriterionResult check_distributed_equivalence() {
  const auto start = Clock::now();
  const Problem problem = generate_allocation_problem(1);
  const std::size_t two_e = 2 * problem.graph.edge_count();
  double worst = 0.0;
  std::size_t bitwise_equal = 0;
  std::size_t total = 0;
  std::size_t count_mismatch = 0;
  std::size_t dirty_audits = 0;
  struct Case {
    Algorithm algorithm;
    StepSchedule schedule;
    std::size_t p;
    std::size_t threads;
  };
  std::vector<Case> cases;
  for (std::size_t p : {1, 10, 50}) {
    cases.push_back({Algorithm::kCpgd, StepSchedule::inv_k(1.0), p, 1});
    cases.push_back({Algorithm::kCpgd, StepSchedule::fixed(0.001), p, 1});
    cases.push_back({Algorithm::kAcpgd, StepSchedule::fixed(0.001), p, 1});
  }
  cases.push_back({Algorithm::kCpgd, StepSchedule::inv_k(1.0), 10, 4});
  cases.push_back({Algorithm::kAcpgd, StepSchedule::fixed(0.001), 10, 4});
  for (const auto& c : cases) {
    SolverConfig config;
    config.algorithm = c.algorithm;
    config.schedule = c.schedule;
    config.p = c.p;
    config.max_iters = 200;
    config.keep_iterates = true;
    const Trace central = run_solver(problem, config);
    SimnetOptions sim;
    sim.threads = c.threads;
    const DistributedRun dist = run_distributed_cpgd(problem, problem.op.cover(), config, sim);
    for (std::size_t k = 0; k < central.iterates.size(); ++k) {
      const Vector diff = central.iterates[k] - dist.trace.iterates[k];
      worst = std::max(worst, diff.lpNorm<Eigen::Infinity>());
      bitwise_equal += central.iterates[k] == dist.trace.iterates[k] ? 1 : 0;
      ++total;
    }
    if (dist.trace.iterates.size() != central.iterates.size()) ++count_mismatch;
    for (std::size_t m : dist.messages_per_iteration) count_mismatch += m == c.p * two_e ? 0 : 1;
    if (dist.messages_per_iteration.size() != config.max_iters) ++count_mismatch;
    if (!locality_audit(dist, problem.graph).clean()) ++dirty_audits;
  }
  const bool passed = worst <= 1e-12 && count_mismatch == 0 && dirty_audits == 0;
  return finish(6, "distributed run equals centralized, local reads only", passed,
                strf("%zu configs, %zu iterates, max difference %.2e, bitwise equal %zu/%zu; message-count "
                     "mismatches %zu (expected p*2|E| = p*%zu); audits with non-neighbour reads %zu;",
                     cases.size(), total, worst, bitwise_equal, total, count_mismatch, two_e, dirty_audits),
                start, 60.0);
}

CriterionResult check_allocation_experiment() {
  const auto start = Clock::now();
  constexpr std::size_t kIters = 10000;
  int violations_a = 0, violations_b = 0, violations_c = 0, violations_d = 0;
  std::string notes;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig config;
    config.problem = {{"generator", "allocation"}, {"seed", seed}};
    config.grid = default_grid();
    config.max_iters = kIters;
    const ExperimentResult result = run_experiment(config);
    std::map<std::string, const Trace*> by_label;
    for (const auto& s : result.series) by_label[s.label] = &s.trace;
    auto final_gap = [&](const std::string& label) { return *by_label.at(label)->records.back().rel_gap; };
    auto gap_at = [&](const std::string& label, std::size_t k) { return *by_label.at(label)->records.at(k).rel_gap; };

    bool a = true, b = true, c = true, d = true;
    for (const char* method : {"cpgd", "acpgd"}) {
      const std::string m = method;
      const double g1 = final_gap(m + "_p1_fixed:0.001");
      const double g10 = final_gap(m + "_p10_fixed:0.001");
      const double g50 = final_gap(m + "_p50_fixed:0.001");
      if (!(g50 <= g10 && g10 <= g1)) {
        a = false;
        notes += strf("seed %llu (a) %s p1 %.3g p10 %.3g p50 %.3g; ", static_cast<unsigned long long>(seed),
                      method, g1, g10, g50);
      }
    }
    for (std::size_t p : {1, 10, 50}) {
      const std::string ps = "_p" + std::to_string(p) + "_";
      for (std::size_t k = 1; k <= 100; ++k) {
        const double acc = gap_at("acpgd" + ps + "fixed:0.001", k);
        const double plain = gap_at("cpgd" + ps + "fixed:0.001", k);
        if (acc > plain * (1.0 + 1e-12)) {
          b = false;
          notes += strf("seed %llu (b) p=%zu k=%zu ACPGD %.3g > CPGD %.3g; ", static_cast<unsigned long long>(seed),
                        p, k, acc, plain);
          break;
        }
      }
      const double dim = final_gap("cpgd" + ps + "invk:1");
      const double fixed = std::min(final_gap("cpgd" + ps + "fixed:0.001"), final_gap("acpgd" + ps + "fixed:0.001"));
      if (!(dim < fixed)) {
        d = false;
        notes += strf("seed %llu (d) p=%zu 1/k %.3g vs best fixed %.3g; ", static_cast<unsigned long long>(seed), p,
                      dim, fixed);
      }
    }
    const std::pair<const char*, const char*> pairs[] = {{"cpgd_p50_fixed:0.001", "pgd_fixed:0.001"},
                                                         {"acpgd_p50_fixed:0.001", "apgd_fixed:0.001"}};
    for (const auto& [clique, base] : pairs) {
      const double ratio = final_gap(clique) / final_gap(base);
      if (!(ratio <= 10.0 && ratio >= 0.1)) {
        c = false;
        notes += strf("seed %llu (c) %s/%s = %.3g; ", static_cast<unsigned long long>(seed), clique, base, ratio);
      }
    }
    violations_a += a ? 0 : 1;
    violations_b += b ? 0 : 1;
    violations_c += c ? 0 : 1;
    violations_d += d ? 0 : 1;
  }
  const bool pa = violations_a == 0, pb = violations_b <= 1, pc = violations_c <= 1, pd = violations_d <= 1;
  std::string detail = strf("seeds violating: (a) %d/5 %s, (b) %d/5 %s, (c) %d/5 %s, (d) %d/5 %s; ", violations_a,
                            pa ? "ok" : "FAIL", violations_b, pb ? "ok" : "FAIL", violations_c, pc ? "ok" : "FAIL",
                            violations_d, pd ? "ok" : "FAIL");
  return finish(7, "allocation experiment orderings (5 seeds)", pa && pb && pc && pd, detail + notes, start, 120.0);
}

CriterionResult check_oracles() {
  const auto start = Clock::now();
  // KKT residuals.
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < kBatterySize; ++i) {
    const RandomInstance inst = battery_instance(i);
    const KktSolution sol = solve_equality_qp(inst.problem.objective, inst.problem.op);
    worst_residual = std::max({worst_residual, sol.primal_residual, sol.dual_residual});
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Problem problem = generate_allocation_problem(seed);
    const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
    worst_residual = std::max({worst_residual, sol.primal_residual, sol.dual_residual});
  }

  // Dykstra against the stacked minimum-norm projection.
  double worst_dykstra = 0.0;
  std::size_t dykstra_failures = 0;
  std::size_t max_cycles = 0;
  InstanceOptions options;
  options.min_n = 2;
  options.max_n = 6;
  options.max_d = 2;
  options.family = BlockFamily::kAffine;
  options.constrained_fraction = 1.0;
  for (std::size_t i = 0; i < 200; ++i) {
    Rng rng(60000 + i);
    const RandomInstance inst = random_instance(options, rng);
    const Vector x = rng.normal_vector(inst.problem.total_dim(), 3.0);
    const StackedEqualityProjector stacked(inst.problem.op);
    const DykstraProjector dykstra(inst.problem.op);
    try {
      const Vector pd = dykstra(x);
      max_cycles = std::max(max_cycles, dykstra.last_cycles());
      worst_dykstra = std::max(worst_dykstra, (pd - stacked(x)).lpNorm<Eigen::Infinity>());
    } catch (const OracleError&) {
      ++dykstra_failures;
    }
  }

  // Clique enumeration against brute force.
  std::size_t clique_mismatches = 0;
  std::size_t identity_failures = 0;
  Rng grng(70000);
  static constexpr double kProbs[] = {0.2, 0.5, 0.8};
  for (std::size_t i = 0; i < 200; ++i) {
    const Graph g = random_graph(grng.integer(1, 12), kProbs[i % 3], grng);
    const CliqueCover cover = maximal_cliques(g);
    if (cover.cliques != brute_force_maximal_cliques(g)) ++clique_mismatches;
    if (!verify_neighbor_clique_identity(g, cover)) ++identity_failures;
  }

  const bool passed = worst_residual <= 1e-10 && worst_dykstra <= 1e-8 && dykstra_failures == 0 &&
                      clique_mismatches == 0 && identity_failures == 0;
  return finish(8, "oracle cross-checks", passed,
                strf("KKT worst residual %.2e over 55 problems; Dykstra vs stacked max diff %.2e over 200 "
                     "(non-converged %zu, most cycles %zu); clique enumeration mismatches %zu/200, "
                     "neighbourhood identity failures %zu;",
                     worst_residual, worst_dykstra, dykstra_failures, max_cycles, clique_mismatches,
                     identity_failures),
                start, 60.0);
}

std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result) {
  using Check = CriterionResult (*)();
  static constexpr Check kChecks[] = {check_operator_properties,         check_cpgd_rate_bound,
                                      check_acpgd_rate_bound,            check_hk_diagnostics,
                                      check_complete_graph_equivalence,  check_distributed_equivalence,
                                      check_allocation_experiment,       check_oracles};
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < std::size(kChecks); ++i) {
    CriterionResult r;
    const auto start = Clock::now();
    try {
      r = kChecks[i]();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(i + 1);
      r.title = "criterion " + std::to_string(i + 1);
      r.passed = false;
      r.detail = std::string("aborted: ") + e.what();
      r.seconds = seconds_since(start);
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  return strf("%s  criterion %d: %s (%.1f s) | ", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds) +
         r.detail;
}

}  // namespace cliqueopt::checks
