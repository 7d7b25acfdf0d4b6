#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/checks/instances.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/operator.hpp"
#include "cliqueopt/oracle.hpp"
#include "cliqueopt/solver.hpp"

using namespace cliqueopt;

namespace {

Problem path_problem(const Vector& a) {
  return make_problem(Graph(3, {{0, 1}, {1, 2}}), Objective::squared_distance(a, 1),
                      {{0, ConvexSet::sum_equality(2.0, 2)}, {1, ConvexSet::consensus(2, 1)}});
}

}  // namespace

TEST(AccelState, SigmaRecursion) {
  const double s1 = AccelState::next_sigma(1.0);
  EXPECT_DOUBLE_EQ(s1, (1.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_DOUBLE_EQ(AccelState::next_sigma(s1), (1.0 + std::sqrt(1.0 + 4.0 * s1 * s1)) / 2.0);
  EXPECT_NEAR(AccelState::next_sigma(s1), 2.19353, 5e-5);
  double s = 1.0;
  for (int k = 0; k < 1000; ++k, s = AccelState::next_sigma(s)) ASSERT_GE(s, (k + 1) / 2.0);
}

TEST(AccelState, FirstMomentumIsZero) {
  AccelState state;
  state.x_prev = Vector::Zero(2);
  EXPECT_DOUBLE_EQ(state.theta(), 0.0);
  const Vector x1 = Vector::Constant(2, 3.0);
  state.advance(x1);
  EXPECT_EQ(state.x_hat, x1);
  EXPECT_GT(state.theta(), 0.0);
}

TEST(StepSchedule, ParseAndIndexing) {
  EXPECT_DOUBLE_EQ(StepSchedule::parse("fixed:0.001").at(7), 0.001);
  EXPECT_DOUBLE_EQ(StepSchedule::parse("invk:2").at(4), 0.5);
  EXPECT_DOUBLE_EQ(StepSchedule::parse("invsqrtk:1").at(4), 0.5);
  EXPECT_THROW(StepSchedule::parse("fixed"), InputError);
  EXPECT_THROW(StepSchedule::parse("linear:1"), InputError);
  EXPECT_THROW(StepSchedule::parse("invk:-1"), InputError);
  EXPECT_THROW(StepSchedule::parse("fixed:1x"), InputError);
  EXPECT_THROW(StepSchedule::inv_k(1).at(0), InputError);
}

TEST(Solver, ConfigValidation) {
  const Problem problem = path_problem(Vector::Zero(3));
  SolverConfig config;
  config.schedule = StepSchedule::fixed(1.5);
  EXPECT_THROW(run_cpgd(problem, config), InputError);
  config.schedule = StepSchedule::fixed(1.0);
  config.p = 0;
  EXPECT_THROW(run_cpgd(problem, config), InputError);
  config.p = 1;
  config.algorithm = Algorithm::kAcpgd;
  config.schedule = StepSchedule::inv_k(1.0);
  EXPECT_THROW(run_acpgd(problem, config), InputError);
  config.algorithm = Algorithm::kCpgd;
  config.diagnostics_hk = true;
  EXPECT_THROW(run_cpgd(problem, config), InputError);
  config.schedule = StepSchedule::fixed(1.0);
  config.p = 2;
  EXPECT_THROW(run_cpgd(problem, config), InputError);
  config.p = 1;
  config.x0 = Vector::Zero(2);
  EXPECT_THROW(run_cpgd(problem, config), InputError);
  EXPECT_THROW(parse_algorithm("sgd"), InputError);
}

TEST(Solver, StationaryWhenGradientVanishesOnD) {
  const Vector a = Vector::Constant(3, 1.0);  // sum of first two is 2, consensus holds
  const Problem problem = path_problem(a);
  for (Algorithm algo : {Algorithm::kCpgd, Algorithm::kAcpgd}) {
    SolverConfig config;
    config.algorithm = algo;
    config.schedule = StepSchedule::fixed(1.0);
    config.max_iters = 20;
    config.x0 = a;
    config.keep_iterates = true;
    const Trace trace = run_solver(problem, config);
    for (const auto& x : trace.iterates) ASSERT_EQ(x, a);
  }
}

TEST(Solver, KktOptimumIsFixedByTAndStepsAwayUnderFixedStep) {
  const Problem problem = generate_allocation_problem(3);
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  for (std::size_t p : {1, 10, 50}) {
    EXPECT_LE((apply_T_power(problem.op, sol.x_star, p) - sol.x_star).lpNorm<Eigen::Infinity>(), 1e-12);
  }
  EXPECT_LE(eval_V(problem.op, sol.x_star), 1e-24);
  // A fixed step minimizes f + V/t rather than f on D, so CPGD started at x* moves off it.
  SolverConfig config;
  config.p = 1;
  config.max_iters = 1;
  config.x0 = sol.x_star;
  const Trace trace = run_cpgd(problem, config);
  EXPECT_GT((trace.final_x - sol.x_star).norm(), 1e-6);
}

TEST(Solver, CompleteGraphMatchesPgdAndUnconstrainedPgdIsGradientDescent) {
  Vector a(2);
  a << 4, -2;
  const Problem free_problem = make_problem(Graph(2, {{0, 1}}), Objective::squared_distance(a, 1), {});
  SolverConfig config;
  config.algorithm = Algorithm::kPgd;
  config.schedule = StepSchedule::fixed(0.5);
  config.max_iters = 5;
  config.keep_iterates = true;
  const Trace trace = run_pgd(free_problem, [](const Vector& x) { return x; }, config);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    ASSERT_TRUE(trace.iterates[k].isApprox(a * (1.0 - std::pow(0.5, static_cast<double>(k))), 1e-15));
  }
}

TEST(Solver, PgdBaselineOnAllocationProblem) {
  const Problem problem = generate_allocation_problem(2);
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  const SetProjection project_D = make_full_projection(problem.op);
  SolverConfig config;
  config.algorithm = Algorithm::kPgd;
  config.schedule = StepSchedule::fixed(0.001);
  config.max_iters = 2000;
  config.f_star = sol.f_star;
  const Trace trace = run_pgd(problem, project_D, config);
  // From k = 1 on the iterates are feasible and the gap decreases; x(0) = 0 is not in D.
  for (std::size_t i = 2; i < trace.records.size(); ++i) {
    ASSERT_LE(*trace.records[i].rel_gap, *trace.records[i - 1].rel_gap * (1.0 + 1e-12)) << "k " << i;
  }
  config.x0 = sol.x_star;
  config.max_iters = 50;
  const Trace stationary = run_pgd(problem, project_D, config);
  EXPECT_LE((stationary.final_x - sol.x_star).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Solver, HkExampleAndMonotonicity) {
  const Vector a = Vector::Constant(3, 1.0);
  const Problem problem = path_problem(a);
  const Vector x = Vector::Constant(3, 1.0);
  EXPECT_DOUBLE_EQ(compute_Hk_diagnostic(problem, 0.5, x, x), problem.objective.value(x));

  const Problem alloc = generate_allocation_problem(2);
  SolverConfig config;
  config.schedule = StepSchedule::fixed(1.0);
  config.diagnostics_hk = true;
  config.max_iters = 300;
  const Trace trace = run_cpgd(alloc, config);
  for (std::size_t j = 1; j + 1 < trace.records.size(); ++j) {
    ASSERT_LE(*trace.records[j + 1].H, *trace.records[j].H + 1e-9);
    ASSERT_LE(*trace.records[j].J, *trace.records[j].H + 1e-9);
  }
}

TEST(Solver, RateBoundsHoldOnAllocationProblem) {
  const Problem problem = generate_allocation_problem(4);
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  for (Algorithm algo : {Algorithm::kCpgd, Algorithm::kAcpgd}) {
    SolverConfig config;
    config.algorithm = algo;
    config.schedule = StepSchedule::fixed(1.0);
    config.max_iters = 1000;
    config.f_star = sol.f_star;
    config.x_star = sol.x_star;
    const Trace trace = run_solver(problem, config);
    EXPECT_FALSE(trace.first_bound_violation.has_value());
    ASSERT_TRUE(trace.records.back().bound.has_value());
  }
}

TEST(Solver, DiminishingStepConvergesToTheOptimum) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    checks::Rng rng(900 + seed);
    checks::InstanceOptions options;
    options.min_n = 2;
    options.max_n = 8;
    options.family = checks::BlockFamily::kEquality;
    const checks::RandomInstance inst = checks::random_instance(options, rng);
    const KktSolution sol = solve_equality_qp(inst.problem.objective, inst.problem.op);
    for (std::size_t p : {1, 5}) {
      SolverConfig config;
      config.p = p;
      config.schedule = StepSchedule::inv_k(1.0 / inst.problem.objective.smoothness());
      config.max_iters = 100000;
      config.record_every = 100000;
      const Trace trace = run_cpgd(inst.problem, config);
      EXPECT_LT((trace.final_x - sol.x_star).norm(), 1e-3) << "seed " << seed << " p " << p;
    }
  }
}

TEST(Solver, DiminishingStepErrorShrinksOnIllConditionedQuadratics) {
  // With c/k steps the error decays like k^(-c mu), which is slow when mu/L is small.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    checks::Rng rng(900 + seed);
    checks::InstanceOptions options;
    options.min_n = 2;
    options.max_n = 8;
    options.family = checks::BlockFamily::kEquality;
    options.random_quadratics = true;
    const checks::RandomInstance inst = checks::random_instance(options, rng);
    const KktSolution sol = solve_equality_qp(inst.problem.objective, inst.problem.op);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iters : {100, 1000, 10000}) {
      SolverConfig config;
      config.schedule = StepSchedule::inv_k(1.0 / inst.problem.objective.smoothness());
      config.max_iters = iters;
      config.record_every = iters;
      const double err = (run_cpgd(inst.problem, config).final_x - sol.x_star).norm();
      EXPECT_LT(err, previous) << "seed " << seed << " iters " << iters;
      previous = err;
    }
  }
}

TEST(Solver, RunsAreBitIdentical) {
  const Problem problem = generate_allocation_problem(5);
  SolverConfig config;
  config.algorithm = Algorithm::kAcpgd;
  config.p = 10;
  config.schedule = StepSchedule::fixed(0.001);
  config.max_iters = 300;
  const Trace a = run_acpgd(problem, config);
  const Trace b = run_acpgd(problem, config);
  EXPECT_EQ(a.final_x, b.final_x);
  for (std::size_t j = 0; j < a.records.size(); ++j) ASSERT_EQ(a.records[j].f, b.records[j].f);
}

TEST(Solver, RecordStrideAndEarlyStop) {
  const Problem problem = generate_allocation_problem(1);
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  SolverConfig config;
  config.p = 50;
  config.max_iters = 95;
  config.record_every = 10;
  config.f_star = sol.f_star;
  Trace trace = run_cpgd(problem, config);
  ASSERT_EQ(trace.records.size(), 11u);
  EXPECT_EQ(trace.records.back().k, 95u);
  for (std::size_t j = 1; j < trace.records.size(); ++j) ASSERT_GT(trace.records[j].k, trace.records[j - 1].k);
  EXPECT_FALSE(trace.records[3].J.has_value());

  config.early_stop_tol = 1e-9;
  config.max_iters = 100000;
  trace = run_cpgd(problem, config);
  EXPECT_LT(trace.iterations, 100000u);
  EXPECT_LT(*trace.records.back().rel_gap, 1e-9);
}

TEST(Solver, DivergenceIsANumericError) {
  // L deliberately understated so that the fixed step overshoots.
  const Problem problem = make_problem(Graph(1, {}), Objective({QuadraticTerm{Matrix::Constant(1, 1, 100.0),
                                                                              Vector::Zero(1)}},
                                                              1, 1.0),
                                       {});
  SolverConfig config;
  config.schedule = StepSchedule::fixed(1.0);
  config.max_iters = 1000;
  config.x0 = Vector::Ones(1);
  EXPECT_THROW(run_cpgd(problem, config), NumericError);
}
