#include <gtest/gtest.h>

#include "cliqueopt/checks/instances.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/oracle.hpp"

using namespace cliqueopt;

TEST(EqualityQp, FeasibleTargetIsOptimal) {
  Vector a(3);
  a << 1, 1, 1;
  const Problem problem = make_problem(Graph(3, {{0, 1}, {1, 2}}), Objective::squared_distance(a, 1),
                                       {{0, ConvexSet::sum_equality(2.0, 2)}});
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  EXPECT_LE((sol.x_star - a).norm(), 1e-14);
  EXPECT_LE(sol.f_star, 1e-28);
}

TEST(EqualityQp, SingleSumConstraintClosedForm) {
  Vector a(4);
  a << 1, 5, -2, 3;
  const Problem problem = make_problem(Graph::from_cliques(4, {{0, 1, 2, 3}}), Objective::squared_distance(a, 1),
                                       {{0, ConvexSet::sum_equality(3.0, 4)}});
  const KktSolution sol = solve_equality_qp(problem.objective, problem.op);
  const Vector expected = a.array() - (a.sum() - 3.0) / 4.0;
  EXPECT_LE((sol.x_star - expected).norm(), 1e-14);
  EXPECT_LE(sol.primal_residual, 1e-10);
  EXPECT_LE(sol.dual_residual, 1e-10);
}

TEST(EqualityQp, InfeasibleAndUnsupportedInputs) {
  Matrix first(1, 2), second(1, 2);
  first << 0, 1;
  second << 1, 0;
  const Problem clash =
      make_problem(Graph(3, {{0, 1}, {1, 2}}), Objective::squared_distance(Vector::Zero(3), 1),
                   {{0, ConvexSet::affine(first, Vector::Zero(1))}, {1, ConvexSet::affine(second, Vector::Ones(1))}});
  EXPECT_THROW(solve_equality_qp(clash.objective, clash.op), OracleError);

  const Problem ball = make_problem(Graph(2, {{0, 1}}), Objective::squared_distance(Vector::Zero(2), 1),
                                    {{0, ConvexSet::ball(Vector::Zero(2), 1.0)}});
  EXPECT_THROW(solve_equality_qp(ball.objective, ball.op), UnsupportedError);

  const Objective flat({QuadraticTerm{Matrix::Constant(1, 1, 0.0), Vector::Zero(1)},
                        QuadraticTerm{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)}},
                       1);
  const Problem semidefinite = make_problem(Graph(2, {{0, 1}}), flat, {});
  EXPECT_THROW(solve_equality_qp(semidefinite.objective, semidefinite.op), UnsupportedError);
}

TEST(Dykstra, IntersectionOfTwoLines) {
  // {x1 = x2} on clique {1,2} and {x2 = 0} on clique {2,3}: from (2,1,5) the nearest point is (0,0,5).
  Matrix pin(1, 2);
  pin << 1, 0;
  const Problem problem =
      make_problem(Graph(3, {{0, 1}, {1, 2}}), Objective::squared_distance(Vector::Zero(3), 1),
                   {{0, ConvexSet::consensus(2, 1)}, {1, ConvexSet::affine(pin, Vector::Zero(1))}});
  Vector x(3);
  x << 2, 1, 5;
  Vector expected(3);
  expected << 0, 0, 5;
  EXPECT_LE((project_D_dykstra(problem.op, x) - expected).norm(), 1e-10);
  EXPECT_LE((StackedEqualityProjector(problem.op)(x) - expected).norm(), 1e-14);
  EXPECT_LE((project_D_dykstra(problem.op, expected) - expected).norm(), 1e-15);
}

TEST(Dykstra, AgreesWithStackedProjection) {
  checks::InstanceOptions options;
  options.min_n = 2;
  options.max_n = 6;
  options.max_d = 2;
  options.family = checks::BlockFamily::kEquality;
  options.constrained_fraction = 1.0;
  for (int it = 0; it < 100; ++it) {
    checks::Rng rng(800 + it);
    const checks::RandomInstance inst = checks::random_instance(options, rng);
    const Vector x = rng.normal_vector(inst.problem.total_dim(), 3.0);
    const Vector pd = project_D_dykstra(inst.problem.op, x);
    ASSERT_LE((pd - StackedEqualityProjector(inst.problem.op)(x)).lpNorm<Eigen::Infinity>(), 1e-8);
    ASSERT_LE(inst.problem.op.violation(pd), 1e-10);
  }
}

TEST(Dykstra, ReportsNonConvergence) {
  checks::Rng rng(4);
  checks::InstanceOptions options;
  options.min_n = 4;
  options.constrained_fraction = 1.0;
  options.family = checks::BlockFamily::kAffine;
  for (int it = 0; it < 50; ++it) {
    const checks::RandomInstance inst = checks::random_instance(options, rng);
    if (inst.problem.op.clique_count() < 2) continue;
    const DykstraProjector tight(inst.problem.op, {1e-15, 1});
    EXPECT_THROW(tight(rng.normal_vector(inst.problem.total_dim(), 3.0)), OracleError);
    return;
  }
  GTEST_SKIP() << "no multi-clique instance drawn";
}

TEST(ApproximateOptimum, CloseToExactOnEqualityProblem) {
  Vector a(3);
  a << 2, -1, 4;
  const Problem problem = make_problem(Graph(3, {{0, 1}, {1, 2}}), Objective::squared_distance(a, 1),
                                       {{0, ConvexSet::sum_equality(1.0, 2)}, {1, ConvexSet::consensus(2, 1)}});
  const KktSolution exact = solve_equality_qp(problem.objective, problem.op);
  const ApproximateOptimum approx = approximate_optimum(problem, 20000, 1000);
  EXPECT_TRUE(approx.approximate);
  EXPECT_NEAR(approx.f, exact.f_star, 1e-8 * (1.0 + exact.f_star));
}
