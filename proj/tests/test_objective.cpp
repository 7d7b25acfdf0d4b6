#include <gtest/gtest.h>

#include "cliqueopt/errors.hpp"
#include "cliqueopt/objective.hpp"

using namespace cliqueopt;

TEST(Objective, SquaredDistanceValueGradientAndL) {
  Vector a(3);
  a << 1, 2, 3;
  const Objective f = Objective::squared_distance(a, 1);
  EXPECT_DOUBLE_EQ(f.value(Vector::Zero(3)), 7.0);
  EXPECT_TRUE(f.gradient(Vector::Zero(3)).isApprox(-a));
  EXPECT_DOUBLE_EQ(f.smoothness(), 1.0);
  EXPECT_DOUBLE_EQ(quadratic_L(f), 1.0);
  EXPECT_DOUBLE_EQ(*f.strong_monotonicity(), 1.0);
}

TEST(Objective, LIsTheLargestHessianEigenvalue) {
  std::vector<AgentTerm> terms;
  terms.emplace_back(QuadraticTerm{Matrix::Identity(2, 2), Vector::Zero(2)});
  Matrix Q(2, 2);
  Q << 5, 0, 0, 1;
  terms.emplace_back(QuadraticTerm{Q, Vector::Zero(2)});
  EXPECT_DOUBLE_EQ(quadratic_L(Objective(terms, 2)), 5.0);

  std::vector<AgentTerm> mixed;
  for (double e : {1.0, 2.0, 3.0}) mixed.emplace_back(QuadraticTerm{Matrix::Constant(1, 1, e), Vector::Zero(1)});
  EXPECT_DOUBLE_EQ(Objective(mixed, 1).smoothness(), 3.0);
}

TEST(Objective, GenericTermsNeedLAndCorrectGradients) {
  GenericTerm quartic{[](const Vector& x) { return std::pow(x[0], 4) / 4.0 + x[0] * x[0]; },
                      [](const Vector& x) { return Vector::Constant(1, std::pow(x[0], 3) + 2 * x[0]); }};
  EXPECT_THROW(Objective({quartic}, 1), InputError);
  const Objective f({quartic}, 1, 20.0);
  EXPECT_DOUBLE_EQ(f.smoothness(), 20.0);
  EXPECT_THROW(quadratic_L(f), UnsupportedError);

  GenericTerm wrong{[](const Vector& x) { return x.squaredNorm(); }, [](const Vector& x) { return Vector(x); }};
  EXPECT_THROW(Objective({wrong}, 1, 2.0), InputError);
}

TEST(Objective, RejectsIndefiniteAndMisshapenQuadratics) {
  Matrix Q(2, 2);
  Q << 1, 0, 0, -1;
  EXPECT_THROW(Objective({QuadraticTerm{Q, Vector::Zero(2)}}, 2), UnsupportedError);
  Matrix asym(2, 2);
  asym << 1, 1, 0, 1;
  EXPECT_THROW(Objective({QuadraticTerm{asym, Vector::Zero(2)}}, 2), InputError);
  EXPECT_THROW(Objective({QuadraticTerm{Matrix::Identity(2, 2), Vector::Zero(2)}}, 1), InputError);
  EXPECT_THROW(Objective::squared_distance(Vector::Zero(3), 2), InputError);
}
