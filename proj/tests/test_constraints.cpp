#include <gtest/gtest.h>

#include "cliqueopt/checks/instances.hpp"
#include "cliqueopt/checks/oracles.hpp"
#include "cliqueopt/constraints.hpp"
#include "cliqueopt/errors.hpp"

using namespace cliqueopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

void expect_near(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), tol) << "got " << a.transpose() << " expected " << b.transpose();
}

}  // namespace

TEST(WeightedNorm, RejectsNonPositiveWeights) {
  EXPECT_THROW(WeightedNorm(vec({1.0, 0.0})), InputError);
  EXPECT_THROW(WeightedNorm(vec({1.0, -2.0})), InputError);
  EXPECT_DOUBLE_EQ(WeightedNorm(vec({1.0, 0.5}))(vec({1.0, 2.0})), std::sqrt(3.0));
}

TEST(Projection, SumEqualityWeighted) {
  const ConvexSet set = ConvexSet::sum_equality(7.0, 6);
  const WeightedNorm w(vec({1, 1, 1, 1, 0.5, 0.5}));
  const Vector x = Vector::Ones(6);
  const Vector expected = vec({1.125, 1.125, 1.125, 1.125, 1.25, 1.25});
  expect_near(project_weighted(set, x, w), expected, 1e-15);
  expect_near(checks::numeric_projection_oracle(set, x, w), expected, 1e-8);
}

TEST(Projection, BallUniformIsRadialScaling) {
  const ConvexSet set = ConvexSet::ball(Vector::Zero(2), 1.0);
  expect_near(project_weighted(set, vec({3, 4}), WeightedNorm::uniform(2)), vec({0.6, 0.8}), 1e-15);
}

TEST(Projection, ConsensusIsWeightedMean) {
  const ConvexSet set = ConvexSet::consensus(2, 1);
  const WeightedNorm w(vec({1.0, 0.5}));
  expect_near(project_weighted(set, vec({0, 3}), w), vec({1, 1}), 1e-15);
  expect_near(checks::numeric_projection_oracle(set, vec({0, 3}), w), vec({1, 1}), 1e-8);
}

TEST(Projection, HalfspaceClosedForm) {
  const ConvexSet set = ConvexSet::halfspace(vec({1, 1}), 1.0);
  const WeightedNorm w(vec({1.0, 0.5}));
  // x - W^{-1} a (a'x - b)/(a'W^{-1}a) = (2,2) - (1,2)*3/3
  expect_near(project_weighted(set, vec({2, 2}), w), vec({1, 0}), 1e-15);
  expect_near(project_weighted(set, vec({0, 0}), w), vec({0, 0}), 0.0);
}

TEST(Projection, BoxIgnoresWeights) {
  const ConvexSet set = ConvexSet::box(vec({0, 0}), vec({1, 1}));
  expect_near(project_weighted(set, vec({-1, 3}), WeightedNorm(vec({0.2, 5.0}))), vec({0, 1}), 0.0);
}

TEST(Projection, WeightedBallMatchesOracleAndLandsOnSphere) {
  const ConvexSet set = ConvexSet::ball(vec({1, -1, 0}), 0.5);
  const WeightedNorm w(vec({1.0, 0.25, 0.5}));
  const Vector x = vec({3, 2, -2});
  const Vector z = project_weighted(set, x, w);
  EXPECT_NEAR((z - vec({1, -1, 0})).norm(), 0.5, 1e-12);
  expect_near(z, checks::numeric_projection_oracle(set, x, w), 1e-8);
}

TEST(Projection, AffineClosedFormMatchesOracle) {
  Matrix A(1, 3);
  A << 1, 2, -1;
  const ConvexSet set = ConvexSet::affine(A, vec({2}));
  const WeightedNorm w(vec({1.0, 0.5, 0.25}));
  const Vector x = vec({0.3, -1, 2});
  const Vector z = project_weighted(set, x, w);
  EXPECT_NEAR((A * z)(0), 2.0, 1e-12);
  expect_near(z, checks::numeric_projection_oracle(set, x, w), 1e-8);
}

TEST(ConvexSet, AffineRankDeficiencyNeedsConsistency) {
  Matrix A(2, 2);
  A << 1, 1, 2, 2;
  EXPECT_NO_THROW(ConvexSet::affine(A, vec({1, 2})));
  EXPECT_THROW(ConvexSet::affine(A, vec({1, 3})), InputError);
  const ConvexSet set = ConvexSet::affine(A, vec({1, 2}));
  EXPECT_EQ(set.equality_matrix().rows(), 1);
  expect_near(project_weighted(set, vec({0, 0}), WeightedNorm::uniform(2)), vec({0.5, 0.5}), 1e-14);
}

TEST(ConvexSet, InvalidSpecsAreRejected) {
  EXPECT_THROW(ConvexSet::ball(Vector::Zero(2), 0.0), InputError);
  EXPECT_THROW(ConvexSet::box(vec({1}), vec({0})), InputError);
  EXPECT_THROW(ConvexSet::halfspace(Vector::Zero(2), 1.0), InputError);
}

TEST(Projection, DimensionMismatchIsAnInputError) {
  EXPECT_THROW(project_weighted(ConvexSet::sum_equality(1, 3), Vector::Zero(2), WeightedNorm::uniform(2)),
               InputError);
  EXPECT_THROW(WeightedProjector(ConvexSet::sum_equality(1, 3), WeightedNorm::uniform(2)), InputError);
}

TEST(Projection, MembersAreFixedPoints) {
  checks::Rng rng(3);
  for (const auto& kind : checks::family_kinds(checks::BlockFamily::kMixed)) {
    const Vector witness = kind == "consensus" ? Vector::Constant(4, 0.7) : rng.normal_vector(4);
    const ConvexSet set = checks::random_set_containing(kind, 4, 1, witness, rng);
    const WeightedNorm w(rng.uniform_vector(4, 0.1, 1.0));
    expect_near(project_weighted(set, witness, w), witness, 1e-12);
  }
}

TEST(Projection, AgreesWithNumericOracleOnRandomTriples) {
  checks::Rng rng(11);
  const auto kinds = checks::family_kinds(checks::BlockFamily::kMixed);
  for (int it = 0; it < 1000; ++it) {
    const std::string& kind = kinds[static_cast<std::size_t>(it) % kinds.size()];
    const std::size_t members = rng.integer(1, 4);
    const std::size_t d = rng.integer(1, 3);
    Vector witness = rng.normal_vector(members * d);
    if (kind == "consensus") {
      for (std::size_t m = 0; m < members; ++m) {
        witness.segment(static_cast<Eigen::Index>(m * d), static_cast<Eigen::Index>(d)) =
            witness.head(static_cast<Eigen::Index>(d));
      }
    }
    const ConvexSet set = checks::random_set_containing(kind, members, d, witness, rng);
    const WeightedNorm w(rng.uniform_vector(members * d, 0.1, 1.0));
    const Vector x = rng.normal_vector(members * d, 3.0);
    const Vector z = project_weighted(set, x, w);
    ASSERT_LE(set.violation(z), kFeasibilityTol) << kind;
    ASSERT_LE((z - checks::numeric_projection_oracle(set, x, w)).lpNorm<Eigen::Infinity>(), 1e-6) << kind;
  }
}
