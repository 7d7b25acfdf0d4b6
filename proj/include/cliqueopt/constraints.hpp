#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include "cliqueopt/linalg.hpp"

namespace cliqueopt {

/// ||v||_W = sqrt(v^T diag(w) v) with strictly positive w.
class WeightedNorm {
 public:
  explicit WeightedNorm(Vector weights);
  static WeightedNorm uniform(std::size_t dim);

  const Vector& weights() const { return w_; }
  std::size_t dim() const { return static_cast<std::size_t>(w_.size()); }
  bool is_uniform() const { return uniform_; }

  double inner(const Vector& a, const Vector& b) const;
  double squared(const Vector& v) const { return inner(v, v); }
  double operator()(const Vector& v) const;

 private:
  Vector w_;
  bool uniform_ = true;
};

/// {z : A z = b}
struct AffineEquality {
  Matrix A;
  Vector b;
};

/// {z : 1^T z = target}
struct SumEquality {
  double target = 0.0;
  std::size_t dim = 0;
};

/// {z : ||z - center|| <= radius}, Euclidean.
struct Ball {
  Vector center;
  double radius = 1.0;
};

/// {z : a^T z <= b}
struct Halfspace {
  Vector a;
  double b = 0.0;
};

struct Box {
  Vector lo;
  Vector hi;
};

/// All `members` sub-vectors of length `block_dim` are equal.
struct Consensus {
  std::size_t members = 0;
  std::size_t block_dim = 1;
};

/// The whole space; used for cliques that carry no constraint.
struct FreeSet {
  std::size_t dim = 0;
};

/// A nonempty closed convex set of one of the supported kinds.
/// Validated at construction; immutable afterwards.
class ConvexSet {
 public:
  using Spec = std::variant<FreeSet, AffineEquality, SumEquality, Ball, Halfspace, Box, Consensus>;

  explicit ConvexSet(Spec spec);

  static ConvexSet free(std::size_t dim) { return ConvexSet(FreeSet{dim}); }
  static ConvexSet affine(Matrix A, Vector b) { return ConvexSet(AffineEquality{std::move(A), std::move(b)}); }
  static ConvexSet sum_equality(double target, std::size_t dim) { return ConvexSet(SumEquality{target, dim}); }
  static ConvexSet ball(Vector center, double radius) { return ConvexSet(Ball{std::move(center), radius}); }
  static ConvexSet halfspace(Vector a, double b) { return ConvexSet(Halfspace{std::move(a), b}); }
  static ConvexSet box(Vector lo, Vector hi) { return ConvexSet(Box{std::move(lo), std::move(hi)}); }
  static ConvexSet consensus(std::size_t members, std::size_t block_dim) {
    return ConvexSet(Consensus{members, block_dim});
  }

  const Spec& spec() const { return spec_; }
  std::size_t dim() const { return dim_; }
  std::string_view kind() const;

  /// True for sets described by linear equalities (free, affine, sum, consensus).
  bool is_linear_equality() const;

  /// Full-row-rank equality rows (E, e) with {z : E z = e} equal to this set.
  /// Only valid when is_linear_equality().
  const Matrix& equality_matrix() const { return eq_A_; }
  const Vector& equality_rhs() const { return eq_b_; }

  /// Nonnegative constraint violation; 0 inside the set.
  double violation(const Vector& x) const;
  bool contains(const Vector& x, double tol = kFeasibilityTol) const { return violation(x) <= tol; }

 private:
  Spec spec_;
  std::size_t dim_ = 0;
  Matrix eq_A_;
  Vector eq_b_;
};

/// argmin_{z in set} ||z - x||_W with anything reusable (the Cholesky factor
/// for affine sets) computed once at construction.
class WeightedProjector {
 public:
  WeightedProjector(ConvexSet set, WeightedNorm norm);

  Vector project(const Vector& x) const;

  const ConvexSet& set() const { return set_; }
  const WeightedNorm& norm() const { return norm_; }

 private:
  Vector project_ball(const Ball& ball, const Vector& x) const;

  ConvexSet set_;
  WeightedNorm norm_;
  Vector inv_w_;
  // Affine: W^{-1} E^T and the factor of E W^{-1} E^T.
  Matrix winv_et_;
  std::optional<Eigen::LLT<Matrix>> gram_;
};

/// One-shot weighted projection. Throws InputError on dimension mismatch.
Vector project_weighted(const ConvexSet& set, const Vector& x, const WeightedNorm& norm);

/// Ball projection controls.
inline constexpr double kBallRootTol = 1e-12;
inline constexpr int kBallMaxIters = 200;

}  // namespace cliqueopt
