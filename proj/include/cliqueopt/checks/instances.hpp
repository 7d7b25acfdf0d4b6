#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cliqueopt/constraints.hpp"
#include "cliqueopt/graph.hpp"
#include "cliqueopt/problem.hpp"

namespace cliqueopt::checks {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  /// Uniform integer in [lo, hi].
  std::size_t integer(std::size_t lo, std::size_t hi);
  bool coin(double p_true);
  Vector normal_vector(std::size_t dim, double scale = 1.0);
  Vector uniform_vector(std::size_t dim, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Erdos-Renyi G(n, p).
Graph random_graph(std::size_t n, double edge_prob, Rng& rng);

enum class BlockFamily {
  kMixed,     ///< every set kind
  kEquality,  ///< affine, sum and consensus only
  kAffine,    ///< affine and sum only
};

/// A random set of the given kind ("affine_eq", "sum_eq", "ball", "halfspace",
/// "box", "consensus", "free") on `members` nodes of dimension d that contains
/// `witness`. For consensus the witness must already be a consensus vector.
ConvexSet random_set_containing(const std::string& kind, std::size_t members, std::size_t d, const Vector& witness,
                                Rng& rng);

/// Set kinds of a family, in a fixed order.
std::vector<std::string> family_kinds(BlockFamily family);

struct InstanceOptions {
  std::size_t min_n = 1;
  std::size_t max_n = 10;
  std::size_t max_d = 3;
  BlockFamily family = BlockFamily::kMixed;
  double constrained_fraction = 0.75;
  /// Random positive definite quadratics instead of 1/2 ||x - a||^2.
  bool random_quadratics = false;
  bool complete_graph = false;
};

struct RandomInstance {
  Problem problem;
  /// A point of D built together with the blocks (exact up to rounding).
  Vector witness;
};

/// Random graph, blocks and objective with a known feasible point.
RandomInstance random_instance(const InstanceOptions& options, Rng& rng);

/// Points of D: the witness, least-squares corrections of random points for
/// linear-equality families, T^500 of random points accepted when V <= 1e-18,
/// and convex combinations of those.
std::vector<Vector> sample_feasible_points(const RandomInstance& instance, std::size_t count, Rng& rng);

/// The 20-node benchmark graph.
Graph allocation_graph();

}  // namespace cliqueopt::checks
