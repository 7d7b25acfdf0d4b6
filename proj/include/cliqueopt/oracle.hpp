#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "cliqueopt/linalg.hpp"
#include "cliqueopt/objective.hpp"
#include "cliqueopt/operator.hpp"
#include "cliqueopt/problem.hpp"
#include "cliqueopt/solver.hpp"

namespace cliqueopt {

/// Optimizer of an equality-constrained quadratic, with KKT residuals.
struct KktSolution {
  Vector x_star;
  double f_star = 0.0;
  Vector multipliers;  ///< one per stacked (rank-reduced) equality row
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// All linear-equality blocks of `op` lifted to rows over the stacked vector.
struct StackedEqualities {
  Matrix E;
  Vector e;
};
StackedEqualities stack_equalities(const CliqueOperator& op);

/// Solves min f(x) s.t. every block of `op`, for quadratic f with positive
/// definite Hessians and linear-equality (or free) blocks only.
/// Throws UnsupportedError for other inputs and OracleError when infeasible.
KktSolution solve_equality_qp(const Objective& objective, const CliqueOperator& op);

/// Euclidean projection onto the intersection of linear-equality blocks by one
/// minimum-norm KKT solve. The factorization is computed once.
class StackedEqualityProjector {
 public:
  explicit StackedEqualityProjector(const CliqueOperator& op);
  Vector operator()(const Vector& x) const;

 private:
  StackedEqualities rows_;
  Eigen::CompleteOrthogonalDecomposition<Matrix> gram_;
};

struct DykstraOptions {
  double tol = 1e-12;
  std::size_t max_cycles = 100000;
};

/// Euclidean projection onto D = {x : x_{C_l} in D_l for all l} by Dykstra's
/// alternating projections with per-block correction vectors.
class DykstraProjector {
 public:
  explicit DykstraProjector(const CliqueOperator& op, DykstraOptions options = {});
  /// Throws OracleError when the cycle cap is reached first.
  Vector operator()(const Vector& x) const;
  std::size_t last_cycles() const { return last_cycles_; }

 private:
  const CliqueOperator* op_;
  DykstraOptions options_;
  std::vector<WeightedProjector> plain_;
  mutable std::size_t last_cycles_ = 0;
};

Vector project_D_dykstra(const CliqueOperator& op, const Vector& x, DykstraOptions options = {});

/// P_D for the PGD baseline: the stacked KKT projector when every block is a
/// linear equality, Dykstra otherwise.
SetProjection make_full_projection(const CliqueOperator& op);

struct ApproximateOptimum {
  Vector x;
  double f = 0.0;
  bool approximate = true;
};

/// f* for problems the KKT oracle does not cover: accelerated run with p = 50,
/// t = 1/L, keeping the best objective among Dykstra-projected probes. Stops
/// early once an iterate repeats its predecessor.
ApproximateOptimum approximate_optimum(const Problem& problem, std::size_t iters = 1000000,
                                       std::size_t probe_every = 1000);

}  // namespace cliqueopt
