#pragma once

#include <cstddef>
#include <vector>

#include "cliqueopt/constraints.hpp"
#include "cliqueopt/graph.hpp"
#include "cliqueopt/linalg.hpp"
#include "cliqueopt/objective.hpp"

namespace cliqueopt {

/// Constraint x_{C_l} in D_l on one maximal clique.
struct ConstraintBlock {
  std::size_t clique = 0;
  ConvexSet set;
};

/// The clique-based projection T: for each node, the average over the cliques
/// containing it of that node's block of the weighted projection of x_{C_l}
/// onto D_l, with weights gamma_{C_l}.
class CliqueOperator {
 public:
  /// Cliques without a block get the free set. Throws InputError on duplicate
  /// blocks, unknown clique indices, or dimension mismatches.
  CliqueOperator(CliqueCover cover, std::size_t d, std::vector<ConstraintBlock> blocks);

  const CliqueCover& cover() const { return cover_; }
  std::size_t agent_dim() const { return d_; }
  std::size_t agents() const { return cover_.node_count(); }
  std::size_t total_dim() const { return cover_.node_count() * d_; }
  std::size_t clique_count() const { return projectors_.size(); }

  const WeightedProjector& projector(std::size_t l) const { return projectors_.at(l); }
  const ConvexSet& set(std::size_t l) const { return projectors_.at(l).set(); }

  /// True when every block is a linear equality (or free).
  bool all_linear_equality() const;

  /// x_{C_l}: the member blocks of x stacked in clique order.
  Vector gather(std::size_t l, const Vector& x) const;

  /// P_{D_l}(x_{C_l}) in the gamma-weighted norm.
  Vector project_clique(std::size_t l, const Vector& x) const;

  Vector apply(const Vector& x) const;
  Vector apply_power(const Vector& x, std::size_t p) const;

  /// V(x) = 1/2 sum_l ||x_{C_l} - P_{D_l}(x_{C_l})||^2_{diag(gamma_{C_l})}
  double potential(const Vector& x) const;

  /// Largest per-block constraint violation.
  double violation(const Vector& x) const;

 private:
  void check_dim(const Vector& x) const;

  CliqueCover cover_;
  std::size_t d_;
  std::vector<WeightedProjector> projectors_;
};

Vector apply_T(const CliqueOperator& op, const Vector& x);

/// p-fold composition; p = 0 is rejected.
Vector apply_T_power(const CliqueOperator& op, const Vector& x, std::size_t p);

double eval_V(const CliqueOperator& op, const Vector& x);

/// grad V(x) = x - T(x).
Vector grad_V(const CliqueOperator& op, const Vector& x);

/// J(x) = f(x) + V(x)/t, t > 0.
double eval_J(const CliqueOperator& op, const Objective& f, const Vector& x, double t);

}  // namespace cliqueopt
