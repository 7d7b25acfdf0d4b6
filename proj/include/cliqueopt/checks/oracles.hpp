#pragma once

#include <functional>
#include <vector>

#include "cliqueopt/constraints.hpp"
#include "cliqueopt/graph.hpp"
#include "cliqueopt/linalg.hpp"

namespace cliqueopt::checks {

/// Every maximal clique found by scanning all 2^n node subsets, in canonical
/// order. Only for n <= 20.
std::vector<std::vector<NodeId>> brute_force_maximal_cliques(const Graph& g);

/// Central differences with step h on every coordinate.
Vector central_difference_gradient(const std::function<double(const Vector&)>& fn, const Vector& x,
                                   double h = 1e-6);

/// Unweighted Euclidean projection computed independently of the library's
/// projectors (pseudo-inverse for affine sets, radial scaling for balls, ...).
Vector euclidean_projection(const ConvexSet& set, const Vector& x);

/// argmin_{z in set} ||z - x||_W by projected gradient on 1/2 ||z - x||_W^2
/// with the Euclidean projection above. Throws OracleError when the iteration
/// cap is reached.
Vector numeric_projection_oracle(const ConvexSet& set, const Vector& x, const WeightedNorm& norm,
                                 double tol = 1e-13, std::size_t max_iters = 2000000);

}  // namespace cliqueopt::checks
