#pragma once

#include <vector>

#include "cliqueopt/graph.hpp"
#include "cliqueopt/objective.hpp"
#include "cliqueopt/operator.hpp"

namespace cliqueopt {

/// min sum_i f_i(x_i) s.t. x_{C_l} in D_l for every maximal clique C_l of the graph.
struct Problem {
  Graph graph;
  Objective objective;
  CliqueOperator op;

  std::size_t agents() const { return graph.size(); }
  std::size_t agent_dim() const { return op.agent_dim(); }
  std::size_t total_dim() const { return op.total_dim(); }
};

/// Enumerates the maximal cliques of `graph` and wires the blocks onto them.
Problem make_problem(Graph graph, Objective objective, std::vector<ConstraintBlock> blocks);

}  // namespace cliqueopt
