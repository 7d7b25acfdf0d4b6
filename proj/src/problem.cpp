#include "cliqueopt/problem.hpp"

#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

Problem make_problem(Graph graph, Objective objective, std::vector<ConstraintBlock> blocks) {
  if (objective.agents() != graph.size()) {
    throw InputError("problem: objective has " + std::to_string(objective.agents()) + " terms but the graph has " +
                     std::to_string(graph.size()) + " nodes");
  }
  CliqueCover cover = maximal_cliques(graph);
  const std::size_t d = objective.agent_dim();
  CliqueOperator op(std::move(cover), d, std::move(blocks));
  return Problem{std::move(graph), std::move(objective), std::move(op)};
}

}  // namespace cliqueopt
