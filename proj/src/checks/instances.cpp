#include "cliqueopt/checks/instances.hpp"

#include <algorithm>
#include <numeric>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/oracle.hpp"

namespace cliqueopt::checks {

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

std::size_t Rng::integer(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
}

bool Rng::coin(double p_true) { return uniform() < p_true; }

Vector Rng::normal_vector(std::size_t dim, double scale) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (auto& e : v) e = scale * normal();
  return v;
}

Vector Rng::uniform_vector(std::size_t dim, double lo, double hi) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (auto& e : v) e = uniform(lo, hi);
  return v;
}

Graph random_graph(std::size_t n, double edge_prob, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.coin(edge_prob)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, edges);
}

std::vector<std::string> family_kinds(BlockFamily family) {
  switch (family) {
    case BlockFamily::kMixed:
      return {"affine_eq", "sum_eq", "ball", "halfspace", "box", "consensus", "free"};
    case BlockFamily::kEquality:
      return {"affine_eq", "sum_eq", "consensus"};
    case BlockFamily::kAffine:
      return {"affine_eq", "sum_eq"};
  }
  return {};
}

ConvexSet random_set_containing(const std::string& kind, std::size_t members, std::size_t d, const Vector& witness,
                                Rng& rng) {
  const std::size_t dim = members * d;
  if (kind == "affine_eq") {
    const std::size_t rows = rng.integer(1, dim);
    Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    for (auto& e : A.reshaped()) e = rng.normal();
    // Occasionally repeat a row to exercise the rank-deficient path.
    if (rows >= 2 && rng.coin(0.2)) A.row(static_cast<Eigen::Index>(rows) - 1) = 2.0 * A.row(0);
    const Vector b = A * witness;
    return ConvexSet::affine(std::move(A), b);
  }
  if (kind == "sum_eq") return ConvexSet::sum_equality(witness.sum(), dim);
  if (kind == "ball") {
    const Vector center = witness + rng.normal_vector(dim, 0.5);
    return ConvexSet::ball(center, (witness - center).norm() + rng.uniform(0.1, 1.0));
  }
  if (kind == "halfspace") {
    const Vector a = rng.normal_vector(dim);
    return ConvexSet::halfspace(a, a.dot(witness) + rng.uniform(0.0, 1.0));
  }
  if (kind == "box") {
    return ConvexSet::box(witness - rng.uniform_vector(dim, 0.0, 1.0), witness + rng.uniform_vector(dim, 0.0, 1.0));
  }
  if (kind == "consensus") return ConvexSet::consensus(members, d);
  if (kind == "free") return ConvexSet::free(dim);
  throw InputError("unknown set kind " + kind);
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

Vector gather(const std::vector<NodeId>& members, std::size_t d, const Vector& x) {
  const auto dd = static_cast<Eigen::Index>(d);
  Vector out(static_cast<Eigen::Index>(members.size()) * dd);
  for (std::size_t m = 0; m < members.size(); ++m) {
    out.segment(static_cast<Eigen::Index>(m) * dd, dd) = x.segment(static_cast<Eigen::Index>(members[m]) * dd, dd);
  }
  return out;
}

Objective random_objective(std::size_t n, std::size_t d, bool quadratics, Rng& rng) {
  const auto dd = static_cast<Eigen::Index>(d);
  if (!quadratics) return Objective::squared_distance(rng.normal_vector(n * d, 2.0), d);
  std::vector<AgentTerm> terms;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix B(dd, dd);
    for (auto& e : B.reshaped()) e = rng.normal();
    Matrix Q = B.transpose() * B + rng.uniform(0.1, 1.0) * Matrix::Identity(dd, dd);
    Q = 0.5 * (Q + Q.transpose());
    terms.emplace_back(QuadraticTerm{std::move(Q), rng.normal_vector(d, 2.0)});
  }
  return Objective(std::move(terms), d);
}

}  // namespace

RandomInstance random_instance(const InstanceOptions& options, Rng& rng) {
  const std::size_t n = rng.integer(options.min_n, options.max_n);
  const std::size_t d = rng.integer(1, options.max_d);
  static constexpr double kEdgeProbs[] = {0.2, 0.5, 0.8};
  Graph graph = options.complete_graph ? random_graph(n, 1.0, rng) : random_graph(n, kEdgeProbs[rng.integer(0, 2)], rng);
  const CliqueCover cover = maximal_cliques(graph);
  const auto kinds = family_kinds(options.family);

  std::vector<std::string> chosen(cover.clique_count(), "free");
  for (auto& k : chosen) {
    if (rng.coin(options.constrained_fraction)) k = kinds[rng.integer(0, kinds.size() - 1)];
  }

  // Nodes tied together by consensus cliques share one witness block.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t l = 0; l < chosen.size(); ++l) {
    if (chosen[l] != "consensus") continue;
    for (NodeId v : cover.cliques[l]) parent[find_root(parent, v)] = find_root(parent, cover.cliques[l][0]);
  }
  const auto dd = static_cast<Eigen::Index>(d);
  Vector witness = rng.normal_vector(n * d, 1.5);
  for (NodeId v = 0; v < n; ++v) {
    const auto root = static_cast<Eigen::Index>(find_root(parent, v));
    witness.segment(static_cast<Eigen::Index>(v) * dd, dd) = witness.segment(root * dd, dd);
  }

  std::vector<ConstraintBlock> blocks;
  for (std::size_t l = 0; l < chosen.size(); ++l) {
    if (chosen[l] == "free") continue;
    const auto& members = cover.cliques[l];
    blocks.push_back({l, random_set_containing(chosen[l], members.size(), d, gather(members, d, witness), rng)});
  }
  Objective objective = random_objective(n, d, options.random_quadratics, rng);
  return {make_problem(std::move(graph), std::move(objective), std::move(blocks)), std::move(witness)};
}

std::vector<Vector> sample_feasible_points(const RandomInstance& instance, std::size_t count, Rng& rng) {
  const CliqueOperator& op = instance.problem.op;
  const std::size_t dim = op.total_dim();
  std::vector<Vector> points{instance.witness};
  if (op.all_linear_equality()) {
    const StackedEqualities rows = stack_equalities(op);
    if (rows.E.rows() == 0) {
      while (points.size() < count) points.push_back(rng.normal_vector(dim, 3.0));
      return points;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(rows.E);
    while (points.size() < count) {
      const Vector y = rng.normal_vector(dim, 3.0);
      const Vector z = y - cod.solve(rows.E * y - rows.e);
      if (op.violation(z) <= kFeasibilityTol) points.push_back(z);
    }
    return points;
  }
  std::vector<Vector> accepted{instance.witness};
  for (std::size_t tries = 0; tries < count; ++tries) {
    const Vector z = op.apply_power(rng.normal_vector(dim, 3.0), 500);
    if (op.potential(z) <= 1e-18) accepted.push_back(z);
  }
  while (points.size() < count) {
    const auto& u = accepted[rng.integer(0, accepted.size() - 1)];
    const auto& v = accepted[rng.integer(0, accepted.size() - 1)];
    const double a = rng.uniform();
    points.push_back(a * u + (1.0 - a) * v);
  }
  return points;
}

Graph allocation_graph() { return generate_allocation_problem(0).graph; }

}  // namespace cliqueopt::checks
