#include "cliqueopt/checks/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt::checks {

std::vector<std::vector<NodeId>> brute_force_maximal_cliques(const Graph& g) {
  const std::size_t n = g.size();
  if (n > 20) throw InputError("brute-force clique enumeration is limited to 20 nodes");
  auto is_clique = [&](std::uint32_t mask) {
    for (NodeId i = 0; i < n; ++i) {
      if (!(mask >> i & 1U)) continue;
      for (NodeId j = i + 1; j < n; ++j) {
        if ((mask >> j & 1U) && !g.adjacent(i, j)) return false;
      }
    }
    return true;
  };
  std::vector<std::vector<NodeId>> out;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    if (!is_clique(mask)) continue;
    bool maximal = true;
    for (NodeId v = 0; v < n && maximal; ++v) {
      if (!(mask >> v & 1U) && is_clique(mask | (1U << v))) maximal = false;
    }
    if (!maximal) continue;
    std::vector<NodeId> members;
    for (NodeId v = 0; v < n; ++v) {
      if (mask >> v & 1U) members.push_back(v);
    }
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector central_difference_gradient(const std::function<double(const Vector&)>& fn, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = fn(probe);
    probe[j] = x[j] - h;
    const double down = fn(probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

namespace {

Vector project_affine(const Matrix& A, const Vector& b, const Vector& x) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  return x - cod.solve(A * x - b);
}

}  // namespace

Vector euclidean_projection(const ConvexSet& set, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != set.dim()) throw InputError("euclidean_projection: dimension mismatch");
  const auto& spec = set.spec();
  if (std::holds_alternative<FreeSet>(spec)) return x;
  if (const auto* s = std::get_if<AffineEquality>(&spec)) return project_affine(s->A, s->b, x);
  if (const auto* s = std::get_if<SumEquality>(&spec)) {
    return (x.array() - (x.sum() - s->target) / static_cast<double>(x.size())).matrix();
  }
  if (const auto* s = std::get_if<Ball>(&spec)) {
    const Vector off = x - s->center;
    const double r = off.norm();
    return r <= s->radius ? x : Vector(s->center + off * (s->radius / r));
  }
  if (const auto* s = std::get_if<Halfspace>(&spec)) {
    const double excess = s->a.dot(x) - s->b;
    return excess <= 0.0 ? x : Vector(x - s->a * (excess / s->a.squaredNorm()));
  }
  if (const auto* s = std::get_if<Box>(&spec)) return x.cwiseMax(s->lo).cwiseMin(s->hi);
  const auto& c = std::get<Consensus>(spec);
  const auto d = static_cast<Eigen::Index>(c.block_dim);
  Vector mean = Vector::Zero(d);
  for (std::size_t m = 0; m < c.members; ++m) mean += x.segment(static_cast<Eigen::Index>(m) * d, d);
  mean /= static_cast<double>(c.members);
  Vector z(x.size());
  for (std::size_t m = 0; m < c.members; ++m) z.segment(static_cast<Eigen::Index>(m) * d, d) = mean;
  return z;
}

Vector numeric_projection_oracle(const ConvexSet& set, const Vector& x, const WeightedNorm& norm, double tol,
                                 std::size_t max_iters) {
  const Vector& w = norm.weights();
  if (w.size() != x.size()) throw InputError("numeric_projection_oracle: dimension mismatch");
  const double step = 1.0 / w.maxCoeff();
  // Contraction factor of the gradient map; used to turn step lengths into error bounds.
  const double rate = 1.0 - w.minCoeff() / w.maxCoeff();
  Vector z = euclidean_projection(set, x);
  double last_moved = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vector next = euclidean_projection(set, z - step * w.cwiseProduct(z - x));
    const double moved = (next - z).norm();
    z = next;
    if (moved * (rate < 1.0 ? 1.0 / (1.0 - rate) : 1.0) <= tol * (1.0 + z.norm())) return z;
    // Rounding in the inner projection can leave the iteration cycling just above tol.
    if (moved >= last_moved && moved <= 1e3 * tol * (1.0 + z.norm())) return z;
    last_moved = moved;
  }
  throw OracleError("numeric projection oracle did not converge in " + std::to_string(max_iters) + " iterations");
}

}  // namespace cliqueopt::checks
