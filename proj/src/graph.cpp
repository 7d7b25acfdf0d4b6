#include "cliqueopt/graph.hpp"

#include <algorithm>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

Graph::Graph(std::size_t n, const std::vector<Edge>& edges)
    : n_(n), dense_(n * n, 0), adj_(n) {
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references a node outside 0.." + std::to_string(n) + "-1");
    }
    if (a == b) {
      throw InputError("self-loop on node " + std::to_string(a));
    }
    dense_[a * n + b] = 1;
    dense_[b * n + a] = 1;
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (dense_[i * n + j]) {
        adj_[i].push_back(j);
        if (i < j) edges_.emplace_back(i, j);
      }
    }
  }
}

Graph Graph::from_cliques(std::size_t n, const std::vector<std::vector<NodeId>>& cliques) {
  std::vector<Edge> edges;
  for (const auto& c : cliques) {
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        edges.emplace_back(c[a], c[b]);
      }
    }
  }
  return Graph(n, edges);
}

void Graph::check_node(NodeId i) const {
  if (i >= n_) {
    throw InputError("node " + std::to_string(i) + " out of range for graph of size " +
                     std::to_string(n_));
  }
}

bool Graph::adjacent(NodeId i, NodeId j) const {
  check_node(i);
  check_node(j);
  return dense_[i * n_ + j] != 0;
}

const std::vector<NodeId>& Graph::adjacency(NodeId i) const {
  check_node(i);
  return adj_[i];
}

std::vector<NodeId> Graph::neighbors(NodeId i) const {
  check_node(i);
  std::vector<NodeId> out = adj_[i];
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

std::size_t CliqueCover::local_rank(std::size_t l, NodeId i) const {
  if (i < membership.size()) {
    for (const auto& m : membership[i]) {
      if (m.clique == l) return m.rank;
    }
  }
  throw InputError("node " + std::to_string(i) + " is not a member of clique " +
                   std::to_string(l));
}

std::vector<std::vector<NodeId>> canonical_clique_order(std::vector<std::vector<NodeId>> cliques) {
  for (auto& c : cliques) std::sort(c.begin(), c.end());
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

CliqueCover CliqueCover::from_cliques(std::size_t n, std::vector<std::vector<NodeId>> cliques) {
  CliqueCover cover;
  cover.cliques = std::move(cliques);
  cover.membership.assign(n, {});
  for (std::size_t l = 0; l < cover.cliques.size(); ++l) {
    const auto& c = cover.cliques[l];
    for (std::size_t r = 0; r < c.size(); ++r) {
      if (c[r] >= n) {
        throw InputError("clique " + std::to_string(l) + " references node " +
                         std::to_string(c[r]) + " outside the graph");
      }
      cover.membership[c[r]].push_back({l, r});
    }
  }
  cover.weights.assign(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    // A node outside every clique gets weight 0; only damaged covers do that.
    if (!cover.membership[i].empty()) {
      cover.weights[i] = 1.0 / static_cast<double>(cover.membership[i].size());
    }
  }
  return cover;
}

namespace {

class BronKerbosch {
 public:
  BronKerbosch(const Graph& g, std::size_t cap) : g_(g), cap_(cap) {}

  std::vector<std::vector<NodeId>> run() {
    std::vector<NodeId> r;
    std::vector<NodeId> p(g_.size());
    for (NodeId i = 0; i < g_.size(); ++i) p[i] = i;
    expand(r, p, {});
    return std::move(found_);
  }

 private:
  // P and X are kept sorted so that intersections are linear merges.
  std::vector<NodeId> intersect(const std::vector<NodeId>& s, NodeId v) const {
    const auto& nv = g_.adjacency(v);
    std::vector<NodeId> out;
    std::set_intersection(s.begin(), s.end(), nv.begin(), nv.end(), std::back_inserter(out));
    return out;
  }

  NodeId choose_pivot(const std::vector<NodeId>& p, const std::vector<NodeId>& x) const {
    NodeId best = p.empty() ? x.front() : p.front();
    std::size_t best_count = 0;
    bool first = true;
    for (const auto* set : {&p, &x}) {
      for (NodeId u : *set) {
        std::size_t count = intersect(p, u).size();
        if (first || count > best_count) {
          best = u;
          best_count = count;
          first = false;
        }
      }
    }
    return best;
  }

  void expand(std::vector<NodeId>& r, std::vector<NodeId> p, std::vector<NodeId> x) {
    if (p.empty()) {
      if (x.empty()) {
        if (found_.size() >= cap_) {
          throw ResourceError("maximal clique enumeration exceeded the cap of " +
                              std::to_string(cap_) + " cliques");
        }
        found_.push_back(r);
      }
      return;
    }
    const NodeId pivot = choose_pivot(p, x);
    const auto& pivot_adj = g_.adjacency(pivot);
    std::vector<NodeId> candidates;
    std::set_difference(p.begin(), p.end(), pivot_adj.begin(), pivot_adj.end(),
                        std::back_inserter(candidates));
    for (NodeId v : candidates) {
      r.push_back(v);
      expand(r, intersect(p, v), intersect(x, v));
      r.pop_back();
      p.erase(std::lower_bound(p.begin(), p.end(), v));
      x.insert(std::lower_bound(x.begin(), x.end(), v), v);
    }
  }

  const Graph& g_;
  std::size_t cap_;
  std::vector<std::vector<NodeId>> found_;
};

}  // namespace

CliqueCover maximal_cliques(const Graph& g, std::size_t cap) {
  if (g.size() == 0) throw InputError("maximal_cliques: graph has no nodes");
  auto cliques = canonical_clique_order(BronKerbosch(g, cap).run());
  return CliqueCover::from_cliques(g.size(), std::move(cliques));
}

bool verify_neighbor_clique_identity(const Graph& g, const CliqueCover& cover) {
  if (cover.node_count() != g.size()) return false;
  for (NodeId i = 0; i < g.size(); ++i) {
    std::vector<NodeId> merged;
    for (const auto& m : cover.membership[i]) {
      const auto& c = cover.cliques[m.clique];
      merged.insert(merged.end(), c.begin(), c.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    if (merged != g.neighbors(i)) return false;
  }
  return true;
}

}  // namespace cliqueopt
