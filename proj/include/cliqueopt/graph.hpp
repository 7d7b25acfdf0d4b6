#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cliqueopt {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Time-invariant undirected graph on nodes 0..n-1. Indices are 0-based;
/// conversion from the 1-based external format happens at the I/O boundary.
class Graph {
 public:
  Graph() = default;

  /// Builds the graph, deduplicating repeated and reversed edges.
  /// Throws InputError on a self-loop or an out-of-range node.
  Graph(std::size_t n, const std::vector<Edge>& edges);

  /// Union of complete subgraphs on the given node sets.
  static Graph from_cliques(std::size_t n, const std::vector<std::vector<NodeId>>& cliques);

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool adjacent(NodeId i, NodeId j) const;

  /// Open neighbourhood, ascending.
  const std::vector<NodeId>& adjacency(NodeId i) const;

  /// Closed neighbourhood N_i = {j : (i,j) in E} + {i}, ascending.
  std::vector<NodeId> neighbors(NodeId i) const;

  /// Each undirected edge once, as (i, j) with i < j, in lexicographic order.
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  void check_node(NodeId i) const;

  std::size_t n_ = 0;
  std::vector<char> dense_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<Edge> edges_;
};

struct CliqueMembership {
  std::size_t clique;  ///< index into CliqueCover::cliques
  std::size_t rank;    ///< position of the node inside that clique (0-based)
};

/// Maximal cliques of a graph together with the per-node indexing the
/// clique-based projection needs.
struct CliqueCover {
  /// Each clique sorted ascending; the list itself sorted lexicographically.
  std::vector<std::vector<NodeId>> cliques;
  /// membership[i]: cliques containing node i, ascending clique index.
  std::vector<std::vector<CliqueMembership>> membership;
  /// weights[i] = 1 / |membership[i]|.
  std::vector<double> weights;

  std::size_t clique_count() const { return cliques.size(); }
  std::size_t node_count() const { return membership.size(); }

  /// Position of node i inside clique l. Throws InputError if i is not a member.
  std::size_t local_rank(std::size_t l, NodeId i) const;

  /// Rebuilds membership and weights from `cliques` (which must already be
  /// canonical). Exposed so tests can construct damaged covers.
  static CliqueCover from_cliques(std::size_t n, std::vector<std::vector<NodeId>> cliques);
};

inline constexpr std::size_t kDefaultCliqueCap = 100000;

/// Bron-Kerbosch with Tomita pivoting. Output is in canonical order.
/// Throws ResourceError if more than `cap` maximal cliques are found.
CliqueCover maximal_cliques(const Graph& g, std::size_t cap = kDefaultCliqueCap);

/// True iff N_i equals the union of the cliques containing i, for every i.
bool verify_neighbor_clique_identity(const Graph& g, const CliqueCover& cover);

/// Sorts each clique and the list of cliques into canonical order.
std::vector<std::vector<NodeId>> canonical_clique_order(std::vector<std::vector<NodeId>> cliques);

}  // namespace cliqueopt
