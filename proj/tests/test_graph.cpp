#include <gtest/gtest.h>

#include <set>

#include "cliqueopt/bench.hpp"
#include "cliqueopt/checks/instances.hpp"
#include "cliqueopt/checks/oracles.hpp"
#include "cliqueopt/errors.hpp"
#include "cliqueopt/graph.hpp"

using namespace cliqueopt;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }

std::vector<std::vector<NodeId>> fig1_cliques() {
  return {{0, 1, 2, 3, 4, 5}, {4, 5, 6, 7, 8}, {7, 8, 9, 10, 11}, {8, 9, 12, 13, 14, 15, 16, 17, 18, 19}};
}

}  // namespace

TEST(Graph, PathNeighbourhoodsAreClosed) {
  const Graph g = path3();
  EXPECT_EQ(g.neighbors(0), (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(g.neighbors(1), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(g.adjacency(1), (std::vector<NodeId>{0, 2}));
}

TEST(Graph, ReversedEdgeIsStoredOnce) {
  const Graph g(3, {{0, 1}, {1, 0}});
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.adjacent(1, 0));
  EXPECT_FALSE(g.adjacent(1, 2));
}

TEST(Graph, RejectsSelfLoopsAndUnknownNodes) {
  EXPECT_THROW(Graph(3, {{1, 1}}), InputError);
  EXPECT_THROW(Graph(3, {{0, 3}}), InputError);
  EXPECT_THROW(path3().neighbors(5), InputError);
}

TEST(Graph, Fig1NeighbourhoodOfNode9IsUnionOfItsCliques) {
  const Graph g = Graph::from_cliques(20, fig1_cliques());
  std::set<NodeId> expected;
  for (const auto& c : fig1_cliques()) {
    if (std::find(c.begin(), c.end(), 8) != c.end()) expected.insert(c.begin(), c.end());
  }
  std::vector<NodeId> scan;
  for (NodeId j = 0; j < 20; ++j) {
    if (j == 8 || g.adjacent(8, j)) scan.push_back(j);
  }
  EXPECT_EQ(g.neighbors(8), std::vector<NodeId>(expected.begin(), expected.end()));
  EXPECT_EQ(g.neighbors(8), scan);
  EXPECT_EQ(g.neighbors(8).front(), 4u);
  EXPECT_EQ(g.neighbors(8).size(), 16u);
}

TEST(MaximalCliques, TriangleHasOneClique) {
  const CliqueCover cover = maximal_cliques(Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  ASSERT_EQ(cover.cliques.size(), 1u);
  EXPECT_EQ(cover.weights, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(MaximalCliques, PathEdgesAreTheCliques) {
  const CliqueCover cover = maximal_cliques(path3());
  EXPECT_EQ(cover.cliques, (std::vector<std::vector<NodeId>>{{0, 1}, {1, 2}}));
  EXPECT_EQ(cover.weights, (std::vector<double>{1.0, 0.5, 1.0}));
  EXPECT_EQ(cover.local_rank(1, 1), 0u);
  EXPECT_EQ(cover.local_rank(0, 1), 1u);
  EXPECT_THROW(cover.local_rank(0, 2), InputError);
}

TEST(MaximalCliques, Fig1CoverAndWeights) {
  const CliqueCover cover = maximal_cliques(Graph::from_cliques(20, fig1_cliques()));
  EXPECT_EQ(cover.cliques, fig1_cliques());
  for (NodeId i = 0; i < 20; ++i) {
    double expected = 1.0;
    if (i == 4 || i == 5 || i == 7 || i == 9) expected = 0.5;
    if (i == 8) expected = 1.0 / 3.0;
    EXPECT_DOUBLE_EQ(cover.weights[i], expected) << "node " << i + 1;
  }
  EXPECT_EQ(cover.cliques, checks::brute_force_maximal_cliques(Graph::from_cliques(20, fig1_cliques())));
}

TEST(MaximalCliques, IsolatedNodeIsItsOwnClique) {
  const CliqueCover cover = maximal_cliques(Graph(3, {{0, 1}}));
  EXPECT_EQ(cover.cliques, (std::vector<std::vector<NodeId>>{{0, 1}, {2}}));
  EXPECT_DOUBLE_EQ(cover.weights[2], 1.0);
}

TEST(MaximalCliques, CapAndEmptyGraph) {
  EXPECT_THROW(maximal_cliques(path3(), 1), ResourceError);
  EXPECT_THROW(maximal_cliques(Graph(0, {})), InputError);
}

TEST(NeighbourCliqueIdentity, HoldsForRealCoversOnly) {
  const Graph g = Graph::from_cliques(20, fig1_cliques());
  const CliqueCover cover = maximal_cliques(g);
  EXPECT_TRUE(verify_neighbor_clique_identity(path3(), maximal_cliques(path3())));
  EXPECT_TRUE(verify_neighbor_clique_identity(g, cover));
  auto damaged = cover.cliques;
  damaged.erase(damaged.begin() + 1);
  EXPECT_FALSE(verify_neighbor_clique_identity(g, CliqueCover::from_cliques(20, damaged)));
}

TEST(MaximalCliques, RandomGraphsMatchBruteForce) {
  checks::Rng rng(7);
  const double probs[] = {0.2, 0.5, 0.8};
  for (int it = 0; it < 200; ++it) {
    const Graph g = checks::random_graph(rng.integer(1, 12), probs[it % 3], rng);
    const CliqueCover cover = maximal_cliques(g);
    ASSERT_EQ(cover.cliques, checks::brute_force_maximal_cliques(g)) << "graph " << it;
    ASSERT_TRUE(verify_neighbor_clique_identity(g, cover));
    for (std::size_t l = 0; l < cover.cliques.size(); ++l) {
      for (NodeId i : cover.cliques[l]) ASSERT_EQ(cover.cliques[l][cover.local_rank(l, i)], i);
    }
    for (NodeId i = 0; i < g.size(); ++i) {
      ASSERT_GE(cover.membership[i].size(), 1u);
      ASSERT_DOUBLE_EQ(cover.weights[i], 1.0 / static_cast<double>(cover.membership[i].size()));
    }
    ASSERT_EQ(maximal_cliques(g).cliques, cover.cliques);
  }
}

TEST(MaximalCliques, CanonicalOrderSortsMembersThenList) {
  EXPECT_EQ(canonical_clique_order({{3, 1}, {2, 0}, {1, 0}}),
            (std::vector<std::vector<NodeId>>{{0, 1}, {0, 2}, {1, 3}}));
}
