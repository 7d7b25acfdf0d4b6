#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "cliqueopt/graph.hpp"
#include "cliqueopt/linalg.hpp"
#include "cliqueopt/problem.hpp"
#include "cliqueopt/solver.hpp"

namespace cliqueopt {

/// x_sender^{[s]} sent to one neighbour during inner round s of outer iteration k.
struct RoundMessage {
  std::size_t outer_k = 0;
  std::size_t inner_s = 0;
  NodeId sender = 0;
  NodeId receiver = 0;
  Vector payload;
};

struct SimnetOptions {
  /// Agents evaluated per round by this many workers; results do not depend on it.
  std::size_t threads = 1;
  /// When set, every delivered message is written as one JSON line (1-based node ids).
  std::ostream* message_log = nullptr;
};

/// (reader, owner) -> number of reads of owner's state by reader's update.
using ReadCounts = std::map<std::pair<NodeId, NodeId>, std::size_t>;

struct DistributedRun {
  Trace trace;
  ReadCounts reads;
  /// Messages delivered in each outer iteration.
  std::vector<std::size_t> messages_per_iteration;
};

struct LocalityReport {
  ReadCounts reads;
  /// Distinct (reader, owner) pairs with owner outside the reader's closed neighbourhood.
  std::vector<std::pair<NodeId, NodeId>> violations;
  std::size_t violating_reads = 0;

  bool clean() const { return violations.empty(); }
};

/// Runs CPGD or ACPGD (per config.algorithm) as n synchronous agents. Agent i
/// keeps only its own estimate, its cliques from `cover` (with the block data
/// of problem.op) and whatever its graph neighbours sent it this round.
/// Reads that the network could not have served are counted and served from
/// a global snapshot so the run still completes; locality_audit flags them.
DistributedRun run_distributed_cpgd(const Problem& problem, const CliqueCover& cover, const SolverConfig& config,
                                    const SimnetOptions& options = {});

LocalityReport locality_audit(const DistributedRun& run, const Graph& graph);

}  // namespace cliqueopt
