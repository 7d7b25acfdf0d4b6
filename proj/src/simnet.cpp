#include "cliqueopt/simnet.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <thread>

#include "cliqueopt/errors.hpp"
#include "trace_recorder.hpp"

namespace cliqueopt {

namespace {

struct LocalClique {
  std::size_t index;
  std::vector<NodeId> members;
  std::size_t rank;
  WeightedProjector projector;
};

/// Payloads received in the current inner round, sorted by sender.
class Inbox {
 public:
  void clear() { entries_.clear(); }
  void deliver(NodeId sender, const Vector& payload) { entries_.emplace_back(sender, payload); }
  void seal() {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  const Vector* find(NodeId sender) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), sender,
                               [](const auto& e, NodeId s) { return e.first < s; });
    return it != entries_.end() && it->first == sender ? &it->second : nullptr;
  }

 private:
  std::vector<std::pair<NodeId, Vector>> entries_;
};

class Agent {
 public:
  Agent(NodeId id, std::size_t d, const Objective& objective, std::vector<LocalClique> cliques)
      : id_(id), d_(d), objective_(objective), cliques_(std::move(cliques)) {}

  NodeId id() const { return id_; }
  const Vector& estimate() const { return x_; }
  const Vector& inner() const { return inner_; }
  Inbox& inbox() { return inbox_; }

  void init(const Vector& x0) {
    x_ = x0;
    x_prev_ = x0;
    x_hat_ = x0;
  }

  /// x_i^{[1]} = base_i - lambda grad f_i(base_i), base = x_hat for the accelerated method.
  void gradient_step(double lambda, bool accelerated) {
    const Vector& base = accelerated ? x_hat_ : x_;
    inner_ = base - lambda * objective_.agent_gradient(id_, base);
  }

  /// T_i applied to the neighbour values received this round. `snapshot`
  /// serves reads the inbox cannot; those are what the audit reports.
  void clique_projection(const std::vector<Vector>& snapshot) {
    const auto d = static_cast<Eigen::Index>(d_);
    Vector sum = Vector::Zero(d);
    for (const auto& c : cliques_) {
      Vector xc(static_cast<Eigen::Index>(c.members.size()) * d);
      for (std::size_t m = 0; m < c.members.size(); ++m) {
        xc.segment(static_cast<Eigen::Index>(m) * d, d) = read(c.members[m], snapshot);
      }
      const Vector proj = c.projector.project(xc);
      sum += proj.segment(static_cast<Eigen::Index>(c.rank) * d, d);
    }
    next_inner_ = sum / static_cast<double>(cliques_.size());
  }

  void commit_round() { inner_ = next_inner_; }

  void finish_outer(bool accelerated, double sigma) {
    if (accelerated) {
      const double sigma_next = AccelState::next_sigma(sigma);
      x_hat_ = inner_ + ((sigma - 1.0) / sigma_next) * (inner_ - x_);
    }
    x_prev_ = x_;
    x_ = inner_;
  }

  const std::map<NodeId, std::size_t>& reads() const { return reads_; }

 private:
  const Vector& read(NodeId owner, const std::vector<Vector>& snapshot) {
    ++reads_[owner];
    if (owner == id_) return inner_;
    if (const Vector* v = inbox_.find(owner)) return *v;
    return snapshot[owner];
  }

  NodeId id_;
  std::size_t d_;
  const Objective& objective_;
  std::vector<LocalClique> cliques_;
  Vector x_, x_prev_, x_hat_, inner_, next_inner_;
  Inbox inbox_;
  std::map<NodeId, std::size_t> reads_;
};

std::vector<Agent> make_agents(const Problem& problem, const CliqueCover& cover) {
  const auto& op = problem.op;
  if (cover.clique_count() != op.clique_count() || cover.node_count() != op.agents()) {
    throw InputError("simnet: cover does not match the problem's clique structure");
  }
  const std::size_t d = op.agent_dim();
  const auto dd = static_cast<Eigen::Index>(d);
  std::vector<Agent> agents;
  agents.reserve(cover.node_count());
  for (NodeId i = 0; i < cover.node_count(); ++i) {
    if (cover.membership[i].empty()) throw InputError("simnet: node " + std::to_string(i) + " is in no clique");
    std::vector<LocalClique> local;
    for (const auto& m : cover.membership[i]) {
      const auto& members = cover.cliques[m.clique];
      if (members.size() * d != op.set(m.clique).dim()) {
        throw InputError("simnet: clique " + std::to_string(m.clique) + " size disagrees with its block");
      }
      Vector w(static_cast<Eigen::Index>(members.size()) * dd);
      for (std::size_t r = 0; r < members.size(); ++r) {
        w.segment(static_cast<Eigen::Index>(r) * dd, dd).setConstant(cover.weights[members[r]]);
      }
      local.push_back({m.clique, members, m.rank, WeightedProjector(op.set(m.clique), WeightedNorm(std::move(w)))});
    }
    agents.emplace_back(i, d, problem.objective, std::move(local));
  }
  return agents;
}

template <class Fn>
void for_each_agent(std::vector<Agent>& agents, std::size_t threads, Fn fn) {
  if (threads <= 1 || agents.size() < 2) {
    for (auto& a : agents) fn(a);
    return;
  }
  const std::size_t workers = std::min(threads, agents.size());
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < agents.size(); i += workers) fn(agents[i]);
    });
  }
  // jthread joins on destruction: the round barrier.
}

void log_message(std::ostream& out, const RoundMessage& msg) {
  out << "{\"outer_k\":" << msg.outer_k << ",\"inner_s\":" << msg.inner_s << ",\"sender\":" << msg.sender + 1
      << ",\"receiver\":" << msg.receiver + 1 << ",\"payload\":[";
  const auto old = out.precision(17);
  for (Eigen::Index j = 0; j < msg.payload.size(); ++j) {
    if (j) out << ',';
    out << msg.payload[j];
  }
  out.precision(old);
  out << "]}\n";
}

}  // namespace

DistributedRun run_distributed_cpgd(const Problem& problem, const CliqueCover& cover, const SolverConfig& config,
                                    const SimnetOptions& options) {
  if (config.algorithm == Algorithm::kPgd) throw InputError("simnet: PGD is centralized and cannot be simulated");
  detail::validate_config(problem, config, false);
  const bool accelerated = config.algorithm == Algorithm::kAcpgd;
  const std::size_t n = problem.agents();
  const auto d = static_cast<Eigen::Index>(problem.agent_dim());

  std::vector<Agent> agents = make_agents(problem, cover);
  Vector x = config.x0 ? *config.x0 : Vector::Zero(static_cast<Eigen::Index>(problem.total_dim()));
  for (auto& a : agents) a.init(x.segment(static_cast<Eigen::Index>(a.id()) * d, d));

  detail::TraceRecorder recorder(problem, config, accelerated);
  recorder.start(x);
  DistributedRun run;
  std::vector<Vector> snapshot(n);
  Vector y(x.size());
  double sigma = 1.0;

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const double lambda = config.schedule.at(k + 1);
    for_each_agent(agents, options.threads, [&](Agent& a) { a.gradient_step(lambda, accelerated); });
    for (const auto& a : agents) y.segment(static_cast<Eigen::Index>(a.id()) * d, d) = a.inner();

    std::size_t messages = 0;
    for (std::size_t s = 1; s <= config.p; ++s) {
      for (auto& a : agents) {
        a.inbox().clear();
        snapshot[a.id()] = a.inner();
      }
      // Synchronous broadcast of x_i^{[s]} along the edges of the graph.
      for (const auto& sender : agents) {
        for (NodeId j : problem.graph.adjacency(sender.id())) {
          agents[j].inbox().deliver(sender.id(), sender.inner());
          ++messages;
          if (options.message_log) {
            log_message(*options.message_log, RoundMessage{k, s, sender.id(), j, sender.inner()});
          }
        }
      }
      for (auto& a : agents) a.inbox().seal();
      for_each_agent(agents, options.threads, [&](Agent& a) { a.clique_projection(snapshot); });
      for (auto& a : agents) a.commit_round();
    }
    for (auto& a : agents) a.finish_outer(accelerated, sigma);
    sigma = AccelState::next_sigma(sigma);
    run.messages_per_iteration.push_back(messages);

    for (const auto& a : agents) x.segment(static_cast<Eigen::Index>(a.id()) * d, d) = a.estimate();
    if (recorder.step(k + 1, x, y)) break;
  }
  run.trace = recorder.finish(x);
  for (const auto& a : agents) {
    for (const auto& [owner, count] : a.reads()) run.reads[{a.id(), owner}] += count;
  }
  return run;
}

LocalityReport locality_audit(const DistributedRun& run, const Graph& graph) {
  LocalityReport report;
  report.reads = run.reads;
  for (const auto& [pair, count] : run.reads) {
    const auto [reader, owner] = pair;
    if (reader != owner && !graph.adjacent(reader, owner)) {
      report.violations.push_back(pair);
      report.violating_reads += count;
    }
  }
  return report;
}

}  // namespace cliqueopt
