#pragma once

#include <chrono>

#include "cliqueopt/problem.hpp"
#include "cliqueopt/solver.hpp"

namespace cliqueopt::detail {

/// Builds IterationRecords for a run; shared by the centralized solvers and
/// the message-passing simulator so both report identical traces.
class TraceRecorder {
 public:
  TraceRecorder(const Problem& problem, const SolverConfig& config, bool accelerated);

  void start(const Vector& x0);

  /// Called after every outer iteration with x(k) and y(k-1), where
  /// x(k) = T^p(y(k-1)). Returns true when the early-stop criterion fires.
  bool step(std::size_t k, const Vector& x, const Vector& y_prev);

  Trace finish(Vector x);

 private:
  bool record(std::size_t k, const Vector& x, const Vector* y_prev);

  const Problem& problem_;
  const SolverConfig& config_;
  bool accelerated_;
  bool bounds_;
  double x0_dist2_ = 0.0;
  std::chrono::steady_clock::time_point start_;
  Trace trace_;
};

void validate_config(const Problem& problem, const SolverConfig& config, bool full_projection);

}  // namespace cliqueopt::detail
