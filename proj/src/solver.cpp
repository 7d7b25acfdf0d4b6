#include "cliqueopt/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cliqueopt/errors.hpp"
#include "trace_recorder.hpp"

namespace cliqueopt {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kCpgd:
      return "cpgd";
    case Algorithm::kAcpgd:
      return "acpgd";
    case Algorithm::kPgd:
      return "pgd";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "cpgd") return Algorithm::kCpgd;
  if (name == "acpgd") return Algorithm::kAcpgd;
  if (name == "pgd") return Algorithm::kPgd;
  throw InputError("unknown algorithm '" + name + "' (expected cpgd, acpgd or pgd)");
}

StepSchedule StepSchedule::fixed(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("fixed step must be positive");
  return StepSchedule(Fixed{t});
}

StepSchedule StepSchedule::inv_k(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("step constant c must be positive");
  return StepSchedule(InvK{c});
}

StepSchedule StepSchedule::inv_sqrt_k(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("step constant c must be positive");
  return StepSchedule(InvSqrtK{c});
}

StepSchedule StepSchedule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError("step '" + text + "': expected fixed:<t>, invk:<c> or invsqrtk:<c>");
  }
  const std::string kind = text.substr(0, colon);
  const std::string number = text.substr(colon + 1);
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(number, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != number.size()) throw InputError("step '" + text + "': bad number");
  if (kind == "fixed") return fixed(value);
  if (kind == "invk") return inv_k(value);
  if (kind == "invsqrtk") return inv_sqrt_k(value);
  throw InputError("step '" + text + "': unknown rule '" + kind + "'");
}

double StepSchedule::at(std::size_t k) const {
  if (k == 0) throw InputError("step sizes are indexed from k = 1");
  const double kk = static_cast<double>(k);
  if (const auto* f = std::get_if<Fixed>(&rule_)) return f->t;
  if (const auto* a = std::get_if<InvK>(&rule_)) return a->c / kk;
  return std::get<InvSqrtK>(rule_).c / std::sqrt(kk);
}

std::optional<double> StepSchedule::fixed_step() const {
  if (const auto* f = std::get_if<Fixed>(&rule_)) return f->t;
  return std::nullopt;
}

std::string StepSchedule::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (const auto* f = std::get_if<Fixed>(&rule_)) {
    out << "fixed:" << f->t;
  } else if (const auto* a = std::get_if<InvK>(&rule_)) {
    out << "invk:" << a->c;
  } else {
    out << "invsqrtk:" << std::get<InvSqrtK>(rule_).c;
  }
  return out.str();
}

double AccelState::next_sigma(double sigma) { return (1.0 + std::sqrt(1.0 + 4.0 * sigma * sigma)) / 2.0; }

void AccelState::advance(const Vector& x_next) {
  const double sigma_next = next_sigma(sigma);
  x_hat = x_next + ((sigma - 1.0) / sigma_next) * (x_next - x_prev);
  x_prev = x_next;
  sigma = sigma_next;
}

double compute_Hk_diagnostic(const Problem& problem, double t, const Vector& x_k, const Vector& y_prev) {
  if (!(t > 0.0)) throw InputError("H_k diagnostic: step t must be positive");
  const Vector residual = y_prev - problem.op.apply(y_prev);
  return problem.objective.value(x_k) + problem.op.potential(y_prev) / t - residual.squaredNorm() / (2.0 * t);
}

namespace detail {

void validate_config(const Problem& problem, const SolverConfig& config, bool full_projection) {
  if (config.p == 0) throw InputError("solver: p must be at least 1");
  if (config.record_every == 0) throw InputError("solver: record_every must be at least 1");
  if (config.x0 && static_cast<std::size_t>(config.x0->size()) != problem.total_dim()) {
    throw InputError("solver: x0 has the wrong length");
  }
  if (config.x_star && static_cast<std::size_t>(config.x_star->size()) != problem.total_dim()) {
    throw InputError("solver: x_star has the wrong length");
  }
  if (const auto t = config.schedule.fixed_step()) {
    const double limit = 1.0 / problem.objective.smoothness();
    if (*t > limit * (1.0 + 1e-12)) {
      throw InputError("solver: fixed step " + config.schedule.describe() + " exceeds 1/L = " +
                       std::to_string(limit));
    }
  }
  if (config.algorithm == Algorithm::kAcpgd && !config.schedule.is_fixed()) {
    throw InputError("solver: the accelerated method requires a fixed step");
  }
  if (config.diagnostics_hk && (full_projection || !config.schedule.is_fixed() || config.p != 1)) {
    throw InputError("solver: H_k diagnostics need a fixed-step clique run with p = 1");
  }
}

TraceRecorder::TraceRecorder(const Problem& problem, const SolverConfig& config, bool accelerated)
    : problem_(problem),
      config_(config),
      accelerated_(accelerated),
      bounds_(config.schedule.is_fixed() && config.p == 1 && config.x_star && config.f_star) {}

void TraceRecorder::start(const Vector& x0) {
  start_ = std::chrono::steady_clock::now();
  if (!x0.allFinite()) throw NumericError("solver: non-finite initial point");
  if (bounds_) x0_dist2_ = (x0 - *config_.x_star).squaredNorm();
  record(0, x0, nullptr);
  if (config_.keep_iterates) trace_.iterates.push_back(x0);
}

bool TraceRecorder::step(std::size_t k, const Vector& x, const Vector& y_prev) {
  if (!x.allFinite()) throw NumericError("solver: non-finite iterate at k = " + std::to_string(k));
  trace_.iterations = k;
  if (config_.keep_iterates) trace_.iterates.push_back(x);
  const bool due = k % config_.record_every == 0 || k == config_.max_iters;
  if (due || config_.early_stop_tol) return record(k, x, &y_prev);
  return false;
}

Trace TraceRecorder::finish(Vector x) {
  trace_.final_x = std::move(x);
  return std::move(trace_);
}

bool TraceRecorder::record(std::size_t k, const Vector& x, const Vector* y_prev) {
  IterationRecord rec;
  rec.k = k;
  rec.f = problem_.objective.value(x);
  rec.V = problem_.op.potential(x);
  const auto t = config_.schedule.fixed_step();
  if (t) rec.J = rec.f + rec.V / *t;
  if (config_.f_star) {
    const double fs = *config_.f_star;
    rec.rel_gap = fs != 0.0 ? std::abs(rec.f - fs) / std::abs(fs) : std::abs(rec.f);
  }
  if (config_.diagnostics_hk && y_prev) {
    // p = 1, so T(y(k-1)) is x(k) itself.
    rec.H = rec.f + problem_.op.potential(*y_prev) / *t - (*y_prev - x).squaredNorm() / (2.0 * *t);
  }
  if (bounds_ && k >= 1) {
    const double kk = static_cast<double>(k);
    rec.bound = accelerated_ ? 2.0 * x0_dist2_ / (*t * kk * kk) : x0_dist2_ / (2.0 * *t * kk);
    const double excess = *rec.J - *config_.f_star - *rec.bound;
    if (excess > kBoundTolerance * (1.0 + std::abs(*config_.f_star)) && !trace_.first_bound_violation) {
      trace_.first_bound_violation = k;
    }
  }
  if (!std::isfinite(rec.f) || !std::isfinite(rec.V)) {
    throw NumericError("solver: non-finite objective or potential at k = " + std::to_string(k));
  }
  rec.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const bool due = k % config_.record_every == 0 || k == config_.max_iters;
  const bool stop = config_.early_stop_tol && rec.rel_gap && *rec.rel_gap < *config_.early_stop_tol &&
                    rec.V < *config_.early_stop_tol;
  if (due || stop) {
    if (config_.sink) config_.sink(rec);
    trace_.records.push_back(std::move(rec));
  }
  return stop;
}

}  // namespace detail

namespace {

Trace iterate(const Problem& problem, const SolverConfig& config, bool accelerated, const SetProjection& step) {
  detail::TraceRecorder recorder(problem, config, accelerated);
  Vector x = config.x0 ? *config.x0 : Vector::Zero(static_cast<Eigen::Index>(problem.total_dim()));
  recorder.start(x);
  AccelState accel{1.0, x, x};
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const Vector& base = accelerated ? accel.x_hat : x;
    const double lambda = config.schedule.at(k + 1);
    const Vector y = base - lambda * problem.objective.gradient(base);
    Vector x_next = step(y);
    if (accelerated) accel.advance(x_next);
    x = std::move(x_next);
    if (recorder.step(k + 1, x, y)) break;
  }
  return recorder.finish(std::move(x));
}

SetProjection clique_step(const Problem& problem, std::size_t p) {
  return [&problem, p](const Vector& y) { return problem.op.apply_power(y, p); };
}

}  // namespace

Trace run_cpgd(const Problem& problem, const SolverConfig& config) {
  if (config.algorithm != Algorithm::kCpgd) throw InputError("run_cpgd: config.algorithm must be cpgd");
  detail::validate_config(problem, config, false);
  return iterate(problem, config, false, clique_step(problem, config.p));
}

Trace run_acpgd(const Problem& problem, const SolverConfig& config) {
  if (config.algorithm != Algorithm::kAcpgd) throw InputError("run_acpgd: config.algorithm must be acpgd");
  detail::validate_config(problem, config, false);
  return iterate(problem, config, true, clique_step(problem, config.p));
}

Trace run_pgd(const Problem& problem, const SetProjection& project_D, const SolverConfig& config) {
  if (config.algorithm == Algorithm::kCpgd) throw InputError("run_pgd: use algorithm pgd or acpgd");
  if (!project_D) throw InputError("run_pgd: no projection onto D supplied");
  detail::validate_config(problem, config, true);
  return iterate(problem, config, config.algorithm == Algorithm::kAcpgd, project_D);
}

Trace run_solver(const Problem& problem, const SolverConfig& config, const SetProjection& project_D) {
  switch (config.algorithm) {
    case Algorithm::kCpgd:
      return run_cpgd(problem, config);
    case Algorithm::kAcpgd:
      return run_acpgd(problem, config);
    case Algorithm::kPgd:
      return run_pgd(problem, project_D, config);
  }
  throw InputError("run_solver: unknown algorithm");
}

}  // namespace cliqueopt
