#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cliqueopt/linalg.hpp"
#include "cliqueopt/problem.hpp"

namespace cliqueopt {

enum class Algorithm { kCpgd, kAcpgd, kPgd };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// lambda_k for k >= 1.
class StepSchedule {
 public:
  struct Fixed {
    double t;
  };
  struct InvK {
    double c;
  };
  struct InvSqrtK {
    double c;
  };

  static StepSchedule fixed(double t);
  static StepSchedule inv_k(double c);
  static StepSchedule inv_sqrt_k(double c);
  /// "fixed:<t>", "invk:<c>" or "invsqrtk:<c>".
  static StepSchedule parse(const std::string& text);

  double at(std::size_t k) const;
  bool is_fixed() const { return std::holds_alternative<Fixed>(rule_); }
  std::optional<double> fixed_step() const;
  std::string describe() const;

 private:
  explicit StepSchedule(std::variant<Fixed, InvK, InvSqrtK> rule) : rule_(rule) {}
  std::variant<Fixed, InvK, InvSqrtK> rule_;
};

struct IterationRecord {
  std::size_t k = 0;
  double f = 0.0;
  double V = 0.0;
  std::optional<double> J;        ///< fixed-step runs only
  std::optional<double> rel_gap;  ///< when f* is known
  std::optional<double> H;        ///< diagnostics, k >= 1
  std::optional<double> bound;    ///< rate bound on J - f*, p = 1 fixed-step runs with x* known
  double elapsed_seconds = 0.0;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::kCpgd;
  std::size_t p = 1;
  StepSchedule schedule = StepSchedule::inv_k(1.0);
  std::size_t max_iters = 1000;
  std::size_t record_every = 1;
  bool diagnostics_hk = false;
  /// Defaults to the zero vector.
  std::optional<Vector> x0;
  std::optional<double> f_star;
  /// With f_star, enables the rate-bound column for p = 1 fixed-step CPGD/ACPGD.
  std::optional<Vector> x_star;
  /// Stop once rel_gap < tol and V < tol.
  std::optional<double> early_stop_tol;
  bool keep_iterates = false;
  /// Invoked for every recorded iteration.
  std::function<void(const IterationRecord&)> sink;
};

struct Trace {
  std::vector<IterationRecord> records;
  /// x(0), x(1), ... when keep_iterates is set.
  std::vector<Vector> iterates;
  Vector final_x;
  std::size_t iterations = 0;
  /// First k where J(x(k)) - f* exceeded the rate bound (beyond kBoundTolerance).
  std::optional<std::size_t> first_bound_violation;
};

/// Relative slack allowed on the rate bounds: violation iff
/// J - f* > bound + kBoundTolerance * (1 + |f*|).
inline constexpr double kBoundTolerance = 1e-9;

/// Nesterov momentum state: sigma_0 = 1, sigma_{k+1} = (1 + sqrt(1 + 4 sigma_k^2)) / 2.
struct AccelState {
  double sigma = 1.0;
  Vector x_hat;
  Vector x_prev;

  static double next_sigma(double sigma);
  /// theta_k = (sigma_k - 1) / sigma_{k+1}
  double theta() const { return (sigma - 1.0) / next_sigma(sigma); }
  /// x_hat <- x_next + theta_k (x_next - x_prev); then advance sigma and x_prev.
  void advance(const Vector& x_next);
};

/// Full-set projection P_D used by the PGD baseline.
using SetProjection = std::function<Vector(const Vector&)>;

/// x(k+1) = T^p(x(k) - lambda_{k+1} grad f(x(k))).
Trace run_cpgd(const Problem& problem, const SolverConfig& config);

/// x(k+1) = T^p(xh(k) - t grad f(xh(k))), xh(k+1) = x(k+1) + theta_k (x(k+1) - x(k)).
Trace run_acpgd(const Problem& problem, const SolverConfig& config);

/// x(k+1) = P_D(x(k) - lambda_{k+1} grad f(x(k))). With algorithm = kAcpgd the
/// same momentum sequence is applied (accelerated PGD).
Trace run_pgd(const Problem& problem, const SetProjection& project_D, const SolverConfig& config);

/// Dispatches on config.algorithm; PGD needs `project_D`.
Trace run_solver(const Problem& problem, const SolverConfig& config, const SetProjection& project_D = {});

/// H_k = f(x(k)) + V(y(k-1))/t - ||y(k-1) - T(y(k-1))||^2 / (2t).
double compute_Hk_diagnostic(const Problem& problem, double t, const Vector& x_k, const Vector& y_prev);

}  // namespace cliqueopt
