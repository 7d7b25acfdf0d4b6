#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cliqueopt/linalg.hpp"

namespace cliqueopt {

/// f_i(x_i) = 1/2 (x_i - a)^T Q (x_i - a), Q symmetric positive semidefinite.
struct QuadraticTerm {
  Matrix Q;
  Vector a;
};

/// Arbitrary smooth convex term given by callables over R^d.
struct GenericTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

using AgentTerm = std::variant<QuadraticTerm, GenericTerm>;

/// Separable objective f(x) = sum_i f_i(x_i) over the stacked vector x in R^{nd}.
class Objective {
 public:
  /// `smoothness` overrides the computed L; it is required when any term is generic.
  /// Every gradient is checked against central differences on a few probe points.
  Objective(std::vector<AgentTerm> terms, std::size_t d, std::optional<double> smoothness = std::nullopt,
            std::optional<double> strong_monotonicity = std::nullopt);

  /// f_i = 1/2 ||x_i - a_i||^2 with a the stacked targets.
  static Objective squared_distance(const Vector& a, std::size_t d);

  std::size_t agents() const { return terms_.size(); }
  std::size_t agent_dim() const { return d_; }
  std::size_t total_dim() const { return terms_.size() * d_; }
  const std::vector<AgentTerm>& terms() const { return terms_; }
  bool is_quadratic() const;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double agent_value(std::size_t i, const Vector& xi) const;
  Vector agent_gradient(std::size_t i, const Vector& xi) const;

  /// Lipschitz constant L of the gradient.
  double smoothness() const { return L_; }
  /// Strong monotonicity modulus mu when known (computed for quadratics).
  std::optional<double> strong_monotonicity() const { return mu_; }

 private:
  void check_dim(const Vector& x) const;

  std::vector<AgentTerm> terms_;
  std::size_t d_ = 1;
  double L_ = 0.0;
  std::optional<double> mu_;
};

/// Largest Hessian eigenvalue over agents. Throws UnsupportedError for generic terms.
double quadratic_L(const Objective& objective);

}  // namespace cliqueopt
