#include "cliqueopt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

namespace {

double agent_value_impl(const AgentTerm& term, const Vector& xi) {
  if (const auto* q = std::get_if<QuadraticTerm>(&term)) {
    const Vector r = xi - q->a;
    return 0.5 * r.dot(q->Q * r);
  }
  return std::get<GenericTerm>(term).value(xi);
}

Vector agent_gradient_impl(const AgentTerm& term, const Vector& xi) {
  if (const auto* q = std::get_if<QuadraticTerm>(&term)) {
    return q->Q * (xi - q->a);
  }
  return std::get<GenericTerm>(term).gradient(xi);
}

void check_gradient(std::size_t agent, const AgentTerm& term, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Vector> probes = {Vector::Zero(n), Vector::Ones(n), Vector::LinSpaced(n, -1.5, 2.0)};
  for (const Vector& x : probes) {
    const Vector g = agent_gradient_impl(term, x);
    if (g.size() != n) {
      throw InputError("objective term " + std::to_string(agent) + ": gradient has wrong length");
    }
    Vector fd(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (agent_value_impl(term, xp) - agent_value_impl(term, xm)) / (2 * h);
    }
    if ((g - fd).norm() > 1e-5 * (1.0 + g.norm())) {
      throw InputError("objective term " + std::to_string(agent) +
                       ": gradient disagrees with finite differences");
    }
  }
}

}  // namespace

Objective::Objective(std::vector<AgentTerm> terms, std::size_t d, std::optional<double> smoothness,
                     std::optional<double> strong_monotonicity)
    : terms_(std::move(terms)), d_(d), mu_(strong_monotonicity) {
  if (d_ == 0) throw InputError("objective: per-agent dimension must be positive");
  if (terms_.empty()) throw InputError("objective: no agent terms");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (const auto* q = std::get_if<QuadraticTerm>(&terms_[i])) {
      const auto n = static_cast<Eigen::Index>(d_);
      if (q->Q.rows() != n || q->Q.cols() != n || q->a.size() != n) {
        throw InputError("objective term " + std::to_string(i) + ": quadratic data must be " +
                         std::to_string(d_) + "-dimensional");
      }
      if (!q->Q.isApprox(q->Q.transpose(), 1e-12)) {
        throw InputError("objective term " + std::to_string(i) + ": Q must be symmetric");
      }
      const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(q->Q).eigenvalues().minCoeff();
      if (min_eig < -1e-12) {
        throw UnsupportedError("objective term " + std::to_string(i) + ": Q is indefinite");
      }
    } else {
      const auto& g = std::get<GenericTerm>(terms_[i]);
      if (!g.value || !g.gradient) {
        throw InputError("objective term " + std::to_string(i) + ": missing value or gradient");
      }
    }
    check_gradient(i, terms_[i], d_);
  }
  if (smoothness) {
    if (!(*smoothness > 0.0) || !std::isfinite(*smoothness)) {
      throw InputError("objective: smoothness constant L must be positive");
    }
    L_ = *smoothness;
  } else if (is_quadratic()) {
    L_ = quadratic_L(*this);
    if (!(L_ > 0.0)) throw InputError("objective: all Hessians vanish, L would be 0");
  } else {
    throw InputError("objective: L must be supplied for non-quadratic terms");
  }
  if (!mu_ && is_quadratic()) {
    double mu = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) {
      mu = std::min(mu, Eigen::SelfAdjointEigenSolver<Matrix>(std::get<QuadraticTerm>(t).Q)
                            .eigenvalues()
                            .minCoeff());
    }
    if (mu > 0.0) mu_ = mu;
  }
}

Objective Objective::squared_distance(const Vector& a, std::size_t d) {
  if (d == 0 || a.size() % static_cast<Eigen::Index>(d) != 0) {
    throw InputError("squared_distance: target length is not a multiple of d");
  }
  const auto n = static_cast<std::size_t>(a.size()) / d;
  const auto dd = static_cast<Eigen::Index>(d);
  std::vector<AgentTerm> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    terms.emplace_back(QuadraticTerm{Matrix::Identity(dd, dd), a.segment(static_cast<Eigen::Index>(i) * dd, dd)});
  }
  return Objective(std::move(terms), d);
}

bool Objective::is_quadratic() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const AgentTerm& t) { return std::holds_alternative<QuadraticTerm>(t); });
}

void Objective::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != total_dim()) {
    throw InputError("objective: expected a vector of length " + std::to_string(total_dim()) + ", got " +
                     std::to_string(x.size()));
  }
}

double Objective::value(const Vector& x) const {
  check_dim(x);
  const auto d = static_cast<Eigen::Index>(d_);
  double total = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    total += agent_value_impl(terms_[i], x.segment(static_cast<Eigen::Index>(i) * d, d));
  }
  return total;
}

Vector Objective::gradient(const Vector& x) const {
  check_dim(x);
  const auto d = static_cast<Eigen::Index>(d_);
  Vector g(x.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * d;
    g.segment(off, d) = agent_gradient_impl(terms_[i], x.segment(off, d));
  }
  return g;
}

double Objective::agent_value(std::size_t i, const Vector& xi) const {
  return agent_value_impl(terms_.at(i), xi);
}

Vector Objective::agent_gradient(std::size_t i, const Vector& xi) const {
  return agent_gradient_impl(terms_.at(i), xi);
}

double quadratic_L(const Objective& objective) {
  double L = 0.0;
  for (std::size_t i = 0; i < objective.terms().size(); ++i) {
    const auto* q = std::get_if<QuadraticTerm>(&objective.terms()[i]);
    if (!q) {
      throw UnsupportedError("quadratic_L: term " + std::to_string(i) + " is not quadratic; supply L");
    }
    L = std::max(L, Eigen::SelfAdjointEigenSolver<Matrix>(q->Q).eigenvalues().maxCoeff());
  }
  return L;
}

}  // namespace cliqueopt
