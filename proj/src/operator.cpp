#include "cliqueopt/operator.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

CliqueOperator::CliqueOperator(CliqueCover cover, std::size_t d, std::vector<ConstraintBlock> blocks)
    : cover_(std::move(cover)), d_(d) {
  if (d_ == 0) throw InputError("clique operator: per-agent dimension must be positive");
  for (std::size_t i = 0; i < cover_.node_count(); ++i) {
    if (cover_.membership[i].empty()) {
      throw InputError("clique operator: node " + std::to_string(i) + " belongs to no clique");
    }
  }
  const std::size_t q = cover_.clique_count();
  std::vector<std::optional<ConvexSet>> sets(q);
  for (auto& b : blocks) {
    if (b.clique >= q) {
      throw InputError("constraint block references clique " + std::to_string(b.clique) + " but only " +
                       std::to_string(q) + " cliques exist");
    }
    if (sets[b.clique]) {
      throw InputError("clique " + std::to_string(b.clique) + " has more than one constraint block");
    }
    const std::size_t want = cover_.cliques[b.clique].size() * d_;
    if (b.set.dim() != want) {
      throw InputError("constraint block on clique " + std::to_string(b.clique) + " has dimension " +
                       std::to_string(b.set.dim()) + ", expected |C_l|*d = " + std::to_string(want));
    }
    sets[b.clique] = std::move(b.set);
  }
  projectors_.reserve(q);
  const auto dd = static_cast<Eigen::Index>(d_);
  for (std::size_t l = 0; l < q; ++l) {
    const auto& members = cover_.cliques[l];
    Vector w(static_cast<Eigen::Index>(members.size()) * dd);
    for (std::size_t m = 0; m < members.size(); ++m) {
      w.segment(static_cast<Eigen::Index>(m) * dd, dd).setConstant(cover_.weights[members[m]]);
    }
    ConvexSet set = sets[l] ? std::move(*sets[l]) : ConvexSet::free(members.size() * d_);
    projectors_.emplace_back(std::move(set), WeightedNorm(std::move(w)));
  }
}

bool CliqueOperator::all_linear_equality() const {
  return std::all_of(projectors_.begin(), projectors_.end(),
                     [](const WeightedProjector& p) { return p.set().is_linear_equality(); });
}

void CliqueOperator::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != total_dim()) {
    throw InputError("clique operator: expected a vector of length " + std::to_string(total_dim()) +
                     ", got " + std::to_string(x.size()));
  }
}

Vector CliqueOperator::gather(std::size_t l, const Vector& x) const {
  const auto& members = cover_.cliques.at(l);
  const auto d = static_cast<Eigen::Index>(d_);
  Vector out(static_cast<Eigen::Index>(members.size()) * d);
  for (std::size_t m = 0; m < members.size(); ++m) {
    out.segment(static_cast<Eigen::Index>(m) * d, d) = x.segment(static_cast<Eigen::Index>(members[m]) * d, d);
  }
  return out;
}

Vector CliqueOperator::project_clique(std::size_t l, const Vector& x) const {
  return projectors_.at(l).project(gather(l, x));
}

Vector CliqueOperator::apply(const Vector& x) const {
  check_dim(x);
  const auto d = static_cast<Eigen::Index>(d_);
  Vector sum = Vector::Zero(x.size());
  // Ascending clique order fixes the per-node summation order.
  for (std::size_t l = 0; l < projectors_.size(); ++l) {
    const Vector proj = project_clique(l, x);
    const auto& members = cover_.cliques[l];
    for (std::size_t m = 0; m < members.size(); ++m) {
      sum.segment(static_cast<Eigen::Index>(members[m]) * d, d) += proj.segment(static_cast<Eigen::Index>(m) * d, d);
    }
  }
  for (std::size_t i = 0; i < cover_.node_count(); ++i) {
    sum.segment(static_cast<Eigen::Index>(i) * d, d) /= static_cast<double>(cover_.membership[i].size());
  }
  return sum;
}

Vector CliqueOperator::apply_power(const Vector& x, std::size_t p) const {
  if (p == 0) throw InputError("apply_T_power: p must be at least 1");
  Vector y = apply(x);
  for (std::size_t s = 1; s < p; ++s) y = apply(y);
  return y;
}

double CliqueOperator::potential(const Vector& x) const {
  check_dim(x);
  double v = 0.0;
  for (std::size_t l = 0; l < projectors_.size(); ++l) {
    const Vector xc = gather(l, x);
    v += projectors_[l].norm().squared(xc - projectors_[l].project(xc));
  }
  return 0.5 * v;
}

double CliqueOperator::violation(const Vector& x) const {
  check_dim(x);
  double worst = 0.0;
  for (std::size_t l = 0; l < projectors_.size(); ++l) {
    worst = std::max(worst, projectors_[l].set().violation(gather(l, x)));
  }
  return worst;
}

Vector apply_T(const CliqueOperator& op, const Vector& x) { return op.apply(x); }

Vector apply_T_power(const CliqueOperator& op, const Vector& x, std::size_t p) {
  return op.apply_power(x, p);
}

double eval_V(const CliqueOperator& op, const Vector& x) { return op.potential(x); }

Vector grad_V(const CliqueOperator& op, const Vector& x) { return x - op.apply(x); }

double eval_J(const CliqueOperator& op, const Objective& f, const Vector& x, double t) {
  if (!(t > 0.0)) throw InputError("eval_J: step t must be positive");
  return f.value(x) + op.potential(x) / t;
}

}  // namespace cliqueopt
