#include "cliqueopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

StackedEqualities stack_equalities(const CliqueOperator& op) {
  const auto d = static_cast<Eigen::Index>(op.agent_dim());
  Eigen::Index rows = 0;
  for (std::size_t l = 0; l < op.clique_count(); ++l) {
    if (!op.set(l).is_linear_equality()) {
      throw UnsupportedError("stacked equalities: clique " + std::to_string(l) + " carries a " +
                             std::string(op.set(l).kind()) + " block");
    }
    rows += op.set(l).equality_matrix().rows();
  }
  StackedEqualities out{Matrix::Zero(rows, static_cast<Eigen::Index>(op.total_dim())), Vector(rows)};
  Eigen::Index row = 0;
  for (std::size_t l = 0; l < op.clique_count(); ++l) {
    const Matrix& El = op.set(l).equality_matrix();
    const auto& members = op.cover().cliques[l];
    for (std::size_t m = 0; m < members.size(); ++m) {
      out.E.block(row, static_cast<Eigen::Index>(members[m]) * d, El.rows(), d) =
          El.middleCols(static_cast<Eigen::Index>(m) * d, d);
    }
    out.e.segment(row, El.rows()) = op.set(l).equality_rhs();
    row += El.rows();
  }
  return out;
}

KktSolution solve_equality_qp(const Objective& objective, const CliqueOperator& op) {
  if (!objective.is_quadratic()) throw UnsupportedError("solve_equality_qp: objective is not quadratic");
  if (objective.total_dim() != op.total_dim()) throw InputError("solve_equality_qp: dimension mismatch");
  const auto d = static_cast<Eigen::Index>(objective.agent_dim());
  const auto nd = static_cast<Eigen::Index>(objective.total_dim());
  const StackedEqualities rows = stack_equalities(op);

  // Block-diagonal Hessian, its inverse, and the stacked targets a.
  Matrix H = Matrix::Zero(nd, nd);
  Matrix H_inv = Matrix::Zero(nd, nd);
  Vector a(nd);
  for (std::size_t i = 0; i < objective.agents(); ++i) {
    const auto& q = std::get<QuadraticTerm>(objective.terms()[i]);
    Eigen::LLT<Matrix> llt(q.Q);
    if (llt.info() != Eigen::Success ||
        Eigen::SelfAdjointEigenSolver<Matrix>(q.Q).eigenvalues().minCoeff() <= 0.0) {
      throw UnsupportedError("solve_equality_qp: Hessian of agent " + std::to_string(i) +
                             " is not positive definite");
    }
    const auto off = static_cast<Eigen::Index>(i) * d;
    H.block(off, off, d, d) = q.Q;
    H_inv.block(off, off, d, d) = llt.solve(Matrix::Identity(d, d));
    a.segment(off, d) = q.a;
  }

  // H(x - a) + E^T nu = 0, E x = e  =>  (E H^-1 E^T) nu = E a - e, x = a - H^-1 E^T nu.
  KktSolution sol;
  if (rows.E.rows() == 0) {
    sol.x_star = a;
    sol.multipliers = Vector(0);
  } else {
    const Matrix HinvEt = H_inv * rows.E.transpose();
    const Matrix gram = rows.E * HinvEt;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
    Vector nu = cod.solve(rows.E * a - rows.e);
    Vector x = a - HinvEt * nu;
    // One step of iterative refinement on the constraint residual.
    const Vector r = rows.e - rows.E * x;
    const Vector dnu = cod.solve(-r);
    nu += dnu;
    x -= HinvEt * dnu;
    sol.x_star = std::move(x);
    sol.multipliers = std::move(nu);
  }
  const Vector primal = rows.E * sol.x_star - rows.e;
  sol.primal_residual = rows.E.rows() == 0 ? 0.0 : primal.norm();
  sol.dual_residual = (H * (sol.x_star - a) + rows.E.transpose() * sol.multipliers).norm();
  const double scale = 1.0 + rows.e.norm() + rows.E.norm() * a.norm();
  if (sol.primal_residual > 1e-8 * scale) {
    throw OracleError("solve_equality_qp: constraints are inconsistent (residual " +
                      std::to_string(sol.primal_residual) + ")");
  }
  sol.f_star = objective.value(sol.x_star);
  return sol;
}

StackedEqualityProjector::StackedEqualityProjector(const CliqueOperator& op)
    : rows_(stack_equalities(op)), gram_(rows_.E * rows_.E.transpose()) {}

Vector StackedEqualityProjector::operator()(const Vector& x) const {
  if (rows_.E.rows() == 0) return x;
  Vector z = x - rows_.E.transpose() * gram_.solve(rows_.E * x - rows_.e);
  // Refine once; the KKT matrix can be rank-deficient when blocks overlap.
  z -= rows_.E.transpose() * gram_.solve(rows_.E * z - rows_.e);
  return z;
}

DykstraProjector::DykstraProjector(const CliqueOperator& op, DykstraOptions options)
    : op_(&op), options_(options) {
  plain_.reserve(op.clique_count());
  for (std::size_t l = 0; l < op.clique_count(); ++l) {
    plain_.emplace_back(op.set(l), WeightedNorm::uniform(op.set(l).dim()));
  }
}

Vector DykstraProjector::operator()(const Vector& x0) const {
  const auto d = static_cast<Eigen::Index>(op_->agent_dim());
  const auto& cliques = op_->cover().cliques;
  Vector x = x0;
  std::vector<Vector> correction;
  correction.reserve(plain_.size());
  for (const auto& p : plain_) correction.push_back(Vector::Zero(static_cast<Eigen::Index>(p.set().dim())));

  for (std::size_t cycle = 1; cycle <= options_.max_cycles; ++cycle) {
    const Vector start = x;
    for (std::size_t l = 0; l < plain_.size(); ++l) {
      const Vector y = op_->gather(l, x) + correction[l];
      const Vector z = plain_[l].project(y);
      correction[l] = y - z;
      for (std::size_t m = 0; m < cliques[l].size(); ++m) {
        x.segment(static_cast<Eigen::Index>(cliques[l][m]) * d, d) = z.segment(static_cast<Eigen::Index>(m) * d, d);
      }
    }
    if ((x - start).norm() <= options_.tol) {
      double worst = 0.0;
      for (std::size_t l = 0; l < plain_.size(); ++l) {
        const Vector xc = op_->gather(l, x);
        worst = std::max(worst, (xc - plain_[l].project(xc)).norm());
      }
      if (worst <= 10.0 * options_.tol) {
        last_cycles_ = cycle;
        return x;
      }
    }
  }
  throw OracleError("Dykstra projection did not converge within " + std::to_string(options_.max_cycles) +
                    " cycles");
}

Vector project_D_dykstra(const CliqueOperator& op, const Vector& x, DykstraOptions options) {
  return DykstraProjector(op, options)(x);
}

SetProjection make_full_projection(const CliqueOperator& op) {
  if (op.all_linear_equality()) {
    auto proj = std::make_shared<StackedEqualityProjector>(op);
    return [proj](const Vector& x) { return (*proj)(x); };
  }
  auto proj = std::make_shared<DykstraProjector>(op);
  return [proj](const Vector& x) { return (*proj)(x); };
}

ApproximateOptimum approximate_optimum(const Problem& problem, std::size_t iters, std::size_t probe_every) {
  if (probe_every == 0) throw InputError("approximate_optimum: probe_every must be positive");
  DykstraProjector project(problem.op);
  ApproximateOptimum best;
  best.f = std::numeric_limits<double>::infinity();
  constexpr std::size_t kInnerRounds = 50;
  const double t = 1.0 / problem.objective.smoothness();
  Vector x = Vector::Zero(static_cast<Eigen::Index>(problem.total_dim()));
  AccelState accel{1.0, x, x};
  for (std::size_t k = 1; k <= iters; ++k) {
    const Vector y = accel.x_hat - t * problem.objective.gradient(accel.x_hat);
    x = problem.op.apply_power(y, kInnerRounds);
    // Once the iterate stops moving the remaining iterations cannot change anything.
    const bool settled = (x - accel.x_prev).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>());
    accel.advance(x);
    if (settled || k % probe_every == 0 || k == iters) {
      const Vector feasible = project(x);
      const double f = problem.objective.value(feasible);
      if (f < best.f) {
        best.f = f;
        best.x = feasible;
      }
      if (settled) break;
    }
  }
  if (!std::isfinite(best.f)) throw OracleError("approximate_optimum: no finite probe");
  return best;
}

}  // namespace cliqueopt
