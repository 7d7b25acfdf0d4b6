#include "cliqueopt/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cliqueopt/errors.hpp"

namespace cliqueopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

WeightedNorm::WeightedNorm(Vector weights) : w_(std::move(weights)) {
  for (Eigen::Index j = 0; j < w_.size(); ++j) {
    require(std::isfinite(w_[j]) && w_[j] > 0.0, "weighted norm: weights must be positive and finite");
  }
  uniform_ = w_.size() == 0 || (w_.array() == w_[0]).all();
}

WeightedNorm WeightedNorm::uniform(std::size_t dim) {
  return WeightedNorm(Vector::Ones(static_cast<Eigen::Index>(dim)));
}

double WeightedNorm::inner(const Vector& a, const Vector& b) const {
  return (a.array() * w_.array() * b.array()).sum();
}

double WeightedNorm::operator()(const Vector& v) const { return std::sqrt(squared(v)); }

ConvexSet::ConvexSet(Spec spec) : spec_(std::move(spec)) {
  std::visit(
      Overloaded{
          [&](const FreeSet& s) {
            dim_ = s.dim;
            eq_A_ = Matrix(0, static_cast<Eigen::Index>(dim_));
            eq_b_ = Vector(0);
          },
          [&](const AffineEquality& s) {
            require(s.A.rows() == s.b.size(), "affine_eq: A has " + std::to_string(s.A.rows()) +
                                                  " rows but b has " + std::to_string(s.b.size()));
            require(s.A.allFinite() && all_finite(s.b), "affine_eq: non-finite entries");
            dim_ = static_cast<std::size_t>(s.A.cols());
            // Reduce to full row rank: {Az=b} = {S_r V_r^T z = U_r^T b} when b is in range(A).
            Eigen::JacobiSVD<Matrix> svd(s.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const auto& sv = svd.singularValues();
            const double smax = sv.size() > 0 ? sv[0] : 0.0;
            Eigen::Index rank = 0;
            while (rank < sv.size() && sv[rank] > 1e-12 * smax) ++rank;
            const Matrix Ur = svd.matrixU().leftCols(rank);
            const Vector br = Ur.transpose() * s.b;
            const double inconsistency = (s.b - Ur * br).norm();
            require(inconsistency <= 1e-10 * std::max(1.0, s.b.norm()),
                    "affine_eq: inconsistent system (b not in range of A, residual " +
                        std::to_string(inconsistency) + ")");
            eq_A_ = sv.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
            eq_b_ = br;
          },
          [&](const SumEquality& s) {
            require(s.dim > 0, "sum_eq: dimension must be positive");
            require(std::isfinite(s.target), "sum_eq: target must be finite");
            dim_ = s.dim;
            eq_A_ = Matrix::Ones(1, static_cast<Eigen::Index>(dim_));
            eq_b_ = Vector::Constant(1, s.target);
          },
          [&](const Ball& s) {
            require(std::isfinite(s.radius) && s.radius > 0.0, "ball: radius must be positive");
            require(all_finite(s.center), "ball: non-finite center");
            dim_ = static_cast<std::size_t>(s.center.size());
          },
          [&](const Halfspace& s) {
            require(all_finite(s.a) && std::isfinite(s.b), "halfspace: non-finite data");
            require(s.a.norm() > 0.0, "halfspace: normal vector must be nonzero");
            dim_ = static_cast<std::size_t>(s.a.size());
          },
          [&](const Box& s) {
            require(s.lo.size() == s.hi.size(), "box: lo and hi differ in length");
            require(!s.lo.hasNaN() && !s.hi.hasNaN(), "box: NaN bound");
            require((s.lo.array() <= s.hi.array()).all(), "box: lo must not exceed hi");
            dim_ = static_cast<std::size_t>(s.lo.size());
          },
          [&](const Consensus& s) {
            require(s.members > 0 && s.block_dim > 0, "consensus: members and block_dim must be positive");
            dim_ = s.members * s.block_dim;
            const auto d = static_cast<Eigen::Index>(s.block_dim);
            const auto rows = static_cast<Eigen::Index>((s.members - 1) * s.block_dim);
            eq_A_ = Matrix::Zero(rows, static_cast<Eigen::Index>(dim_));
            for (Eigen::Index m = 1; m < static_cast<Eigen::Index>(s.members); ++m) {
              for (Eigen::Index c = 0; c < d; ++c) {
                eq_A_((m - 1) * d + c, c) = 1.0;
                eq_A_((m - 1) * d + c, m * d + c) = -1.0;
              }
            }
            eq_b_ = Vector::Zero(rows);
          },
      },
      spec_);
}

std::string_view ConvexSet::kind() const {
  return std::visit(Overloaded{
                        [](const FreeSet&) { return std::string_view("free"); },
                        [](const AffineEquality&) { return std::string_view("affine_eq"); },
                        [](const SumEquality&) { return std::string_view("sum_eq"); },
                        [](const Ball&) { return std::string_view("ball"); },
                        [](const Halfspace&) { return std::string_view("halfspace"); },
                        [](const Box&) { return std::string_view("box"); },
                        [](const Consensus&) { return std::string_view("consensus"); },
                    },
                    spec_);
}

bool ConvexSet::is_linear_equality() const {
  return std::holds_alternative<FreeSet>(spec_) || std::holds_alternative<AffineEquality>(spec_) ||
         std::holds_alternative<SumEquality>(spec_) || std::holds_alternative<Consensus>(spec_);
}

double ConvexSet::violation(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw InputError("set of dimension " + std::to_string(dim_) + " evaluated at a vector of length " +
                     std::to_string(x.size()));
  }
  return std::visit(
      Overloaded{
          [](const FreeSet&) { return 0.0; },
          [&](const AffineEquality& s) { return (s.A * x - s.b).norm(); },
          [&](const SumEquality& s) { return std::abs(x.sum() - s.target); },
          [&](const Ball& s) { return std::max(0.0, (x - s.center).norm() - s.radius); },
          [&](const Halfspace& s) { return std::max(0.0, s.a.dot(x) - s.b); },
          [&](const Box& s) {
            const double below = (s.lo - x).cwiseMax(0.0).maxCoeff();
            const double above = (x - s.hi).cwiseMax(0.0).maxCoeff();
            return std::max(below, above);
          },
          [&](const Consensus&) { return eq_A_.rows() == 0 ? 0.0 : (eq_A_ * x).cwiseAbs().maxCoeff(); },
      },
      spec_);
}

WeightedProjector::WeightedProjector(ConvexSet set, WeightedNorm norm)
    : set_(std::move(set)), norm_(std::move(norm)) {
  if (norm_.dim() != set_.dim()) {
    throw InputError("projector: norm has dimension " + std::to_string(norm_.dim()) + " but set has " +
                     std::to_string(set_.dim()));
  }
  inv_w_ = norm_.weights().cwiseInverse();
  if (std::holds_alternative<AffineEquality>(set_.spec())) {
    const Matrix& E = set_.equality_matrix();
    winv_et_ = inv_w_.asDiagonal() * E.transpose();
    gram_.emplace(E * winv_et_);
  }
}

Vector WeightedProjector::project(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != set_.dim()) {
    throw InputError("projection: vector of length " + std::to_string(x.size()) +
                     " onto a set of dimension " + std::to_string(set_.dim()));
  }
  return std::visit(
      Overloaded{
          [&](const FreeSet&) -> Vector { return x; },
          [&](const AffineEquality&) -> Vector {
            if (set_.equality_matrix().rows() == 0) return x;
            const Vector r = set_.equality_matrix() * x - set_.equality_rhs();
            return x - winv_et_ * gram_->solve(r);
          },
          [&](const SumEquality& s) -> Vector {
            const double nu = (x.sum() - s.target) / inv_w_.sum();
            return x - nu * inv_w_;
          },
          [&](const Ball& s) -> Vector { return project_ball(s, x); },
          [&](const Halfspace& s) -> Vector {
            const double excess = s.a.dot(x) - s.b;
            if (excess <= 0.0) return x;
            const Vector winv_a = inv_w_.cwiseProduct(s.a);
            return x - winv_a * (excess / s.a.dot(winv_a));
          },
          [&](const Box& s) -> Vector { return x.cwiseMax(s.lo).cwiseMin(s.hi); },
          [&](const Consensus& s) -> Vector {
            const auto d = static_cast<Eigen::Index>(s.block_dim);
            const auto members = static_cast<Eigen::Index>(s.members);
            const Vector& w = norm_.weights();
            Vector num = Vector::Zero(d);
            Vector den = Vector::Zero(d);
            for (Eigen::Index m = 0; m < members; ++m) {
              num += w.segment(m * d, d).cwiseProduct(x.segment(m * d, d));
              den += w.segment(m * d, d);
            }
            const Vector mean = num.cwiseQuotient(den);
            Vector z(x.size());
            for (Eigen::Index m = 0; m < members; ++m) z.segment(m * d, d) = mean;
            return z;
          },
      },
      set_.spec());
}

Vector WeightedProjector::project_ball(const Ball& ball, const Vector& x) const {
  const Vector shifted = x - ball.center;
  const double r = ball.radius;
  const double norm0 = shifted.norm();
  if (norm0 <= r) return x;
  if (norm_.is_uniform()) return ball.center + shifted * (r / norm0);

  // KKT: z_j = w_j x_j / (w_j + lambda); find lambda >= 0 with ||z(lambda)|| = r.
  // Newton on 1/||z|| - 1/r (nearly linear in lambda), bisection when it leaves the bracket.
  const Vector& w = norm_.weights();
  const Vector wx = w.cwiseProduct(shifted);
  double lo = 0.0;
  double hi = w.maxCoeff() * norm0 / r;
  double lambda = 0.0;
  Vector z = shifted;
  for (int it = 0; it < kBallMaxIters; ++it) {
    const Vector denom = w.array() + lambda;
    z = wx.cwiseQuotient(denom);
    const double nz = z.norm();
    if (std::abs(nz - r) <= kBallRootTol * std::max(1.0, r)) break;
    if (nz > r) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    // d||z||/dlambda = -sum(z_j^2 / (w_j + lambda)) / ||z||
    const double dnorm = -(z.array().square() / denom.array()).sum() / nz;
    const double psi = 1.0 / nz - 1.0 / r;
    const double dpsi = -dnorm / (nz * nz);
    double next = lambda - psi / dpsi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-17 * std::max(1.0, hi)) break;
    lambda = next;
  }
  const double nz = z.norm();
  if (nz > r) z *= r / nz;
  return ball.center + z;
}

Vector project_weighted(const ConvexSet& set, const Vector& x, const WeightedNorm& norm) {
  return WeightedProjector(set, norm).project(x);
}

}  // namespace cliqueopt
