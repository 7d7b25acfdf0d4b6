#pragma once

#include <Eigen/Dense>

namespace cliqueopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// "x is in the set" threshold used throughout.
inline constexpr double kFeasibilityTol = 1e-10;

}  // namespace cliqueopt
