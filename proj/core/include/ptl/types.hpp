#pragma once

#include <Eigen/Core>

namespace ptl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace ptl
