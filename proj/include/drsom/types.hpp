#pragma once

#include <Eigen/Core>

namespace drsom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace drsom
