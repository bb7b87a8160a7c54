#pragma once

#include <Eigen/Dense>

namespace gekrig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

}  // namespace gekrig
