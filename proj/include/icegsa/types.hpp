#pragma once

#include <Eigen/Core>

namespace icegsa {

/// Sample matrices, ICE curves and evaluation batches are row-major: one row per point.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace icegsa
