#pragma once

#include <Eigen/Dense>

namespace corespect {

// Row-major so a point is a contiguous row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace corespect
