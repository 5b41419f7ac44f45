#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace slipflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Value and gradient of a scalar field at one point.
struct ScalarSample {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};

/// Value and Jacobian of a 2D vector field at one point; grad(i, j) = d u_i / d x_j.
struct VectorSample {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
};

}  // namespace slipflow
