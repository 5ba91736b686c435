#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace qpmix {

/// Relative pivot threshold below which a matrix is treated as singular.
inline constexpr double kSingularPivotRatio = 1e-12;

/// log|A| of a symmetric matrix through its Cholesky factor. Returns nullopt
/// when some pivot is <= ratio * max(diag A). The empty matrix has log-det 0.
std::optional<double> cholesky_log_det(const Eigen::MatrixXd& a, double ratio = kSingularPivotRatio);

/// Principal submatrix a[idx, idx].
Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const int> idx);

/// Inverse of a symmetric positive-definite matrix, or nullopt if not PD.
std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& a, double ratio = kSingularPivotRatio);

}  // namespace qpmix
