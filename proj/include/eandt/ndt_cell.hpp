#pragma once

#include <array>
#include <span>

#include <Eigen/Core>

#include "eandt/types.hpp"

namespace eandt {

inline constexpr int kMinCellPoints = 6;

// Compact per-cell statistics: point counter, point sum and the upper
// diagonal of the 1/(N-1) sample covariance, stored xx,xy,xz,yy,yz,zz.
struct NdtCell {
    SemanticLabel label = SemanticLabel::other;
    std::uint32_t count = 0;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::array<double, 6> cov_upper{};

    Eigen::Vector3d mean() const { return sum / static_cast<double>(count); }
    Eigen::Matrix3d covariance() const;
};

// Two-pass accumulation over the given points. Needs >= 1 point.
NdtCell accumulate_cell(std::span<const Eigen::Vector3d> points,
                        SemanticLabel label);
NdtCell accumulate_cell(const LabeledCloud& cloud, std::span<const int> ids,
                        SemanticLabel label);

// Statistics of the union of two cells (parallel covariance combination);
// associative and commutative up to floating-point rounding. Labels must
// match.
NdtCell merge_cells(const NdtCell& a, const NdtCell& b);

struct GaussianParams {
    Eigen::Vector3d mu = Eigen::Vector3d::Zero();
    Eigen::Matrix3d sigma = Eigen::Matrix3d::Identity();
};

// Mean and regularized covariance: eigenvalues clamped from below to
// 1e-3 * lambda_max, with lambda_max itself floored at 1e-9 m^2, so the
// result is always invertible. Requires count >= kMinCellPoints.
GaussianParams cell_gaussian(const NdtCell& cell);

}  // namespace eandt
