#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace eandt {

// Eigen-decomposition of the 1/(N-1) sample covariance. Eigenvalues sorted
// descending; columns of `axes` are the matching eigenvectors, orthonormal
// and right-handed. The first and last columns are sign-canonicalized
// (z >= 0, ties broken by y >= 0, then x >= 0); the middle column completes
// the right-handed frame.
struct PcaResult {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // descending
    Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
};

// Canonical sign for a direction vector: flip so z > 0, ties broken by
// y > 0, then x > 0. Zero vector is returned unchanged.
Eigen::Vector3d canonical_sign(const Eigen::Vector3d& v);

PcaResult pca(std::span<const Eigen::Vector3d> points);  // needs >= 3 points

// Plane n.x + d = 0 with unit normal.
struct Plane {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double d = 0.0;

    double distance(const Eigen::Vector3d& p) const {
        return std::abs(normal.dot(p) + d);
    }
};

// Least-squares plane: normal = smallest-eigenvalue PCA axis through the
// centroid, sign-canonicalized. Needs >= 3 points.
Plane fit_plane(std::span<const Eigen::Vector3d> points);

}  // namespace eandt
