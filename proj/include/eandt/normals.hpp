#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace eandt {

// Per-point surface normals: for each of points[i], the smallest-eigenvalue
// eigenvector of the scatter of its k nearest neighbors (within the given
// point set, self included), unit length, sign-canonicalized (z >= 0, ties
// y >= 0, then x >= 0). Requires |points| >= k >= 3.
std::vector<Eigen::Vector3d> estimate_normals(
    std::span<const Eigen::Vector3d> points, int k);

}  // namespace eandt
