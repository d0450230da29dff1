#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "eandt/pca.hpp"
#include "eandt/rng.hpp"

namespace eandt {

struct PlaneFitConfig {
    double distance_threshold = 0.15;  // meters
    // Angular tolerance in radians between point normal and plane normal;
    // the admissible Euclidean distance shrinks linearly to zero as the
    // angular deviation approaches this value.
    double normal_weight = std::numbers::pi / 4.0;
    int max_iterations = 1000;
    int min_inliers = 50;
    double voxel_subsample = 0.10;  // meters, averaging grid before fitting
    int normal_k = 26;
};

struct RansacPlaneResult {
    Plane plane;                  // least-squares refit over the inliers
    std::vector<int> inlier_ids;  // indices into the input span, ascending
};

// Robust plane fit. Hypotheses come from random distinct point triples; a
// point is an inlier iff a = angle(normal_i, plane normal) folded to
// [0, pi/2] satisfies a <= cfg.normal_weight and
// |n.x + d| <= cfg.distance_threshold * (1 - a / cfg.normal_weight).
// The hypothesis with the most inliers wins (ties: first found) and is
// refined by a least-squares plane over its inliers. Returns nothing when
// the best support is below cfg.min_inliers. Deterministic given rng.
std::optional<RansacPlaneResult> ransac_plane(
    std::span<const Eigen::Vector3d> points,
    std::span<const Eigen::Vector3d> normals, const PlaneFitConfig& cfg,
    Rng rng);

}  // namespace eandt
