#include "eandt/ransac_plane.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eandt {

namespace {

// Angle between a point normal and the plane normal, folded to [0, pi/2]
// (normals are undirected).
double folded_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double c = std::min(1.0, std::abs(a.dot(b)));
    return std::acos(c);
}

}  // namespace

std::optional<RansacPlaneResult> ransac_plane(
    std::span<const Eigen::Vector3d> points,
    std::span<const Eigen::Vector3d> normals, const PlaneFitConfig& cfg,
    Rng rng) {
    const int n = static_cast<int>(points.size());
    if (n < 3) return std::nullopt;
    if (normals.size() != points.size())
        throw std::invalid_argument("one normal per point required");

    auto count_inliers = [&](const Plane& plane, std::vector<int>* out) {
        int count = 0;
        for (int i = 0; i < n; ++i) {
            const double a = folded_angle(normals[i], plane.normal);
            if (a > cfg.normal_weight) continue;
            const double budget =
                cfg.distance_threshold * (1.0 - a / cfg.normal_weight);
            if (plane.distance(points[i]) <= budget) {
                ++count;
                if (out) out->push_back(i);
            }
        }
        return count;
    };

    Plane best_plane;
    int best_count = 0;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const int a = static_cast<int>(rng.uniform_index(n));
        int b = static_cast<int>(rng.uniform_index(n));
        while (b == a) b = static_cast<int>(rng.uniform_index(n));
        int c = static_cast<int>(rng.uniform_index(n));
        while (c == a || c == b) c = static_cast<int>(rng.uniform_index(n));

        const Eigen::Vector3d cross =
            (points[b] - points[a]).cross(points[c] - points[a]);
        const double len = cross.norm();
        if (len < 1e-12) continue;  // collinear triple; try another
        Plane hyp;
        hyp.normal = canonical_sign(cross / len);
        hyp.d = -hyp.normal.dot(points[a]);
        const int count = count_inliers(hyp, nullptr);
        if (count > best_count) {
            best_count = count;
            best_plane = hyp;
        }
    }
    if (best_count < std::max(cfg.min_inliers, 3)) return std::nullopt;

    RansacPlaneResult res;
    count_inliers(best_plane, &res.inlier_ids);
    std::vector<Eigen::Vector3d> member_points;
    member_points.reserve(res.inlier_ids.size());
    for (int id : res.inlier_ids) member_points.push_back(points[id]);
    res.plane = fit_plane(member_points);
    return res;
}

}  // namespace eandt
