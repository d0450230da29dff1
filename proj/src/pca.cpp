#include "eandt/pca.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

namespace eandt {

Eigen::Vector3d canonical_sign(const Eigen::Vector3d& v) {
    if (v.z() != 0.0) return v.z() > 0.0 ? v : -v;
    if (v.y() != 0.0) return v.y() > 0.0 ? v : -v;
    if (v.x() != 0.0) return v.x() > 0.0 ? v : -v;
    return v;
}

PcaResult pca(std::span<const Eigen::Vector3d> points) {
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("pca needs at least 3 points");

    PcaResult res;
    for (const auto& p : points) res.mean += p;
    res.mean /= static_cast<double>(n);

    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p - res.mean;
        scatter.noalias() += d * d.transpose();
    }
    scatter /= static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
    // Eigen sorts ascending; flip to descending.
    for (int i = 0; i < 3; ++i) {
        res.eigenvalues[i] = solver.eigenvalues()[2 - i];
        res.axes.col(i) = solver.eigenvectors().col(2 - i);
    }
    // Canonical orientation: pin the dominant and normal axes by sign, then
    // rebuild the middle axis for a right-handed frame.
    res.axes.col(0) = canonical_sign(res.axes.col(0));
    res.axes.col(2) = canonical_sign(res.axes.col(2));
    res.axes.col(1) = res.axes.col(2).cross(res.axes.col(0));
    return res;
}

Plane fit_plane(std::span<const Eigen::Vector3d> points) {
    const PcaResult r = pca(points);
    Plane plane;
    plane.normal = r.axes.col(2);
    plane.d = -plane.normal.dot(r.mean);
    return plane;
}

}  // namespace eandt
