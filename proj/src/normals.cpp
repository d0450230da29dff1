#include "eandt/normals.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "eandt/pca.hpp"
#include "eandt/spatial.hpp"

namespace eandt {

std::vector<Eigen::Vector3d> estimate_normals(
    std::span<const Eigen::Vector3d> points, int k) {
    if (k < 3) throw std::invalid_argument("normal estimation needs k >= 3");
    if (static_cast<int>(points.size()) < k)
        throw std::invalid_argument("fewer points than neighbors requested");

    KdTree tree(std::vector<Eigen::Vector3d>(points.begin(), points.end()));
    std::vector<Eigen::Vector3d> normals(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::vector<int> nb = tree.nearest(points[i], k);
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int id : nb) mean += points[id];
        mean /= static_cast<double>(nb.size());
        Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
        for (int id : nb) {
            const Eigen::Vector3d d = points[id] - mean;
            scatter.noalias() += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
        normals[i] = canonical_sign(solver.eigenvectors().col(0).normalized());
    }
    return normals;
}

}  // namespace eandt
