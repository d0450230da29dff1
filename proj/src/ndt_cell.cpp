#include "eandt/ndt_cell.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace eandt {

Eigen::Matrix3d NdtCell::covariance() const {
    Eigen::Matrix3d c;
    c << cov_upper[0], cov_upper[1], cov_upper[2],
         cov_upper[1], cov_upper[3], cov_upper[4],
         cov_upper[2], cov_upper[4], cov_upper[5];
    return c;
}

NdtCell accumulate_cell(std::span<const Eigen::Vector3d> points,
                        SemanticLabel label) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("cannot accumulate an empty cell");

    NdtCell cell;
    cell.label = label;
    cell.count = static_cast<std::uint32_t>(n);
    for (const auto& p : points) cell.sum += p;
    if (n < 2) return cell;  // zero covariance

    const Eigen::Vector3d mean = cell.sum / static_cast<double>(n);
    Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d d = p - mean;
        m2.noalias() += d * d.transpose();
    }
    m2 /= static_cast<double>(n - 1);
    cell.cov_upper = {m2(0, 0), m2(0, 1), m2(0, 2),
                      m2(1, 1), m2(1, 2), m2(2, 2)};
    return cell;
}

NdtCell accumulate_cell(const LabeledCloud& cloud, std::span<const int> ids,
                        SemanticLabel label) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(ids.size());
    for (int id : ids) pts.push_back(cloud.positions[id]);
    return accumulate_cell(pts, label);
}

NdtCell merge_cells(const NdtCell& a, const NdtCell& b) {
    if (a.label != b.label)
        throw std::invalid_argument("cannot merge cells of different labels");
    if (a.count == 0) return b;
    if (b.count == 0) return a;

    const double na = a.count, nb = b.count, n = na + nb;
    NdtCell out;
    out.label = a.label;
    out.count = a.count + b.count;
    out.sum = a.sum + b.sum;

    // Parallel combination of centered second moments (M2 = (N-1) * cov).
    const Eigen::Vector3d delta = b.sum / nb - a.sum / na;
    Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
    if (a.count > 1) m2 += (na - 1.0) * a.covariance();
    if (b.count > 1) m2 += (nb - 1.0) * b.covariance();
    m2.noalias() += (na * nb / n) * (delta * delta.transpose());
    if (out.count > 1) {
        m2 /= (n - 1.0);
        out.cov_upper = {m2(0, 0), m2(0, 1), m2(0, 2),
                         m2(1, 1), m2(1, 2), m2(2, 2)};
    }
    return out;
}

GaussianParams cell_gaussian(const NdtCell& cell) {
    if (cell.count < kMinCellPoints)
        throw std::invalid_argument("cell below the minimum point count");

    GaussianParams g;
    g.mu = cell.mean();
    const Eigen::Matrix3d cov = cell.covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Eigen::Vector3d lambda = solver.eigenvalues();
    const double lambda_max = lambda[2];
    Eigen::Vector3d clamped;
    for (int i = 0; i < 3; ++i)
        clamped[i] = std::max({lambda[i], 1e-3 * lambda_max, 1e-9});
    if (clamped == lambda) {
        g.sigma = cov;  // keep well-conditioned input bit-for-bit
    } else {
        g.sigma = solver.eigenvectors() * clamped.asDiagonal() *
                  solver.eigenvectors().transpose();
    }
    return g;
}

}  // namespace eandt
