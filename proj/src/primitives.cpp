#include "eandt/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "eandt/kmeans.hpp"
#include "eandt/normals.hpp"

namespace eandt {

namespace {

// Averaging voxel subsample over bare positions (the probs play no role in
// primitive fitting).
std::vector<Eigen::Vector3d> voxel_average_positions(
    const LabeledCloud& cloud, std::span<const int> ids, double voxel) {
    struct Acc {
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        int count = 0;
    };
    std::map<std::array<std::int64_t, 3>, int> voxel_of;
    std::vector<Acc> accs;
    for (int id : ids) {
        const Eigen::Vector3d& p = cloud.positions[id];
        const std::array<std::int64_t, 3> key = {
            static_cast<std::int64_t>(std::floor(p.x() / voxel)),
            static_cast<std::int64_t>(std::floor(p.y() / voxel)),
            static_cast<std::int64_t>(std::floor(p.z() / voxel))};
        auto [it, inserted] =
            voxel_of.try_emplace(key, static_cast<int>(accs.size()));
        if (inserted) accs.emplace_back();
        accs[it->second].sum += p;
        ++accs[it->second].count;
    }
    std::vector<Eigen::Vector3d> out;
    out.reserve(accs.size());
    for (const Acc& a : accs) out.push_back(a.sum / a.count);
    return out;
}

PlanarPrimitive finish_planar(const LabeledCloud& cloud,
                              std::vector<int> point_ids) {
    PlanarPrimitive prim;
    prim.point_ids = std::move(point_ids);
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(prim.point_ids.size());
    for (int id : prim.point_ids) pts.push_back(cloud.positions[id]);
    const PcaResult r = pca(pts);
    prim.basis = r.axes;
    prim.plane.normal = r.axes.col(2);
    prim.plane.d = -prim.plane.normal.dot(r.mean);
    projected_area_count(cloud, prim);
    return prim;
}

}  // namespace

const std::vector<int>& primitive_points(const Primitive& p) {
    if (const auto* plane = std::get_if<PlanarPrimitive>(&p))
        return plane->point_ids;
    return std::get<CylindricalPrimitive>(p).point_ids;
}

int projected_area_count(const LabeledCloud& cloud, PlanarPrimitive& prim,
                         double grid) {
    if (prim.point_ids.empty())
        throw std::invalid_argument("empty primitive");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int id : prim.point_ids) mean += cloud.positions[id];
    mean /= static_cast<double>(prim.point_ids.size());

    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    cells.reserve(prim.point_ids.size());
    for (int id : prim.point_ids) {
        const Eigen::Vector3d d = cloud.positions[id] - mean;
        cells.emplace_back(
            static_cast<std::int64_t>(
                std::floor(d.dot(prim.basis.col(0)) / grid)),
            static_cast<std::int64_t>(
                std::floor(d.dot(prim.basis.col(1)) / grid)));
    }
    std::sort(cells.begin(), cells.end());
    prim.area_count = static_cast<int>(
        std::unique(cells.begin(), cells.end()) - cells.begin());
    return prim.area_count;
}

std::vector<PlanarPrimitive> extract_planar_primitives(
    const LabeledCloud& cloud, const Instance& instance,
    const PlaneFitConfig& cfg, Rng rng) {
    std::vector<PlanarPrimitive> out;
    std::vector<Eigen::Vector3d> sub =
        voxel_average_positions(cloud, instance.point_ids,
                                cfg.voxel_subsample);
    if (static_cast<int>(sub.size()) < std::max(cfg.min_inliers, cfg.normal_k))
        return out;
    const std::vector<Eigen::Vector3d> normals =
        estimate_normals(sub, cfg.normal_k);

    // Repeatedly peel the best-supported plane off the subsampled set.
    std::vector<int> remaining(sub.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<Plane> planes;
    std::vector<Eigen::Vector3d> pts, nrm;
    while (static_cast<int>(remaining.size()) >= cfg.min_inliers) {
        pts.clear();
        nrm.clear();
        for (int i : remaining) {
            pts.push_back(sub[i]);
            nrm.push_back(normals[i]);
        }
        auto fit = ransac_plane(pts, nrm, cfg, Rng(rng.next()));
        if (!fit) break;
        planes.push_back(fit->plane);
        std::vector<char> drop(remaining.size(), 0);
        for (int i : fit->inlier_ids) drop[i] = 1;
        std::vector<int> next;
        next.reserve(remaining.size() - fit->inlier_ids.size());
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (!drop[i]) next.push_back(remaining[i]);
        remaining = std::move(next);
    }

    // Claim the original (pre-subsample) points: first plane in extraction
    // order within the distance threshold wins.
    std::vector<std::vector<int>> claimed(planes.size());
    for (int id : instance.point_ids) {
        for (std::size_t p = 0; p < planes.size(); ++p) {
            if (planes[p].distance(cloud.positions[id]) <=
                cfg.distance_threshold) {
                claimed[p].push_back(id);
                break;
            }
        }
    }
    for (auto& ids : claimed) {
        if (static_cast<int>(ids.size()) < 3) continue;
        out.push_back(finish_planar(cloud, std::move(ids)));
    }
    return out;
}

std::vector<PlanarPrimitive> extract_ground_primitives(
    const LabeledCloud& cloud, const Instance& instance, Rng rng,
    double coarse_threshold, double target_area) {
    // Footprint from a 1 m horizontal occupancy grid decides the number of
    // pre-clusters.
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    cells.reserve(instance.point_ids.size());
    for (int id : instance.point_ids) {
        const Eigen::Vector3d& p = cloud.positions[id];
        cells.emplace_back(static_cast<std::int64_t>(std::floor(p.x())),
                           static_cast<std::int64_t>(std::floor(p.y())));
    }
    std::sort(cells.begin(), cells.end());
    const auto footprint =
        std::unique(cells.begin(), cells.end()) - cells.begin();
    const int k = std::max(
        1, static_cast<int>(std::llround(footprint / target_area)));

    std::vector<Eigen::Vector3d> pts;
    pts.reserve(instance.point_ids.size());
    for (int id : instance.point_ids) pts.push_back(cloud.positions[id]);
    const KMeansResult km =
        kmeans_pp(pts, std::min<int>(k, pts.size()), rng);

    std::vector<PlanarPrimitive> out;
    for (std::size_t c = 0; c < km.centroids.size(); ++c) {
        std::vector<int> member_ids;
        std::vector<Eigen::Vector3d> member_pts;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (km.assignments[i] != static_cast<int>(c)) continue;
            member_ids.push_back(instance.point_ids[i]);
            member_pts.push_back(pts[i]);
        }
        if (member_ids.size() < 3) continue;
        const Plane plane = fit_plane(member_pts);
        std::vector<int> kept;
        for (std::size_t i = 0; i < member_ids.size(); ++i)
            if (plane.distance(member_pts[i]) <= coarse_threshold)
                kept.push_back(member_ids[i]);
        if (kept.size() < 3) continue;
        out.push_back(finish_planar(cloud, std::move(kept)));
    }
    return out;
}

CylindricalPrimitive make_cylindrical_primitive(const LabeledCloud& cloud,
                                                const Instance& instance) {
    if (instance.point_ids.size() < 3)
        throw std::invalid_argument("cylinder needs at least 3 points");
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(instance.point_ids.size());
    for (int id : instance.point_ids) pts.push_back(cloud.positions[id]);
    const PcaResult r = pca(pts);

    CylindricalPrimitive prim;
    prim.point_ids = instance.point_ids;
    prim.axis_point = r.mean;
    prim.axis_dir = r.axes.col(0);
    double lo = 0.0, hi = 0.0;
    for (const auto& p : pts) {
        const double t = (p - r.mean).dot(prim.axis_dir);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    prim.length = hi - lo;
    return prim;
}

PlanarPrimitive traffic_sign_primitive(const LabeledCloud& cloud,
                                       const Instance& instance) {
    if (instance.point_ids.size() < 3)
        throw std::invalid_argument("sign primitive needs at least 3 points");
    return finish_planar(cloud, instance.point_ids);
}

}  // namespace eandt
