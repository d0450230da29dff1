#include "eandt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eandt/parallel.hpp"

namespace eandt {

namespace {

// Substream purposes keep extraction and cell clustering independent even
// when they share task coordinates.
enum : std::uint64_t { kStreamExtract = 1, kStreamCluster = 2 };

}  // namespace

double primitive_measure(const Primitive& prim, double cell_size) {
    if (cell_size <= 0.0)
        throw std::invalid_argument("cell size must be positive");
    if (const auto* plane = std::get_if<PlanarPrimitive>(&prim))
        return plane->area_count * kAreaGrid * kAreaGrid /
               (cell_size * cell_size);
    return std::get<CylindricalPrimitive>(prim).length / cell_size;
}

int cell_count(double n, const LabelConfig& cfg) {
    if (!(n > 0.0)) return 1;  // degenerate primitive still gets one cell
    const double raw = cfg.f * std::pow(n, cfg.g);
    if (!(raw > 1.0)) return 1;
    if (raw > double(1 << 30)) return 1 << 30;
    return static_cast<int>(std::ceil(raw));
}

std::vector<LabelPrimitives> extract_primitives(const LabeledCloud& cloud,
                                                const ParsedConfig& cfg) {
    if (!cloud.has_labels())
        throw std::invalid_argument("extraction requires hard labels");
    const PipelineConfig& p = cfg.pipeline;

    std::vector<LabelPrimitives> out;
    for (SemanticLabel label : kUsedLabels) {
        const LabelConfig& lc = p.for_label(label);
        LabelPrimitives lp;
        lp.label = label;

        const std::vector<int> ids = cloud.ids_with_label(label);
        const std::vector<Instance> instances = region_grow(
            cloud, ids, label, lc.grow_threshold, lc.grow_min_points);

        // Instances are independent; collect into per-instance slots so the
        // result is identical for any worker count.
        std::vector<std::vector<Primitive>> slots(instances.size());
        parallel_for(
            static_cast<int>(instances.size()), p.threads, [&](int i) {
                const Instance& inst = instances[i];
                Rng rng(Rng::mix(p.seed,
                                 {static_cast<std::uint64_t>(label),
                                  static_cast<std::uint64_t>(i),
                                  kStreamExtract}));
                switch (lc.primitive) {
                    case PrimitiveKind::planar:
                        for (auto& prim : extract_planar_primitives(
                                 cloud, inst, p.plane_fit, rng))
                            slots[i].emplace_back(std::move(prim));
                        break;
                    case PrimitiveKind::ground_planar:
                        for (auto& prim : extract_ground_primitives(
                                 cloud, inst, rng, p.ground_coarse_threshold,
                                 p.ground_target_area))
                            slots[i].emplace_back(std::move(prim));
                        break;
                    case PrimitiveKind::cylindrical:
                        if (inst.point_ids.size() >= 3)
                            slots[i].emplace_back(
                                make_cylindrical_primitive(cloud, inst));
                        break;
                    case PrimitiveKind::single_planar:
                        if (inst.point_ids.size() >= 3)
                            slots[i].emplace_back(
                                traffic_sign_primitive(cloud, inst));
                        break;
                }
            });
        for (std::size_t i = 0; i < slots.size(); ++i)
            for (auto& prim : slots[i]) {
                lp.primitives.push_back(std::move(prim));
                lp.instance_index.push_back(static_cast<int>(i));
            }
        out.push_back(std::move(lp));
    }
    return out;
}

std::vector<CellCluster> cluster_primitive(const LabeledCloud& cloud,
                                           const Primitive& prim,
                                           SemanticLabel label,
                                           int target_cells,
                                           const PipelineConfig& cfg,
                                           Rng rng) {
    const std::vector<int>& ids = primitive_points(prim);
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(ids.size());
    for (int id : ids) pts.push_back(cloud.positions[id]);

    const int k = std::min<int>(std::max(1, target_cells),
                                static_cast<int>(pts.size()));
    std::vector<int> assignments;
    int num_clusters = k;
    if (k == 1 || pts.empty()) {
        assignments.assign(pts.size(), 0);
        num_clusters = pts.empty() ? 0 : 1;
    } else {
        assignments = kmeans_pp(pts, k, rng, cfg.kmeans).assignments;
    }

    const bool ground_filter =
        cfg.for_label(label).primitive == PrimitiveKind::ground_planar;

    std::vector<CellCluster> out;
    for (int c = 0; c < num_clusters; ++c) {
        std::vector<int> member_ids;
        std::vector<Eigen::Vector3d> member_pts;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (assignments[i] != c) continue;
            member_ids.push_back(ids[i]);
            member_pts.push_back(pts[i]);
        }
        if (ground_filter && member_pts.size() >= 3) {
            // Fine noise filter: keep only points near this cell's own
            // least-squares plane.
            const Plane plane = fit_plane(member_pts);
            std::vector<int> kept_ids;
            std::vector<Eigen::Vector3d> kept_pts;
            for (std::size_t i = 0; i < member_pts.size(); ++i) {
                if (plane.distance(member_pts[i]) <=
                    cfg.ground_fine_threshold) {
                    kept_ids.push_back(member_ids[i]);
                    kept_pts.push_back(member_pts[i]);
                }
            }
            member_ids = std::move(kept_ids);
            member_pts = std::move(kept_pts);
        }
        if (static_cast<int>(member_ids.size()) < cfg.min_cell_points)
            continue;
        CellCluster cluster;
        cluster.cell = accumulate_cell(member_pts, label);
        cluster.point_ids = std::move(member_ids);
        out.push_back(std::move(cluster));
    }
    return out;
}

NdtMap build_ea_ndt_from(const LabeledCloud& cloud,
                         const std::vector<LabelPrimitives>& extracted,
                         const ParsedConfig& cfg) {
    const PipelineConfig& p = cfg.pipeline;

    std::vector<NdtCell> cells;
    for (const LabelPrimitives& lp : extracted) {
        const LabelConfig& lc = p.for_label(lp.label);
        std::vector<std::vector<CellCluster>> slots(lp.primitives.size());
        parallel_for(
            static_cast<int>(lp.primitives.size()), p.threads, [&](int j) {
                const double n =
                    primitive_measure(lp.primitives[j], p.cell_size);
                const int target = cell_count(n, lc);
                Rng rng(Rng::mix(
                    p.seed,
                    {static_cast<std::uint64_t>(lp.label),
                     static_cast<std::uint64_t>(lp.instance_index[j]),
                     static_cast<std::uint64_t>(j), kStreamCluster}));
                slots[j] = cluster_primitive(cloud, lp.primitives[j],
                                             lp.label, target, p, rng);
            });
        for (const auto& clusters : slots)
            for (const CellCluster& cluster : clusters)
                cells.push_back(cluster.cell);
    }
    return NdtMap(std::move(cells), MapMethod::ea_ndt, p.cell_size, p.seed);
}

NdtMap build_ea_ndt(const LabeledCloud& cloud, const ParsedConfig& cfg) {
    return build_ea_ndt_from(cloud, extract_primitives(cloud, cfg), cfg);
}

FittedParams fit_scaling_params(const LabeledCloud& cloud,
                                const LabelPrimitives& extracted,
                                const std::vector<double>& sizes) {
    if (sizes.size() < 2)
        throw std::invalid_argument("fitting needs at least 2 cell sizes");
    if (extracted.primitives.empty())
        throw DataError("no primitives to fit for label " +
                        std::string(to_string(extracted.label)));

    // Primitive measures at unit cell size; the measure scales as s^-d.
    bool planar = std::holds_alternative<PlanarPrimitive>(
        extracted.primitives.front());
    const double d = planar ? 2.0 : 1.0;
    std::vector<double> unit_measures;
    for (const Primitive& prim : extracted.primitives) {
        const double n = primitive_measure(prim, 1.0);
        if (n > 0.0) unit_measures.push_back(n);
    }
    if (unit_measures.empty())
        throw DataError("all primitives degenerate for label " +
                        std::string(to_string(extracted.label)));

    // Grid-NDT per-label cell counts are the fit target.
    const std::vector<int> ids = cloud.ids_with_label(extracted.label);
    std::vector<double> xs, ys;  // log s, log N_target
    for (double s : sizes) {
        const std::size_t target =
            grid_cells_for_label(cloud, ids, extracted.label, s).size();
        if (target == 0) continue;
        xs.push_back(std::log(s));
        ys.push_back(std::log(static_cast<double>(target)));
    }
    if (xs.size() < 2)
        throw DataError("too few usable cell sizes to fit label " +
                        std::string(to_string(extracted.label)));

    // Least squares y = b + m x. The model N(s) = f * C(g) * s^(-d*g) with
    // C(g) = sum_p n_p(1)^g gives g = -m/d and f = exp(b) / C(g).
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12)
        throw DataError("cell sizes too close together to fit");
    const double m = (n * sxy - sx * sy) / denom;
    const double b = (sy - m * sx) / n;

    FittedParams fit;
    fit.g = -m / d;
    double c = 0.0;
    for (double u : unit_measures) c += std::pow(u, fit.g);
    if (!(c > 0.0) || !std::isfinite(c))
        throw DataError("degenerate primitive measures in fit");
    fit.f = std::exp(b) / c;
    if (!std::isfinite(fit.f) || !std::isfinite(fit.g) || fit.f <= 0.0)
        throw DataError("scaling parameter fit diverged");
    return fit;
}

}  // namespace eandt
