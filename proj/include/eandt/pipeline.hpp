#pragma once

#include <vector>

#include "eandt/config.hpp"
#include "eandt/ndt_map.hpp"
#include "eandt/primitives.hpp"
#include "eandt/region_grow.hpp"

namespace eandt {

// Dimensionless primitive size: l_alpha / s_c for cylinders,
// occupied area (area_count * grid^2, m^2) / s_c^2 for planes.
double primitive_measure(const Primitive& prim, double cell_size);

// Target cluster count ceil(f * n^g), floored at one cell per primitive.
int cell_count(double n, const LabelConfig& cfg);

// One label's extraction result; indices identify the work unit for seed
// substreams and canonical output ordering.
struct LabelPrimitives {
    SemanticLabel label = SemanticLabel::other;
    // primitive i came from instance_index[i] (region-grow order).
    std::vector<Primitive> primitives;
    std::vector<int> instance_index;
};

// Stage 1+2 for every configured label: region growing then primitive
// extraction. Independent of s_c, so one extraction serves a whole cell-size
// sweep. Requires hard labels.
std::vector<LabelPrimitives> extract_primitives(const LabeledCloud& cloud,
                                                const ParsedConfig& cfg);

struct CellCluster {
    std::vector<int> point_ids;  // ascending, into the cloud
    NdtCell cell;
};

// Stage 3+4 for one primitive: K-means++ with k = min(N_L, |points|); ground
// clusters additionally drop points beyond fine_threshold of each cluster's
// least-squares plane. Clusters below min_cell_points are discarded.
std::vector<CellCluster> cluster_primitive(const LabeledCloud& cloud,
                                           const Primitive& prim,
                                           SemanticLabel label,
                                           int target_cells,
                                           const PipelineConfig& cfg, Rng rng);

// Full pipeline composition at one cell size; cells ordered by
// (label, instance, primitive, cluster). Deterministic for a given seed
// regardless of cfg.pipeline.threads.
NdtMap build_ea_ndt(const LabeledCloud& cloud, const ParsedConfig& cfg);

// Same, reusing a prior extraction (cells depend on extraction + s_c only).
NdtMap build_ea_ndt_from(const LabeledCloud& cloud,
                         const std::vector<LabelPrimitives>& extracted,
                         const ParsedConfig& cfg);

// Fit (f, g) for one label so EA-NDT cell counts track the per-label
// grid-NDT counts across the given cell sizes: least squares of
// log N_target(s) against log n_primitive(s) aggregated over the label's
// primitives in closed form. Needs >= 2 sizes and non-constant measures.
struct FittedParams {
    double f = 1.0;
    double g = 0.0;
};

FittedParams fit_scaling_params(const LabeledCloud& cloud,
                                const LabelPrimitives& extracted,
                                const std::vector<double>& sizes);

}  // namespace eandt
