#pragma once

#include <array>
#include <map>
#include <string>

#include "eandt/filters.hpp"
#include "eandt/kmeans.hpp"
#include "eandt/ransac_plane.hpp"
#include "eandt/types.hpp"

namespace eandt {

enum class PrimitiveKind { planar, cylindrical, ground_planar, single_planar };

std::string to_string(PrimitiveKind k);
PrimitiveKind primitive_kind_from_string(const std::string& s);

struct LabelConfig {
    SemanticLabel label = SemanticLabel::other;
    double f = 1.0;  // cell-count scaling factor, > 0
    double g = 0.0;  // cell-count scaling exponent
    double grow_threshold = 0.30;  // meters
    int grow_min_points = 10;
    PrimitiveKind primitive = PrimitiveKind::planar;
};

struct PipelineConfig {
    std::array<LabelConfig, kUsedLabels.size()> labels;  // indexed by label code
    double cell_size = 1.0;  // meters, s_c
    std::uint64_t seed = 0;
    int min_cell_points = 6;

    PlaneFitConfig plane_fit;     // building/fence RANSAC settings
    KMeansOptions kmeans;         // cell clustering settings
    double ground_target_area = 100.0;   // m^2 per ground pre-cluster
    double ground_coarse_threshold = 0.30;  // meters
    double ground_fine_threshold = 0.15;    // meters

    double preprocess_voxel = 0.01;   // meters, averaging voxel filter
    double preprocess_smooth = 0.05;  // meters, prob smoothing radius

    int threads = 1;

    const LabelConfig& for_label(SemanticLabel l) const {
        return labels[static_cast<std::size_t>(l)];
    }
    LabelConfig& for_label(SemanticLabel l) {
        return labels[static_cast<std::size_t>(l)];
    }
};

// The shipped defaults: fitted (f, g) per label, region growing at
// 0.30 m / 10 points (ground 0.50 m / 3000), primitive kind per label.
PipelineConfig default_pipeline_config();

// Flat `key = value` file, `#` comments. Per-label keys are dotted
// (`ground.f`, `pole.grow_threshold`, `building.primitive`); global keys are
// `cell_size`, `seed`, `min_cell_points`, `plane_fit.threshold`,
// `plane_fit.normal_weight`, `plane_fit.max_iterations`,
// `plane_fit.min_inliers`, `plane_fit.voxel_subsample`, `plane_fit.normal_k`,
// `kmeans.max_iter`, `kmeans.tol`, `kmeans.restarts`, `ground.target_area`,
// `ground.coarse_threshold`, `ground.fine_threshold`, `preprocess.voxel`,
// `preprocess.smooth`, `threads`, and `class_map.<source> = <label>`
// overrides for the merge map. Unknown keys are an error.
struct ParsedConfig {
    PipelineConfig pipeline;
    MergeMap merge_map;
};

ParsedConfig parse_config_text(const std::string& text,
                               const ParsedConfig& base);
ParsedConfig load_config(const std::string& path);
ParsedConfig load_config(const std::string& path, const ParsedConfig& base);

inline ParsedConfig default_parsed_config() {
    return {default_pipeline_config(), default_merge_map()};
}

}  // namespace eandt
