#pragma once

#include <map>
#include <string>

#include "eandt/types.hpp"

namespace eandt {

// One output point per occupied voxel (edge = voxel_size, keyed by
// floor(coord / voxel_size)); position, intensity and probs are member
// means, probs renormalized. Output order follows the first member of each
// voxel in input order. Labels, if assigned, are dropped (re-assign after).
LabeledCloud voxel_average_filter(const LabeledCloud& cloud, double voxel_size);

// Replace each point's probs by the mean over all points within `radius`
// (inclusive of itself), renormalized. Computed from the original probs.
LabeledCloud smooth_label_probs(const LabeledCloud& cloud, double radius);

// Source class name -> working label. Classes mapped to `other` are dropped.
using MergeMap = std::map<std::string, SemanticLabel>;

// The default source-class mapping: road/sidewalk/parking -> ground,
// building, fence, pole, traffic-sign, trunk keep their own label, every
// other SemanticKITTI class -> other.
MergeMap default_merge_map();

// Assign each point the label its argmax source class merges into
// (probability ties: lowest class index) and drop points that merge to
// `other`. Every class name present in the cloud must appear in merge_map.
LabeledCloud assign_hard_labels(const LabeledCloud& cloud,
                                const MergeMap& merge_map);

}  // namespace eandt
