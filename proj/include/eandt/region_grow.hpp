#pragma once

#include <span>
#include <vector>

#include "eandt/types.hpp"

namespace eandt {

// Spatially connected component of points sharing a semantic label.
struct Instance {
    SemanticLabel label = SemanticLabel::other;
    std::vector<int> point_ids;  // sorted ascending
};

// Euclidean region growing: two points join the same instance iff they are
// connected by a chain with consecutive gaps <= distance_threshold.
// Components smaller than min_points are dropped. Instances are ordered by
// their smallest member id; member ids are sorted.
std::vector<Instance> region_grow(const LabeledCloud& cloud,
                                  std::span<const int> ids,
                                  SemanticLabel label,
                                  double distance_threshold, int min_points);

}  // namespace eandt
