#include "eandt/region_grow.hpp"

#include <algorithm>
#include <stdexcept>

#include "eandt/spatial.hpp"

namespace eandt {

std::vector<Instance> region_grow(const LabeledCloud& cloud,
                                  std::span<const int> ids,
                                  SemanticLabel label,
                                  double distance_threshold, int min_points) {
    if (distance_threshold <= 0.0)
        throw std::invalid_argument("distance_threshold must be positive");
    if (min_points < 1)
        throw std::invalid_argument("min_points must be at least 1");
    if (ids.empty()) return {};

    FixedRadiusIndex index(cloud.positions, ids, distance_threshold);

    // BFS over the <=threshold graph. component[] is indexed by point id;
    // seeds are taken in ascending id order so instances come out ordered by
    // their smallest member.
    std::vector<int> component(cloud.size(), -1);
    std::vector<Instance> instances;
    std::vector<int> frontier, neighbors;
    for (int seed : ids) {
        if (component[seed] >= 0) continue;
        const int comp = static_cast<int>(instances.size());
        Instance inst;
        inst.label = label;
        component[seed] = comp;
        frontier.assign(1, seed);
        inst.point_ids.push_back(seed);
        while (!frontier.empty()) {
            const int cur = frontier.back();
            frontier.pop_back();
            neighbors.clear();
            index.radius_into(cloud.positions[cur], neighbors);
            for (int nb : neighbors) {
                if (component[nb] >= 0) continue;
                component[nb] = comp;
                frontier.push_back(nb);
                inst.point_ids.push_back(nb);
            }
        }
        instances.push_back(std::move(inst));
    }

    std::vector<Instance> kept;
    for (auto& inst : instances) {
        if (static_cast<int>(inst.point_ids.size()) < min_points) continue;
        std::sort(inst.point_ids.begin(), inst.point_ids.end());
        kept.push_back(std::move(inst));
    }
    return kept;
}

}  // namespace eandt
