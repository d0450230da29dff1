#include "eandt/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "eandt/spatial.hpp"

namespace eandt {

LabeledCloud voxel_average_filter(const LabeledCloud& cloud,
                                  double voxel_size) {
    if (voxel_size <= 0.0)
        throw std::invalid_argument("voxel_size must be positive");
    const std::size_t nc = cloud.num_classes();

    struct Acc {
        Eigen::Vector3d pos_sum = Eigen::Vector3d::Zero();
        double intensity_sum = 0.0;
        std::vector<double> prob_sum;
        std::size_t count = 0;
    };
    std::map<std::array<std::int64_t, 3>, int> voxel_of;
    std::vector<Acc> accs;  // first-touch order

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Eigen::Vector3d& p = cloud.positions[i];
        const std::array<std::int64_t, 3> key = {
            static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
        auto [it, inserted] =
            voxel_of.try_emplace(key, static_cast<int>(accs.size()));
        if (inserted) {
            accs.emplace_back();
            accs.back().prob_sum.assign(nc, 0.0);
        }
        Acc& a = accs[it->second];
        a.pos_sum += p;
        a.intensity_sum += cloud.intensities[i];
        auto row = cloud.probs_of(i);
        for (std::size_t c = 0; c < nc; ++c) a.prob_sum[c] += row[c];
        ++a.count;
    }

    LabeledCloud out;
    out.class_names = cloud.class_names;
    out.frame_id = cloud.frame_id;
    std::vector<float> row(nc);
    for (const Acc& a : accs) {
        const double inv = 1.0 / static_cast<double>(a.count);
        double total = 0.0;
        for (double s : a.prob_sum) total += s;
        for (std::size_t c = 0; c < nc; ++c)
            row[c] = total > 0.0 ? static_cast<float>(a.prob_sum[c] / total)
                                 : static_cast<float>(1.0 / nc);
        out.push_point(a.pos_sum * inv,
                       static_cast<float>(a.intensity_sum * inv), row);
    }
    return out;
}

LabeledCloud smooth_label_probs(const LabeledCloud& cloud, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
    const std::size_t nc = cloud.num_classes();
    LabeledCloud out = cloud;
    out.labels.clear();
    if (cloud.empty()) return out;

    FixedRadiusIndex index(cloud.positions, radius);
    std::vector<int> neighbors;
    std::vector<double> sum(nc);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        neighbors.clear();
        index.radius_into(cloud.positions[i], neighbors);
        std::sort(neighbors.begin(), neighbors.end());
        std::fill(sum.begin(), sum.end(), 0.0);
        for (int id : neighbors) {
            auto row = cloud.probs_of(id);
            for (std::size_t c = 0; c < nc; ++c) sum[c] += row[c];
        }
        double total = 0.0;
        for (double s : sum) total += s;
        auto out_row = out.probs_of(i);
        for (std::size_t c = 0; c < nc; ++c)
            out_row[c] = static_cast<float>(sum[c] / total);
    }
    return out;
}

MergeMap default_merge_map() {
    MergeMap map;
    map["road"] = SemanticLabel::ground;
    map["sidewalk"] = SemanticLabel::ground;
    map["parking"] = SemanticLabel::ground;
    map["building"] = SemanticLabel::building;
    map["fence"] = SemanticLabel::fence;
    map["pole"] = SemanticLabel::pole;
    map["traffic-sign"] = SemanticLabel::traffic_sign;
    map["trunk"] = SemanticLabel::tree_trunk;
    for (const char* name :
         {"car", "bicycle", "motorcycle", "truck", "other-vehicle", "person",
          "bicyclist", "motorcyclist", "other-ground", "vegetation", "terrain",
          "unlabeled", "outlier"})
        map[name] = SemanticLabel::other;
    return map;
}

LabeledCloud assign_hard_labels(const LabeledCloud& cloud,
                                const MergeMap& merge_map) {
    // Resolve every class name up front so a bad config fails loudly.
    std::vector<SemanticLabel> class_label(cloud.num_classes());
    for (std::size_t c = 0; c < cloud.num_classes(); ++c) {
        auto it = merge_map.find(cloud.class_names[c]);
        if (it == merge_map.end())
            throw ConfigError("class `" + cloud.class_names[c] +
                              "` missing from merge map");
        class_label[c] = it->second;
    }

    LabeledCloud out;
    out.class_names = cloud.class_names;
    out.frame_id = cloud.frame_id;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const SemanticLabel label = class_label[cloud.argmax_class(i)];
        if (label == SemanticLabel::other) continue;
        out.push_point(cloud.positions[i], cloud.intensities[i],
                       cloud.probs_of(i));
        out.labels.push_back(label);
    }
    return out;
}

}  // namespace eandt
