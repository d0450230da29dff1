#include "eandt/types.hpp"

#include <cmath>

namespace eandt {

const char* to_string(SemanticLabel label) {
    switch (label) {
        case SemanticLabel::ground: return "ground";
        case SemanticLabel::building: return "building";
        case SemanticLabel::fence: return "fence";
        case SemanticLabel::pole: return "pole";
        case SemanticLabel::traffic_sign: return "traffic-sign";
        case SemanticLabel::tree_trunk: return "trunk";
        case SemanticLabel::other: return "other";
    }
    return "other";
}

SemanticLabel label_from_string(const std::string& name) {
    if (name == "ground") return SemanticLabel::ground;
    if (name == "building") return SemanticLabel::building;
    if (name == "fence") return SemanticLabel::fence;
    if (name == "pole") return SemanticLabel::pole;
    if (name == "traffic-sign" || name == "traffic_sign")
        return SemanticLabel::traffic_sign;
    if (name == "trunk" || name == "tree-trunk" || name == "tree_trunk")
        return SemanticLabel::tree_trunk;
    if (name == "other") return SemanticLabel::other;
    throw ConfigError("unknown label name: " + name);
}

void LabeledCloud::push_point(const Eigen::Vector3d& position, float intensity,
                              std::span<const float> point_probs) {
    if (point_probs.size() != num_classes())
        throw std::invalid_argument("prob row length != class count");
    positions.push_back(position);
    intensities.push_back(intensity);
    probs.insert(probs.end(), point_probs.begin(), point_probs.end());
}

LabeledPoint LabeledCloud::point(std::size_t i) const {
    LabeledPoint p;
    p.position = positions[i];
    p.intensity = intensities[i];
    auto row = probs_of(i);
    p.label_probs.assign(row.begin(), row.end());
    if (has_labels()) p.label = labels[i];
    return p;
}

std::size_t LabeledCloud::argmax_class(std::size_t i) const {
    auto row = probs_of(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
        if (row[c] > row[best]) best = c;
    return best;
}

void LabeledCloud::validate() const {
    const std::size_t n = size();
    if (intensities.size() != n)
        throw DataError("intensity count != point count");
    if (probs.size() != n * num_classes())
        throw DataError("prob array size != points * classes");
    if (!labels.empty() && labels.size() != n)
        throw DataError("label count != point count");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (float p : probs_of(i)) {
            if (p < 0.0f || !std::isfinite(p))
                throw DataError("negative or non-finite probability at point " +
                                std::to_string(i));
            sum += p;
        }
        if (num_classes() > 0 && std::abs(sum - 1.0) > 1e-4)
            throw DataError("probability row of point " + std::to_string(i) +
                            " sums to " + std::to_string(sum));
        if (!positions[i].allFinite())
            throw DataError("non-finite position at point " +
                            std::to_string(i));
    }
}

std::vector<int> LabeledCloud::ids_with_label(SemanticLabel label) const {
    if (!has_labels()) throw std::logic_error("cloud has no hard labels");
    std::vector<int> ids;
    for (std::size_t i = 0; i < size(); ++i)
        if (labels[i] == label) ids.push_back(static_cast<int>(i));
    return ids;
}

}  // namespace eandt
