#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace eandt {

// Hard semantic labels after source-class merging. Values are stable: they are
// the on-disk u8 codes of the map format and the canonical processing order.
enum class SemanticLabel : std::uint8_t {
    ground = 0,
    building = 1,
    fence = 2,
    pole = 3,
    traffic_sign = 4,
    tree_trunk = 5,
    other = 6,
};

inline constexpr std::size_t kNumLabels = 7;

// The six labels that participate in map building, in canonical order.
inline constexpr std::array<SemanticLabel, 6> kUsedLabels = {
    SemanticLabel::ground,       SemanticLabel::building,
    SemanticLabel::fence,        SemanticLabel::pole,
    SemanticLabel::traffic_sign, SemanticLabel::tree_trunk,
};

const char* to_string(SemanticLabel label);
SemanticLabel label_from_string(const std::string& name);

// Errors caused by files or configuration the user supplied, as opposed to
// programming errors (std::invalid_argument) or internal failures.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : DataError {
    using DataError::DataError;
};

// Convenience view of one point; storage lives in LabeledCloud.
struct LabeledPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    float intensity = 0.0f;
    std::vector<float> label_probs;
    SemanticLabel label = SemanticLabel::other;
};

// Point cloud with per-point class-probability vectors. Structure-of-arrays:
// probs is row-major, size() * num_classes() entries. labels is empty until
// assign_hard_labels has run.
class LabeledCloud {
  public:
    std::vector<std::string> class_names;
    std::string frame_id = "map";

    std::vector<Eigen::Vector3d> positions;
    std::vector<float> intensities;
    std::vector<float> probs;
    std::vector<SemanticLabel> labels;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    std::size_t num_classes() const { return class_names.size(); }

    std::span<const float> probs_of(std::size_t i) const {
        const std::size_t c = num_classes();
        return {probs.data() + i * c, c};
    }
    std::span<float> probs_of(std::size_t i) {
        const std::size_t c = num_classes();
        return {probs.data() + i * c, c};
    }

    bool has_labels() const { return labels.size() == size(); }

    void push_point(const Eigen::Vector3d& position, float intensity,
                    std::span<const float> point_probs);
    LabeledPoint point(std::size_t i) const;

    // Index of the most probable source class; ties go to the lowest index.
    std::size_t argmax_class(std::size_t i) const;

    // Checks the structural invariants (prob row lengths, simplex sum within
    // 1e-4, label == merged argmax when labels are present). Throws DataError.
    void validate() const;

    // Ids of points carrying `label`; requires has_labels().
    std::vector<int> ids_with_label(SemanticLabel label) const;
};

}  // namespace eandt
