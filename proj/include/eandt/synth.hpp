#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "eandt/primitives.hpp"
#include "eandt/types.hpp"

namespace eandt {

// Declarative description of a synthetic labeled scene. All poses are in
// the map frame; yaw in radians about +z.
struct SceneSpec {
    struct Ground {
        double length = 100.0, width = 20.0;  // meters, centered at origin
        double density = 260.0;               // points / m^2
        double roughness = 0.02;              // surface noise sigma, meters
        double slope = 0.02;                  // dz/dx tilt
        double wave_amp = 0.15, wave_len = 19.0;  // gentle undulation
    };
    struct Building {
        Eigen::Vector2d center = Eigen::Vector2d::Zero();
        double width = 9.0, depth = 6.0, height = 4.0;  // meters
        double yaw = 0.0;
        double density = 580.0;  // points / m^2 of wall
    };
    struct Fence {
        Eigen::Vector2d start = Eigen::Vector2d::Zero();
        Eigen::Vector2d end = Eigen::Vector2d::Zero();
        double height = 1.6;
        double density = 890.0;
    };
    struct Cylinder {  // poles and trunks
        Eigen::Vector2d center = Eigen::Vector2d::Zero();
        double radius = 0.07, height = 3.0;
        double density = 550.0;  // points / m^2 of lateral surface
        double tilt = 0.0;       // radians off vertical
        double tilt_azimuth = 0.0;
    };
    struct Sign {
        Eigen::Vector2d center = Eigen::Vector2d::Zero();
        double size = 0.65;  // square side, meters
        double bottom = 1.8; // mount height
        double yaw = 0.0;
        double density = 1800.0;
    };

    Ground ground;
    std::vector<Building> buildings;
    std::vector<Fence> fences;
    std::vector<Cylinder> poles;
    std::vector<Cylinder> trunks;
    std::vector<Sign> signs;

    double surface_noise = 0.015;  // Gaussian sigma off each surface
    double outlier_fraction = 0.08;
    double label_noise_fraction = 0.02;
    std::uint64_t seed = 1;
};

// True generating model of each primitive, for recovery metrics.
struct TruePrimitive {
    SemanticLabel label = SemanticLabel::other;
    bool planar = true;
    Plane plane;                  // planar case
    Eigen::Vector3d axis_point = Eigen::Vector3d::Zero();  // cylindrical case
    Eigen::Vector3d axis_dir = Eigen::Vector3d::UnitZ();
    double length = 0.0;
    std::vector<int> point_ids;  // ascending, into the generated cloud
};

struct GroundTruth {
    std::vector<TruePrimitive> primitives;
};

// Deterministic per spec.seed; points are emitted object by object in spec
// order, outliers last. Probs are one-hot, then corrupted for a
// label_noise_fraction subset; outliers take the label of the nearest
// surface sample.
LabeledCloud generate_scene(const SceneSpec& spec, GroundTruth* truth = nullptr);

// The default acceptance scene: 100 x 20 m undulating ground, 4 rotated
// buildings, 2 fences, 6 trunks, 10 poles, 4 signs.
SceneSpec mini_suburb();

// Scene spec files use the flat key=value syntax; `mini-suburb` is also
// accepted as a named built-in.
SceneSpec load_scene_spec(const std::string& path);
SceneSpec parse_scene_spec_text(const std::string& text);

}  // namespace eandt
