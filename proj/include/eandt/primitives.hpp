#pragma once

#include <variant>
#include <vector>

#include "eandt/pca.hpp"
#include "eandt/ransac_plane.hpp"
#include "eandt/region_grow.hpp"
#include "eandt/rng.hpp"
#include "eandt/types.hpp"

namespace eandt {

inline constexpr double kAreaGrid = 0.10;  // meters, in-plane occupancy grid

struct PlanarPrimitive {
    std::vector<int> point_ids;  // into the parent cloud, ascending
    Plane plane;
    Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();  // PCA axes, eigenvalues descending
    int area_count = 0;  // occupied 10 cm squares after in-plane projection
};

struct CylindricalPrimitive {
    std::vector<int> point_ids;  // into the parent cloud, ascending
    Eigen::Vector3d axis_point = Eigen::Vector3d::Zero();
    Eigen::Vector3d axis_dir = Eigen::Vector3d::UnitZ();
    double length = 0.0;  // member projection extent along axis_dir
};

using Primitive = std::variant<PlanarPrimitive, CylindricalPrimitive>;

const std::vector<int>& primitive_points(const Primitive& p);

// Occupied 10 cm squares after projecting the member points onto the two
// dominant PCA axes. Fills `basis` and `area_count` of a primitive whose
// points are already set.
int projected_area_count(const LabeledCloud& cloud, PlanarPrimitive& prim,
                         double grid = kAreaGrid);

// Walls and fences: subsample with an averaging voxel grid
// (cfg.voxel_subsample), estimate normals, then repeat ransac_plane removing
// inliers after each accepted plane until support falls below
// cfg.min_inliers. Each primitive claims the original points within
// cfg.distance_threshold of its plane, in extraction order; unclaimed points
// are dropped.
std::vector<PlanarPrimitive> extract_planar_primitives(
    const LabeledCloud& cloud, const Instance& instance,
    const PlaneFitConfig& cfg, Rng rng);

// Ground: K-means++ into k = max(1, round(footprint / 100 m^2)) clusters,
// footprint counted on a 1 m horizontal occupancy grid, then per cluster a
// least-squares plane with a 30 cm threshold drops coarse noise. Clusters
// left with < 3 points are dropped.
std::vector<PlanarPrimitive> extract_ground_primitives(
    const LabeledCloud& cloud, const Instance& instance, Rng rng,
    double coarse_threshold = 0.30, double target_area = 100.0);

// Poles and trunks: one cylinder per instance; axis = dominant PCA axis
// through the centroid, length = projection extent. Needs >= 3 points.
CylindricalPrimitive make_cylindrical_primitive(const LabeledCloud& cloud,
                                                const Instance& instance);

// Traffic signs: one plane per instance, least-squares over all points,
// nothing dropped. Needs >= 3 points.
PlanarPrimitive traffic_sign_primitive(const LabeledCloud& cloud,
                                       const Instance& instance);

}  // namespace eandt
