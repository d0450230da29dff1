#pragma once

#include <span>
#include <string>
#include <vector>

#include "eandt/ndt_cell.hpp"
#include "eandt/types.hpp"

namespace eandt {

enum class MapMethod : uint8_t { grid_ndt = 0, ea_ndt = 1 };

std::string to_string(MapMethod m);

// Octree over a fixed set of 3D points (cell means) supporting exact radius
// queries. Leaves stop subdividing at min_leaf_size or <= 8 points.
class CentroidOctree {
  public:
    CentroidOctree() = default;
    CentroidOctree(std::vector<Eigen::Vector3d> points, double min_leaf_size);

    // Indices of points with ||p - query|| <= r, sorted ascending.
    std::vector<int> radius(const Eigen::Vector3d& query, double r) const;

    std::size_t size() const { return points_.size(); }

  private:
    struct Node {
        Eigen::Vector3d center = Eigen::Vector3d::Zero();
        double half = 0.0;  // half edge length
        int begin = 0, end = 0;      // leaf range into order_
        std::array<int, 8> child{};  // -1 when absent; leaf iff child[0..7] all -1
    };

    void build(int node, int begin, int end, int depth);

    std::vector<Eigen::Vector3d> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    double min_leaf_ = 0.0;
};

// Immutable cell collection plus a centroid octree (min leaf s_c/4) for
// radius queries. Cell order is the build order, which the builders make
// canonical; serialization preserves it.
class NdtMap {
  public:
    NdtMap() = default;
    NdtMap(std::vector<NdtCell> cells, MapMethod method, double cell_size,
           std::uint64_t seed);

    const std::vector<NdtCell>& cells() const { return cells_; }
    MapMethod method() const { return method_; }
    double cell_size() const { return cell_size_; }
    std::uint64_t seed() const { return seed_; }

    // Cell indices with ||query - mean|| <= r, ascending.
    std::vector<int> radius_query(const Eigen::Vector3d& query,
                                  double r) const;

    std::size_t size() const { return cells_.size(); }

  private:
    std::vector<NdtCell> cells_;
    CentroidOctree index_;
    MapMethod method_ = MapMethod::grid_ndt;
    double cell_size_ = 1.0;
    std::uint64_t seed_ = 0;
};

// Fixed-grid baseline: per label, bucket the points by floor(x / s_c) per
// axis and keep buckets with >= kMinCellPoints points. Cells are ordered by
// (label, voxel key lexicographic by x,y,z index).
NdtMap build_grid_ndt(const LabeledCloud& cloud, double cell_size,
                      std::uint64_t seed = 0);

// Same bucketing restricted to one label's ids; returns admitted cells only.
std::vector<NdtCell> grid_cells_for_label(const LabeledCloud& cloud,
                                          std::span<const int> ids,
                                          SemanticLabel label,
                                          double cell_size);

}  // namespace eandt
