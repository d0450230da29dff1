#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace eandt {

// Exact spatial index over a fixed set of points. Query results are identical
// to a brute-force scan: radius queries return ids sorted ascending, k-NN
// returns ids ordered by (distance, id).
class KdTree {
  public:
    KdTree() = default;
    explicit KdTree(std::vector<Eigen::Vector3d> points);
    // Index a subset of an external point array; reported ids are the
    // original ids.
    KdTree(std::span<const Eigen::Vector3d> points, std::span<const int> ids);

    std::size_t size() const { return points_.size(); }

    // All ids with ||p - query|| <= r (inclusive). r >= 0.
    std::vector<int> radius(const Eigen::Vector3d& query, double r) const;

    // The k nearest ids, sorted by (squared distance, id). 1 <= k <= size().
    std::vector<int> nearest(const Eigen::Vector3d& query, int k) const;

  private:
    struct Node {
        double split = 0.0;
        int axis = -1;  // -1 marks a leaf
        int begin = 0, end = 0;
        int left = -1, right = -1;
    };

    void build(int begin, int end, int node);
    void radius_walk(int node, const Eigen::Vector3d& query, double r2,
                     std::vector<int>& out) const;

    std::vector<Eigen::Vector3d> points_;  // permuted storage
    std::vector<int> ids_;                 // permuted original ids
    std::vector<Node> nodes_;
};

// Fixed-radius neighbor index: a hash grid with cell edge == radius. Exact
// for queries at that radius; used by the radius-heavy passes (probability
// smoothing, region growing) where the query radius is known up front.
class FixedRadiusIndex {
  public:
    FixedRadiusIndex(std::span<const Eigen::Vector3d> points,
                     std::span<const int> ids, double radius);
    FixedRadiusIndex(std::span<const Eigen::Vector3d> points, double radius);

    // All indexed ids within `radius` of query (inclusive), sorted ascending.
    std::vector<int> radius(const Eigen::Vector3d& query) const;
    // Same, appending to `out` (unsorted) to avoid reallocation in hot loops.
    void radius_into(const Eigen::Vector3d& query, std::vector<int>& out) const;

    double query_radius() const { return radius_; }

  private:
    struct CellRange {
        std::uint64_t key;
        int begin, end;
    };

    std::uint64_t cell_key(const Eigen::Vector3d& p) const;

    std::span<const Eigen::Vector3d> points_;
    std::vector<int> order_;  // indexed ids grouped by cell
    std::vector<CellRange> cells_;  // sorted by key
    double radius_ = 0.0;
    double inv_radius_ = 0.0;
};

}  // namespace eandt
