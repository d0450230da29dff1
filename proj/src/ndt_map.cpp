#include "eandt/ndt_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace eandt {

std::string to_string(MapMethod m) {
    return m == MapMethod::grid_ndt ? "grid-ndt" : "ea-ndt";
}

// ---------------------------------------------------------- CentroidOctree --

CentroidOctree::CentroidOctree(std::vector<Eigen::Vector3d> points,
                               double min_leaf_size)
    : points_(std::move(points)), min_leaf_(min_leaf_size) {
    if (min_leaf_size <= 0.0)
        throw std::invalid_argument("min leaf size must be positive");
    if (points_.empty()) return;
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);

    Eigen::Vector3d lo = points_[0], hi = points_[0];
    for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Node root;
    root.center = 0.5 * (lo + hi);
    root.half = std::max(0.5 * (hi - lo).maxCoeff(), 0.5 * min_leaf_);
    root.child.fill(-1);
    nodes_.push_back(root);
    build(0, 0, static_cast<int>(order_.size()), 0);
}

void CentroidOctree::build(int node, int begin, int end, int depth) {
    nodes_[node].begin = begin;
    nodes_[node].end = end;
    if (end - begin <= 8 || nodes_[node].half < min_leaf_ || depth > 40)
        return;

    const Eigen::Vector3d c = nodes_[node].center;
    // Bucket the range by octant; points on a split plane go to the upper
    // side.
    std::array<std::vector<int>, 8> buckets;
    for (int i = begin; i < end; ++i) {
        const Eigen::Vector3d& p = points_[order_[i]];
        const int code = (p.x() >= c.x() ? 4 : 0) | (p.y() >= c.y() ? 2 : 0) |
                         (p.z() >= c.z() ? 1 : 0);
        buckets[code].push_back(order_[i]);
    }
    int cursor = begin;
    for (int code = 0; code < 8; ++code) {
        if (buckets[code].empty()) continue;
        const int child_begin = cursor;
        for (int id : buckets[code]) order_[cursor++] = id;
        Node child;
        child.half = 0.5 * nodes_[node].half;
        child.center = c + child.half * Eigen::Vector3d(
                                            code & 4 ? 1.0 : -1.0,
                                            code & 2 ? 1.0 : -1.0,
                                            code & 1 ? 1.0 : -1.0);
        child.child.fill(-1);
        const int child_index = static_cast<int>(nodes_.size());
        nodes_.push_back(child);
        nodes_[node].child[code] = child_index;
        build(child_index, child_begin, cursor, depth + 1);
    }
}

std::vector<int> CentroidOctree::radius(const Eigen::Vector3d& query,
                                        double r) const {
    std::vector<int> out;
    if (nodes_.empty() || r < 0.0) return out;
    const double r2 = r * r;

    auto box_outside = [&](const Node& nd) {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double d =
                std::max(std::abs(query[a] - nd.center[a]) - nd.half, 0.0);
            d2 += d * d;
        }
        return d2 > r2;
    };
    auto visit = [&](auto&& self, int index) -> void {
        const Node& nd = nodes_[index];
        if (box_outside(nd)) return;
        const bool leaf =
            std::all_of(nd.child.begin(), nd.child.end(),
                        [](int ch) { return ch < 0; });
        if (leaf) {
            for (int i = nd.begin; i < nd.end; ++i)
                if ((points_[order_[i]] - query).squaredNorm() <= r2)
                    out.push_back(order_[i]);
            return;
        }
        for (int ch : nd.child)
            if (ch >= 0) self(self, ch);
    };
    visit(visit, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// ------------------------------------------------------------------ NdtMap --

NdtMap::NdtMap(std::vector<NdtCell> cells, MapMethod method, double cell_size,
               std::uint64_t seed)
    : cells_(std::move(cells)),
      method_(method),
      cell_size_(cell_size),
      seed_(seed) {
    if (cell_size <= 0.0)
        throw std::invalid_argument("cell size must be positive");
    std::vector<Eigen::Vector3d> means;
    means.reserve(cells_.size());
    for (const auto& c : cells_) means.push_back(c.mean());
    index_ = CentroidOctree(std::move(means), cell_size_ / 4.0);
}

std::vector<int> NdtMap::radius_query(const Eigen::Vector3d& query,
                                      double r) const {
    return index_.radius(query, r);
}

// ------------------------------------------------------------- grid builds --

std::vector<NdtCell> grid_cells_for_label(const LabeledCloud& cloud,
                                          std::span<const int> ids,
                                          SemanticLabel label,
                                          double cell_size) {
    if (cell_size <= 0.0)
        throw std::invalid_argument("cell size must be positive");
    // std::map keys sort lexicographically, which is the canonical cell
    // order of the serialized map.
    std::map<std::array<std::int64_t, 3>, std::vector<int>> buckets;
    for (int id : ids) {
        const Eigen::Vector3d& p = cloud.positions[id];
        const std::array<std::int64_t, 3> key = {
            static_cast<std::int64_t>(std::floor(p.x() / cell_size)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_size)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_size))};
        buckets[key].push_back(id);
    }
    std::vector<NdtCell> cells;
    for (const auto& [key, members] : buckets) {
        if (static_cast<int>(members.size()) < kMinCellPoints) continue;
        cells.push_back(accumulate_cell(cloud, members, label));
    }
    return cells;
}

NdtMap build_grid_ndt(const LabeledCloud& cloud, double cell_size,
                      std::uint64_t seed) {
    if (!cloud.has_labels())
        throw std::invalid_argument("grid build requires hard labels");
    std::vector<NdtCell> cells;
    for (SemanticLabel label : kUsedLabels) {
        const std::vector<int> ids = cloud.ids_with_label(label);
        std::vector<NdtCell> label_cells =
            grid_cells_for_label(cloud, ids, label, cell_size);
        cells.insert(cells.end(), label_cells.begin(), label_cells.end());
    }
    return NdtMap(std::move(cells), MapMethod::grid_ndt, cell_size, seed);
}

}  // namespace eandt
