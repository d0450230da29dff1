#include "eandt/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eandt {

namespace {

constexpr int kLeafSize = 16;

}  // namespace

// ---------------------------------------------------------------- KdTree --

KdTree::KdTree(std::vector<Eigen::Vector3d> points)
    : points_(std::move(points)) {
    ids_.resize(points_.size());
    std::iota(ids_.begin(), ids_.end(), 0);
    if (!points_.empty()) {
        nodes_.emplace_back();
        build(0, static_cast<int>(points_.size()), 0);
    }
}

KdTree::KdTree(std::span<const Eigen::Vector3d> points,
               std::span<const int> ids)
    : ids_(ids.begin(), ids.end()) {
    points_.reserve(ids_.size());
    for (int id : ids_) points_.push_back(points[id]);
    if (!points_.empty()) {
        nodes_.emplace_back();
        build(0, static_cast<int>(points_.size()), 0);
    }
}

void KdTree::build(int begin, int end, int node) {
    if (end - begin <= kLeafSize) {
        nodes_[node].begin = begin;
        nodes_[node].end = end;
        return;
    }
    Eigen::Vector3d lo = points_[begin], hi = points_[begin];
    for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[i]);
        hi = hi.cwiseMax(points_[i]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) {  // all points coincide; keep as one leaf
        nodes_[node].begin = begin;
        nodes_[node].end = end;
        return;
    }
    const int mid = begin + (end - begin) / 2;
    // Keep points_ and ids_ parallel while partitioning around the median.
    std::vector<int> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    std::nth_element(idx.begin(), idx.begin() + (mid - begin), idx.end(),
                     [&](int a, int b) {
                         return points_[a][axis] < points_[b][axis];
                     });
    std::vector<Eigen::Vector3d> pts(end - begin);
    std::vector<int> ids(end - begin);
    for (int i = 0; i < end - begin; ++i) {
        pts[i] = points_[idx[i]];
        ids[i] = ids_[idx[i]];
    }
    std::copy(pts.begin(), pts.end(), points_.begin() + begin);
    std::copy(ids.begin(), ids.end(), ids_.begin() + begin);

    nodes_[node].axis = axis;
    nodes_[node].split = points_[mid][axis];
    const int left = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[node].left = left;
    nodes_[node].right = left + 1;
    build(begin, mid, left);
    build(mid, end, left + 1);
}

void KdTree::radius_walk(int node, const Eigen::Vector3d& query, double r2,
                         std::vector<int>& out) const {
    const Node& nd = nodes_[node];
    if (nd.axis < 0) {
        for (int i = nd.begin; i < nd.end; ++i)
            if ((points_[i] - query).squaredNorm() <= r2)
                out.push_back(ids_[i]);
        return;
    }
    const double delta = query[nd.axis] - nd.split;
    // Points equal to the split value sit in the right child.
    if (delta < 0.0 || delta * delta <= r2) radius_walk(nd.left, query, r2, out);
    if (delta >= 0.0 || delta * delta <= r2)
        radius_walk(nd.right, query, r2, out);
}

std::vector<int> KdTree::radius(const Eigen::Vector3d& query, double r) const {
    if (r < 0.0) throw std::invalid_argument("negative radius");
    std::vector<int> out;
    if (!nodes_.empty()) radius_walk(0, query, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> KdTree::nearest(const Eigen::Vector3d& query, int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > points_.size())
        throw std::invalid_argument("k out of range");
    // Max-heap of the best k (dist^2, id), ordered so the worst is on top;
    // ties inside the heap resolve to the larger id being worse.
    using Entry = std::pair<double, int>;
    std::vector<Entry> heap;
    heap.reserve(k + 1);
    auto worse = [](const Entry& a, const Entry& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    };

    // Iterative best-first is unnecessary: plain depth-first with pruning
    // against the current k-th distance is exact.
    auto visit = [&](auto&& self, int node) -> void {
        const Node& nd = nodes_[node];
        if (nd.axis < 0) {
            for (int i = nd.begin; i < nd.end; ++i) {
                Entry e{(points_[i] - query).squaredNorm(), ids_[i]};
                if (heap.size() < static_cast<std::size_t>(k)) {
                    heap.push_back(e);
                    std::push_heap(heap.begin(), heap.end(), worse);
                } else if (worse(e, heap.front())) {
                    std::pop_heap(heap.begin(), heap.end(), worse);
                    heap.back() = e;
                    std::push_heap(heap.begin(), heap.end(), worse);
                }
            }
            return;
        }
        const double delta = query[nd.axis] - nd.split;
        const int near = delta < 0.0 ? nd.left : nd.right;
        const int far = delta < 0.0 ? nd.right : nd.left;
        self(self, near);
        // The far side can still hold an id that beats an equal-distance
        // larger id in the heap, so prune with <= rather than <.
        if (heap.size() < static_cast<std::size_t>(k) ||
            delta * delta <= heap.front().first)
            self(self, far);
    };
    visit(visit, 0);

    std::sort_heap(heap.begin(), heap.end(), worse);
    std::vector<int> out;
    out.reserve(heap.size());
    for (const auto& [d2, id] : heap) out.push_back(id);
    return out;
}

// ------------------------------------------------------- FixedRadiusIndex --

namespace {

std::uint64_t pack_cell(std::int64_t ix, std::int64_t iy, std::int64_t iz) {
    // 21 bits per axis, offset to keep indices positive.
    const std::uint64_t bias = 1u << 20;
    const std::uint64_t mask = (1u << 21) - 1;
    return ((static_cast<std::uint64_t>(ix) + bias) & mask) << 42 |
           ((static_cast<std::uint64_t>(iy) + bias) & mask) << 21 |
           ((static_cast<std::uint64_t>(iz) + bias) & mask);
}

}  // namespace

FixedRadiusIndex::FixedRadiusIndex(std::span<const Eigen::Vector3d> points,
                                   std::span<const int> ids, double radius)
    : points_(points), radius_(radius) {
    if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
    inv_radius_ = 1.0 / radius;
    std::vector<std::pair<std::uint64_t, int>> keyed;
    keyed.reserve(ids.size());
    for (int id : ids) keyed.emplace_back(cell_key(points[id]), id);
    std::sort(keyed.begin(), keyed.end());
    order_.reserve(keyed.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i == 0 || keyed[i].first != keyed[i - 1].first)
            cells_.push_back({keyed[i].first, static_cast<int>(i), 0});
        cells_.back().end = static_cast<int>(i + 1);
        order_.push_back(keyed[i].second);
    }
}

namespace {

std::vector<int> iota_ids(std::size_t n) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

}  // namespace

FixedRadiusIndex::FixedRadiusIndex(std::span<const Eigen::Vector3d> points,
                                   double radius)
    : FixedRadiusIndex(points, iota_ids(points.size()), radius) {}

std::uint64_t FixedRadiusIndex::cell_key(const Eigen::Vector3d& p) const {
    return pack_cell(static_cast<std::int64_t>(std::floor(p.x() * inv_radius_)),
                     static_cast<std::int64_t>(std::floor(p.y() * inv_radius_)),
                     static_cast<std::int64_t>(std::floor(p.z() * inv_radius_)));
}

void FixedRadiusIndex::radius_into(const Eigen::Vector3d& query,
                                   std::vector<int>& out) const {
    const double r2 = radius_ * radius_;
    const std::int64_t ix =
        static_cast<std::int64_t>(std::floor(query.x() * inv_radius_));
    const std::int64_t iy =
        static_cast<std::int64_t>(std::floor(query.y() * inv_radius_));
    const std::int64_t iz =
        static_cast<std::int64_t>(std::floor(query.z() * inv_radius_));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dz = -1; dz <= 1; ++dz) {
                const std::uint64_t key =
                    pack_cell(ix + dx, iy + dy, iz + dz);
                auto it = std::lower_bound(
                    cells_.begin(), cells_.end(), key,
                    [](const CellRange& c, std::uint64_t k) {
                        return c.key < k;
                    });
                if (it == cells_.end() || it->key != key) continue;
                for (int i = it->begin; i < it->end; ++i) {
                    const int id = order_[i];
                    if ((points_[id] - query).squaredNorm() <= r2)
                        out.push_back(id);
                }
            }
}

std::vector<int> FixedRadiusIndex::radius(const Eigen::Vector3d& query) const {
    std::vector<int> out;
    radius_into(query, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace eandt
