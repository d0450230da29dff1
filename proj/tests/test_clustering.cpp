#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "eandt/kmeans.hpp"
#include "eandt/region_grow.hpp"
#include "eandt/rng.hpp"
#include "eandt/types.hpp"

using eandt::Instance;
using eandt::KMeansOptions;
using eandt::LabeledCloud;
using eandt::Rng;
using eandt::SemanticLabel;

namespace {

// Oracle: connected components by union-find over every point pair.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> brute_components(
    const std::vector<Eigen::Vector3d>& points, const std::vector<int>& ids,
    double threshold, std::size_t min_points) {
    UnionFind uf(static_cast<int>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            if ((points[ids[i]] - points[ids[j]]).norm() <= threshold)
                uf.unite(static_cast<int>(i), static_cast<int>(j));
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i)
        groups[uf.find(static_cast<int>(i))].push_back(ids[i]);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) {
        if (members.size() < min_points) continue;
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    // Same presentation the implementation promises: ordered by smallest id.
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return out;
}

// Oracle: optimal 2-means SSE by enumerating every bipartition.
double brute_best_sse_k2(const std::vector<Eigen::Vector3d>& points) {
    const int n = static_cast<int>(points.size());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        Eigen::Vector3d c[2] = {Eigen::Vector3d::Zero(),
                                Eigen::Vector3d::Zero()};
        int count[2] = {0, 0};
        for (int i = 0; i < n; ++i) {
            const int side = (mask >> i) & 1;
            c[side] += points[i];
            ++count[side];
        }
        c[0] /= count[0];
        c[1] /= count[1];
        double sse = 0;
        for (int i = 0; i < n; ++i)
            sse += (points[i] - c[(mask >> i) & 1]).squaredNorm();
        best = std::min(best, sse);
    }
    return best;
}

LabeledCloud cloud_from_points(const std::vector<Eigen::Vector3d>& points,
                               SemanticLabel label) {
    LabeledCloud cloud;
    cloud.class_names = {"x"};
    const std::vector<float> one = {1.0f};
    for (const auto& p : points) cloud.push_point(p, 0.0f, one);
    cloud.labels.assign(cloud.size(), label);
    return cloud;
}

}  // namespace

TEST_CASE("region growing matches all-pairs connectivity") {
    Rng rng(20);
    std::vector<Eigen::Vector3d> points(200);
    for (auto& p : points)
        p = {rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
             rng.uniform(0.0, 4.0)};
    const LabeledCloud cloud =
        cloud_from_points(points, SemanticLabel::building);
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);

    for (double threshold : {0.25, 0.35, 0.6}) {
        const auto expect =
            brute_components(points, ids, threshold, 1);
        const auto got = eandt::region_grow(cloud, ids,
                                            SemanticLabel::building,
                                            threshold, 1);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].point_ids == expect[i]);
            CHECK(got[i].label == SemanticLabel::building);
        }
    }
}

TEST_CASE("region growing drops small components") {
    Rng rng(21);
    std::vector<Eigen::Vector3d> points(150);
    for (auto& p : points)
        p = {rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0), 0.0};
    const LabeledCloud cloud = cloud_from_points(points, SemanticLabel::pole);
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);

    const auto expect = brute_components(points, ids, 0.3, 5);
    const auto got =
        eandt::region_grow(cloud, ids, SemanticLabel::pole, 0.3, 5);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i].point_ids == expect[i]);
}

TEST_CASE("region growing boundary distance is inclusive") {
    const std::vector<Eigen::Vector3d> points = {
        {0, 0, 0}, {0.5, 0, 0}, {1.0, 0, 0}, {3.0, 0, 0}};
    const LabeledCloud cloud = cloud_from_points(points, SemanticLabel::fence);
    const std::vector<int> ids = {0, 1, 2, 3};
    const auto got =
        eandt::region_grow(cloud, ids, SemanticLabel::fence, 0.5, 1);
    REQUIRE(got.size() == 2);  // chain of three linked at exactly 0.5
    CHECK(got[0].point_ids == std::vector<int>{0, 1, 2});
    CHECK(got[1].point_ids == std::vector<int>{3});
}

TEST_CASE("region growing over a subset only touches the subset") {
    const std::vector<Eigen::Vector3d> points = {
        {0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}, {0.3, 0, 0}};
    const LabeledCloud cloud = cloud_from_points(points, SemanticLabel::pole);
    const std::vector<int> ids = {0, 2};  // the bridge points are excluded
    const auto got =
        eandt::region_grow(cloud, ids, SemanticLabel::pole, 0.15, 1);
    REQUIRE(got.size() == 2);
    CHECK(got[0].point_ids == std::vector<int>{0});
    CHECK(got[1].point_ids == std::vector<int>{2});
}

TEST_CASE("kmeans k=2 reaches the enumerated optimum") {
    Rng rng(22);
    KMeansOptions opts;
    opts.restarts = 50;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_index(6));  // 3..8
        std::vector<Eigen::Vector3d> points(n);
        for (auto& p : points)
            p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                 rng.uniform(-1.0, 1.0)};
        const double best = brute_best_sse_k2(points);
        const auto got = eandt::kmeans_pp(points, 2, Rng(1000 + trial), opts);
        CHECK(got.sse == doctest::Approx(best).epsilon(1e-9));
        CHECK(got.sse >= best - 1e-12);  // can never beat the optimum
    }
}

TEST_CASE("kmeans basics: k=1 and exact separation") {
    std::vector<Eigen::Vector3d> points;
    Rng rng(23);
    for (int i = 0; i < 20; ++i)
        points.push_back({rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1), 0.0});
    for (int i = 0; i < 20; ++i)
        points.push_back(
            {10.0 + rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1), 0.0});

    const auto one = eandt::kmeans_pp(points, 1, Rng(5));
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    CHECK((one.centroids[0] - mean).norm() < 1e-12);

    const auto two = eandt::kmeans_pp(points, 2, Rng(5), {.restarts = 5});
    for (int i = 0; i < 20; ++i) CHECK(two.assignments[i] == two.assignments[0]);
    for (int i = 20; i < 40; ++i)
        CHECK(two.assignments[i] == two.assignments[20]);
    CHECK(two.assignments[0] != two.assignments[20]);
}

TEST_CASE("kmeans is deterministic in the rng seed") {
    Rng rng(24);
    std::vector<Eigen::Vector3d> points(60);
    for (auto& p : points)
        p = {rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0),
             rng.uniform(0.0, 5.0)};
    const auto a = eandt::kmeans_pp(points, 7, Rng(99), {.restarts = 3});
    const auto b = eandt::kmeans_pp(points, 7, Rng(99), {.restarts = 3});
    CHECK(a.assignments == b.assignments);
    CHECK(a.sse == b.sse);
    for (int c = 0; c < 7; ++c) CHECK(a.centroids[c] == b.centroids[c]);
}

TEST_CASE("kmeans restarts never increase the best sse") {
    Rng rng(25);
    std::vector<Eigen::Vector3d> points(40);
    for (auto& p : points)
        p = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0), 0.0};
    const auto one = eandt::kmeans_pp(points, 4, Rng(7), {.restarts = 1});
    const auto ten = eandt::kmeans_pp(points, 4, Rng(7), {.restarts = 10});
    CHECK(ten.sse <= one.sse);
}

TEST_CASE("kmeans tolerates duplicate-heavy input") {
    std::vector<Eigen::Vector3d> points(9, Eigen::Vector3d{1, 1, 1});
    points.push_back({2, 2, 2});
    const auto res = eandt::kmeans_pp(points, 3, Rng(3));
    REQUIRE(res.assignments.size() == points.size());
    for (int a : res.assignments) {
        CHECK(a >= 0);
        CHECK(a < 3);
    }
    for (const auto& c : res.centroids) CHECK(c.allFinite());

    // All points identical: ties go to the lowest cluster index.
    const std::vector<Eigen::Vector3d> same(6, Eigen::Vector3d{4, 4, 4});
    const auto degenerate = eandt::kmeans_pp(same, 2, Rng(4));
    CHECK(degenerate.sse == 0.0);
    for (int a : degenerate.assignments) CHECK(a == 0);
}

TEST_CASE("kmeans validates k") {
    const std::vector<Eigen::Vector3d> points(5, Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(eandt::kmeans_pp(points, 0, Rng(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(eandt::kmeans_pp(points, 6, Rng(1)),
                    std::invalid_argument);
}

TEST_CASE("kmeans assignments go to the nearest centroid, ties lowest") {
    Rng rng(26);
    std::vector<Eigen::Vector3d> points(50);
    for (auto& p : points)
        p = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), 0.0};
    const auto res = eandt::kmeans_pp(points, 5, Rng(11));
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int who = -1;
        for (int c = 0; c < 5; ++c) {
            const double d = (points[i] - res.centroids[c]).squaredNorm();
            if (d < best) {
                best = d;
                who = c;
            }
        }
        CHECK(res.assignments[i] == who);
    }
}
