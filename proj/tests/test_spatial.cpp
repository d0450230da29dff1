#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <vector>

#include "eandt/parallel.hpp"
#include "eandt/rng.hpp"
#include "eandt/spatial.hpp"

using eandt::FixedRadiusIndex;
using eandt::KdTree;
using eandt::Rng;

namespace {

// Reference implementations the index structures must match exactly.

std::vector<int> brute_radius(const std::vector<Eigen::Vector3d>& points,
                              const Eigen::Vector3d& q, double r) {
    std::vector<int> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if ((points[i] - q).squaredNorm() <= r * r)
            out.push_back(static_cast<int>(i));
    return out;  // ascending by construction
}

std::vector<int> brute_nearest(const std::vector<Eigen::Vector3d>& points,
                               const Eigen::Vector3d& q, int k) {
    std::vector<std::pair<double, int>> all;
    for (std::size_t i = 0; i < points.size(); ++i)
        all.emplace_back((points[i] - q).squaredNorm(), static_cast<int>(i));
    std::sort(all.begin(), all.end());
    std::vector<int> out;
    for (int i = 0; i < k && i < static_cast<int>(all.size()); ++i)
        out.push_back(all[i].second);
    return out;
}

std::vector<Eigen::Vector3d> random_points(std::size_t n, Rng& rng,
                                           double extent = 10.0) {
    std::vector<Eigen::Vector3d> pts(n);
    for (auto& p : pts)
        p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent),
             rng.uniform(0.0, extent)};
    return pts;
}

}  // namespace

TEST_CASE("kdtree radius matches brute force") {
    Rng rng(11);
    const auto pts = random_points(1000, rng);
    const KdTree tree(pts);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Vector3d q{rng.uniform(-1.0, 11.0),
                                rng.uniform(-1.0, 11.0),
                                rng.uniform(-1.0, 11.0)};
        const double r = rng.uniform(0.0, 4.0);
        CHECK(tree.radius(q, r) == brute_radius(pts, q, r));
    }
}

TEST_CASE("kdtree radius boundary is inclusive") {
    const std::vector<Eigen::Vector3d> pts = {
        {0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    const KdTree tree(pts);
    CHECK(tree.radius({0, 0, 0}, 1.0) == std::vector<int>{0, 1});
    CHECK(tree.radius({0, 0, 0}, 2.0) == std::vector<int>{0, 1, 2});
    CHECK(tree.radius({0, 0, 0}, 0.0) == std::vector<int>{0});
}

TEST_CASE("kdtree nearest matches brute force order") {
    Rng rng(12);
    const auto pts = random_points(800, rng);
    const KdTree tree(pts);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Vector3d q{rng.uniform(0.0, 10.0),
                                rng.uniform(0.0, 10.0),
                                rng.uniform(0.0, 10.0)};
        for (int k : {1, 5, 26}) {
            CHECK(tree.nearest(q, k) == brute_nearest(pts, q, k));
        }
    }
}

TEST_CASE("kdtree nearest breaks distance ties by id") {
    // Four points equidistant from the origin.
    const std::vector<Eigen::Vector3d> pts = {
        {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {5, 5, 5}};
    const KdTree tree(pts);
    CHECK(tree.nearest({0, 0, 0}, 3) == std::vector<int>{0, 1, 2});
    CHECK(tree.nearest({0, 0, 0}, 4) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("kdtree handles coincident points") {
    std::vector<Eigen::Vector3d> pts(100, Eigen::Vector3d{1, 2, 3});
    pts.push_back({4, 4, 4});
    const KdTree tree(pts);
    const auto got = tree.radius({1, 2, 3}, 0.5);
    std::vector<int> expect(100);
    for (int i = 0; i < 100; ++i) expect[i] = i;
    CHECK(got == expect);
    CHECK(tree.nearest({1.01, 2, 3}, 3) == std::vector<int>{0, 1, 2});
}

TEST_CASE("kdtree grid points exercise split ties") {
    std::vector<Eigen::Vector3d> pts;
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 5; ++z) pts.push_back({double(x), double(y), double(z)});
    const KdTree tree(pts);
    Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        const Eigen::Vector3d q{rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
                                rng.uniform(0.0, 4.0)};
        CHECK(tree.radius(q, 1.0) == brute_radius(pts, q, 1.0));
        CHECK(tree.nearest(q, 7) == brute_nearest(pts, q, 7));
    }
    // Query exactly on a lattice point: distance ties abound.
    CHECK(tree.radius({2, 2, 2}, 1.0) == brute_radius(pts, {2, 2, 2}, 1.0));
}

TEST_CASE("kdtree over subset reports original ids") {
    Rng rng(14);
    const auto pts = random_points(300, rng);
    std::vector<int> ids;
    for (int i = 0; i < 300; i += 3) ids.push_back(i);
    const KdTree tree(std::span<const Eigen::Vector3d>(pts), ids);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Vector3d q{rng.uniform(0.0, 10.0),
                                rng.uniform(0.0, 10.0),
                                rng.uniform(0.0, 10.0)};
        std::vector<int> expect;
        for (int id : ids)
            if ((pts[id] - q).squaredNorm() <= 4.0) expect.push_back(id);
        CHECK(tree.radius(q, 2.0) == expect);
    }
}

TEST_CASE("fixed radius index matches brute force") {
    Rng rng(15);
    const auto pts = random_points(1000, rng);
    for (double r : {0.3, 1.0, 2.5}) {
        const FixedRadiusIndex index(pts, r);
        for (int t = 0; t < 30; ++t) {
            const Eigen::Vector3d q{rng.uniform(-1.0, 11.0),
                                    rng.uniform(-1.0, 11.0),
                                    rng.uniform(-1.0, 11.0)};
            CHECK(index.radius(q) == brute_radius(pts, q, r));
            std::vector<int> unsorted;
            index.radius_into(q, unsorted);
            std::sort(unsorted.begin(), unsorted.end());
            CHECK(unsorted == brute_radius(pts, q, r));
        }
    }
}

TEST_CASE("fixed radius index far queries return nothing") {
    Rng rng(16);
    const auto pts = random_points(100, rng, 1.0);
    const FixedRadiusIndex index(pts, 0.2);
    CHECK(index.radius({100, 100, 100}).empty());
    CHECK(index.radius({-1e6, 0, 0}).empty());
}

TEST_CASE("rng streams are deterministic and seed sensitive") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        all_equal = all_equal && x == b.next();
        any_diff = any_diff || x != c.next();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("rng uniform and index stay in bounds") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.uniform(2.0, 5.0);
        CHECK(v >= 2.0);
        CHECK(v <= 5.0);
        CHECK(rng.uniform_index(7) < 7);
    }
    // Small bounds hit every value eventually.
    std::vector<int> seen(3, 0);
    for (int i = 0; i < 300; ++i) ++seen[rng.uniform_index(3)];
    for (int count : seen) CHECK(count > 0);
}

TEST_CASE("rng normal produces finite spread") {
    Rng rng(8);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        CHECK(std::isfinite(x));
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("rng mix separates substreams") {
    const auto a = Rng::mix(1, {2, 3});
    CHECK(a == Rng::mix(1, {2, 3}));
    CHECK(a != Rng::mix(1, {3, 2}));
    CHECK(a != Rng::mix(2, {2, 3}));
    CHECK(a != Rng::mix(1, {2, 3, 0}));
}

TEST_CASE("parallel_for covers every index once, any thread count") {
    for (int threads : {1, 2, 8}) {
        std::vector<std::atomic<int>> hits(1000);
        eandt::parallel_for(1000, threads,
                            [&](int i) { hits[i].fetch_add(1); });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    eandt::parallel_for(0, 4, [&](int) { CHECK(false); });
}

TEST_CASE("parallel_for propagates worker exceptions") {
    CHECK_THROWS_AS(eandt::parallel_for(100, 4,
                                        [](int i) {
                                            if (i == 57)
                                                throw std::runtime_error("x");
                                        }),
                    std::runtime_error);
}
