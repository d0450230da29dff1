#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <vector>

#include "eandt/map_io.hpp"
#include "eandt/ndt_cell.hpp"
#include "eandt/ndt_map.hpp"
#include "eandt/rng.hpp"

using eandt::DataError;
using eandt::LabeledCloud;
using eandt::MapMethod;
using eandt::NdtCell;
using eandt::NdtMap;
using eandt::Rng;
using eandt::SemanticLabel;

namespace {

std::vector<Eigen::Vector3d> random_points(Rng& rng, int n, double extent) {
    std::vector<Eigen::Vector3d> pts(n);
    for (auto& p : pts)
        p = {rng.uniform(-extent, extent), rng.uniform(-extent, extent),
             rng.uniform(-extent, extent)};
    return pts;
}

// Oracle: direct mean-centered covariance, no streaming tricks.
struct Moments {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

Moments brute_moments(const std::vector<Eigen::Vector3d>& pts) {
    Moments m;
    for (const auto& p : pts) m.sum += p;
    if (pts.size() < 2) return m;
    const Eigen::Vector3d mean = m.sum / static_cast<double>(pts.size());
    for (const auto& p : pts)
        m.cov += (p - mean) * (p - mean).transpose();
    m.cov /= static_cast<double>(pts.size() - 1);
    return m;
}

void check_close(const NdtCell& cell, const Moments& m, double rel) {
    for (int a = 0; a < 3; ++a)
        CHECK(cell.sum[a] ==
              doctest::Approx(m.sum[a]).epsilon(rel).scale(1.0));
    const Eigen::Matrix3d got = cell.covariance();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(got(r, c) ==
                  doctest::Approx(m.cov(r, c)).epsilon(rel).scale(1.0));
}

LabeledCloud cloud_of(const std::vector<Eigen::Vector3d>& points,
                      SemanticLabel label) {
    LabeledCloud cloud;
    cloud.class_names = {"x"};
    const std::vector<float> one = {1.0f};
    for (const auto& p : points) cloud.push_point(p, 0.0f, one);
    cloud.labels.assign(cloud.size(), label);
    return cloud;
}

NdtCell random_cell(Rng& rng) {
    const int n = 6 + static_cast<int>(rng.uniform_index(40));
    Eigen::Vector3d center{rng.uniform(-50.0, 50.0),
                           rng.uniform(-50.0, 50.0),
                           rng.uniform(-5.0, 5.0)};
    std::vector<Eigen::Vector3d> pts(n);
    for (auto& p : pts)
        p = center + Eigen::Vector3d{rng.uniform(-0.5, 0.5),
                                     rng.uniform(-0.5, 0.5),
                                     rng.uniform(-0.5, 0.5)};
    const auto label = static_cast<SemanticLabel>(rng.uniform_index(6));
    return eandt::accumulate_cell(pts, label);
}

}  // namespace

TEST_CASE("accumulate_cell matches the direct two-pass oracle") {
    Rng rng(60);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(299));
        const auto pts = random_points(rng, n, 20.0);
        const auto cell = eandt::accumulate_cell(pts, SemanticLabel::ground);
        CHECK(cell.count == static_cast<std::uint32_t>(n));
        CHECK(cell.label == SemanticLabel::ground);
        check_close(cell, brute_moments(pts), 1e-9);
    }
}

TEST_CASE("accumulate_cell edge cases") {
    const std::vector<Eigen::Vector3d> one = {{1.5, -2.0, 3.0}};
    const auto cell = eandt::accumulate_cell(one, SemanticLabel::pole);
    CHECK(cell.count == 1);
    CHECK(cell.sum == one[0]);
    for (double v : cell.cov_upper) CHECK(v == 0.0);
    CHECK(cell.mean() == one[0]);

    CHECK_THROWS_AS(
        eandt::accumulate_cell(std::vector<Eigen::Vector3d>{},
                               SemanticLabel::pole),
        std::invalid_argument);

    // The id-based overload gathers the same statistics.
    Rng rng(61);
    const auto pts = random_points(rng, 40, 5.0);
    const LabeledCloud cloud = cloud_of(pts, SemanticLabel::fence);
    std::vector<int> ids(pts.size());
    std::iota(ids.begin(), ids.end(), 0);
    const auto direct = eandt::accumulate_cell(pts, SemanticLabel::fence);
    const auto via_ids =
        eandt::accumulate_cell(cloud, ids, SemanticLabel::fence);
    CHECK(via_ids.sum == direct.sum);
    CHECK(via_ids.cov_upper == direct.cov_upper);
}

TEST_CASE("merge_cells equals accumulation over the union") {
    Rng rng(62);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a_pts = random_points(
            rng, 1 + static_cast<int>(rng.uniform_index(60)), 8.0);
        const auto b_pts = random_points(
            rng, 1 + static_cast<int>(rng.uniform_index(60)), 8.0);
        const auto c_pts = random_points(
            rng, 1 + static_cast<int>(rng.uniform_index(60)), 8.0);
        const auto a = eandt::accumulate_cell(a_pts, SemanticLabel::building);
        const auto b = eandt::accumulate_cell(b_pts, SemanticLabel::building);
        const auto c = eandt::accumulate_cell(c_pts, SemanticLabel::building);

        std::vector<Eigen::Vector3d> all = a_pts;
        all.insert(all.end(), b_pts.begin(), b_pts.end());
        all.insert(all.end(), c_pts.begin(), c_pts.end());
        const Moments expect = brute_moments(all);

        const auto left = eandt::merge_cells(eandt::merge_cells(a, b), c);
        const auto right = eandt::merge_cells(a, eandt::merge_cells(b, c));
        CHECK(left.count == all.size());
        CHECK(right.count == all.size());
        CHECK(left.label == SemanticLabel::building);
        check_close(left, expect, 1e-9);
        check_close(right, expect, 1e-9);
    }
}

TEST_CASE("merge_cells rejects label mismatches") {
    Rng rng(63);
    const auto a = eandt::accumulate_cell(random_points(rng, 10, 1.0),
                                          SemanticLabel::ground);
    const auto b = eandt::accumulate_cell(random_points(rng, 10, 1.0),
                                          SemanticLabel::pole);
    CHECK_THROWS_AS(eandt::merge_cells(a, b), std::invalid_argument);
}

TEST_CASE("cell_gaussian regularizes degenerate covariances") {
    // Well-conditioned input passes through bit-for-bit.
    Rng rng(64);
    const auto cell = eandt::accumulate_cell(random_points(rng, 50, 2.0),
                                             SemanticLabel::ground);
    const auto g = eandt::cell_gaussian(cell);
    CHECK(g.mu == cell.mean());
    CHECK(g.sigma == cell.covariance());

    // All points identical: covariance zero, floored to ~1e-9 * identity.
    NdtCell flat;
    flat.label = SemanticLabel::pole;
    flat.count = 6;
    flat.sum = Eigen::Vector3d{6, 12, 18};
    const auto g0 = eandt::cell_gaussian(flat);
    CHECK((g0.mu - Eigen::Vector3d{1, 2, 3}).norm() < 1e-12);
    CHECK((g0.sigma - 1e-9 * Eigen::Matrix3d::Identity()).cwiseAbs()
              .maxCoeff() < 1e-15);

    // Rank-2 covariance: the dead axis is lifted to 1e-3 * lambda_max.
    NdtCell planar;
    planar.label = SemanticLabel::building;
    planar.count = 10;
    planar.sum = Eigen::Vector3d::Zero();
    planar.cov_upper = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};  // diag(1, 1, 0)
    const auto g2 = eandt::cell_gaussian(planar);
    Eigen::Matrix3d expect = Eigen::Matrix3d::Identity();
    expect(2, 2) = 1e-3;
    CHECK((g2.sigma - expect).cwiseAbs().maxCoeff() < 1e-12);

    NdtCell thin = cell;
    thin.count = 5;  // below the admission threshold
    CHECK_THROWS_AS(eandt::cell_gaussian(thin), std::invalid_argument);
}

TEST_CASE("grid_cells_for_label matches direct floor bucketing") {
    Rng rng(65);
    const auto pts = random_points(rng, 4000, 12.0);
    const LabeledCloud cloud = cloud_of(pts, SemanticLabel::ground);
    std::vector<int> ids(pts.size());
    std::iota(ids.begin(), ids.end(), 0);

    for (double s : {0.7, 1.0, 2.5}) {
        // Oracle: bucket ids by floored key, keep >= 6, emit in lexicographic
        // key order.
        std::map<std::array<std::int64_t, 3>, std::vector<int>> buckets;
        for (int id : ids) {
            const auto& p = pts[id];
            buckets[{static_cast<std::int64_t>(std::floor(p.x() / s)),
                     static_cast<std::int64_t>(std::floor(p.y() / s)),
                     static_cast<std::int64_t>(std::floor(p.z() / s))}]
                .push_back(id);
        }
        std::vector<NdtCell> expect;
        for (const auto& [key, members] : buckets)
            if (members.size() >= 6)
                expect.push_back(eandt::accumulate_cell(
                    cloud, members, SemanticLabel::ground));

        const auto got = eandt::grid_cells_for_label(
            cloud, ids, SemanticLabel::ground, s);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].count == expect[i].count);
            CHECK(got[i].sum == expect[i].sum);
            CHECK(got[i].cov_upper == expect[i].cov_upper);
        }
    }
}

TEST_CASE("grid admission threshold sits exactly at six points") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.1 + 0.05 * i, 0.5, 0.5});
    for (int i = 0; i < 6; ++i) pts.push_back({10.1 + 0.05 * i, 0.5, 0.5});
    const LabeledCloud cloud = cloud_of(pts, SemanticLabel::fence);
    std::vector<int> ids(pts.size());
    std::iota(ids.begin(), ids.end(), 0);
    const auto cells = eandt::grid_cells_for_label(
        cloud, ids, SemanticLabel::fence, 1.0);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].count == 6);
    CHECK(cells[0].mean().x() > 10.0);
}

TEST_CASE("build_grid_ndt orders cells by label then key") {
    Rng rng(66);
    LabeledCloud cloud;
    cloud.class_names = {"x"};
    const std::vector<float> one = {1.0f};
    // Two dense blobs per label, placed so labels interleave spatially.
    std::vector<SemanticLabel> blob_labels;
    for (SemanticLabel label : eandt::kUsedLabels) {
        for (int blob = 0; blob < 2; ++blob) {
            const Eigen::Vector3d center{rng.uniform(0.0, 20.0),
                                         rng.uniform(0.0, 20.0), 0.0};
            for (int i = 0; i < 12; ++i)
                cloud.push_point(center + Eigen::Vector3d{
                                              rng.uniform(-0.2, 0.2),
                                              rng.uniform(-0.2, 0.2),
                                              rng.uniform(-0.2, 0.2)},
                                 0.0f, one);
            blob_labels.push_back(label);
        }
    }
    cloud.labels.reserve(cloud.size());
    for (SemanticLabel l : blob_labels)
        for (int i = 0; i < 12; ++i) cloud.labels.push_back(l);

    const NdtMap map = eandt::build_grid_ndt(cloud, 1.0, 77);
    CHECK(map.method() == MapMethod::grid_ndt);
    CHECK(map.cell_size() == 1.0);
    CHECK(map.seed() == 77);
    CHECK(map.size() >= 6);  // at least one cell per label
    // Labels appear in canonical order.
    std::vector<SemanticLabel> seen;
    for (const auto& cell : map.cells())
        if (seen.empty() || seen.back() != cell.label)
            seen.push_back(cell.label);
    auto pos = [](SemanticLabel l) {
        return std::find(eandt::kUsedLabels.begin(), eandt::kUsedLabels.end(),
                         l) -
               eandt::kUsedLabels.begin();
    };
    for (std::size_t i = 1; i < seen.size(); ++i) {
        const long prev = pos(seen[i - 1]);
        const long cur = pos(seen[i]);
        CHECK(prev < cur);
    }

    LabeledCloud unlabeled = cloud_of({{0.0, 0.0, 0.0}}, SemanticLabel::ground);
    unlabeled.labels.clear();
    CHECK_THROWS_AS(eandt::build_grid_ndt(unlabeled, 1.0, 0),
                    std::invalid_argument);
}

TEST_CASE("octree radius query matches brute force") {
    Rng rng(67);
    const auto pts = random_points(rng, 800, 10.0);
    const eandt::CentroidOctree tree(pts, 0.25);
    CHECK(tree.size() == pts.size());

    for (int q = 0; q < 60; ++q) {
        const Eigen::Vector3d query{rng.uniform(-11.0, 11.0),
                                    rng.uniform(-11.0, 11.0),
                                    rng.uniform(-11.0, 11.0)};
        const double r = rng.uniform(0.1, 6.0);
        std::vector<int> expect;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if ((pts[i] - query).squaredNorm() <= r * r)
                expect.push_back(static_cast<int>(i));
        CHECK(tree.radius(query, r) == expect);
    }

    // Exact boundary distances are included.
    const std::vector<Eigen::Vector3d> line = {
        {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    const eandt::CentroidOctree small(line, 0.1);
    CHECK(small.radius({0, 0, 0}, 2.0) == std::vector<int>{0, 1, 2});
    CHECK(small.radius({0, 0, 0}, 1.999999) == std::vector<int>{0, 1});
    CHECK(eandt::CentroidOctree({}, 0.1).radius({0, 0, 0}, 5.0).empty());
}

TEST_CASE("ndt map radius query works over cell means") {
    std::vector<NdtCell> cells;
    for (int i = 0; i < 5; ++i) {
        NdtCell cell;
        cell.label = SemanticLabel::ground;
        cell.count = 10;
        cell.sum = Eigen::Vector3d{10.0 * i, 0, 0};  // mean at (i, 0, 0)
        cells.push_back(cell);
    }
    const NdtMap map(cells, MapMethod::ea_ndt, 0.5, 3);
    CHECK(map.radius_query({0, 0, 0}, 2.0) == std::vector<int>{0, 1, 2});
    CHECK(map.radius_query({10, 10, 10}, 1.0).empty());
    CHECK_THROWS_AS(NdtMap(cells, MapMethod::ea_ndt, 0.0, 3),
                    std::invalid_argument);
}

TEST_CASE("map serialization round trips exactly") {
    Rng rng(68);
    std::vector<NdtCell> cells;
    for (int i = 0; i < 10000; ++i) cells.push_back(random_cell(rng));
    const NdtMap map(cells, MapMethod::ea_ndt, 0.73, 123456789);

    const auto bytes = eandt::serialize_map(map);
    CHECK(bytes.size() == 31 + cells.size() * eandt::kCellRecordBytes);

    const NdtMap back = eandt::deserialize_map(bytes);
    CHECK(back.method() == map.method());
    CHECK(back.cell_size() == map.cell_size());
    CHECK(back.seed() == map.seed());
    REQUIRE(back.size() == map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        CHECK(back.cells()[i].label == map.cells()[i].label);
        CHECK(back.cells()[i].count == map.cells()[i].count);
        CHECK(back.cells()[i].sum == map.cells()[i].sum);
        CHECK(back.cells()[i].cov_upper == map.cells()[i].cov_upper);
    }
    CHECK(eandt::serialize_map(back) == bytes);

    // Empty map round trips too.
    const NdtMap empty({}, MapMethod::grid_ndt, 1.0, 0);
    const auto empty_bytes = eandt::serialize_map(empty);
    CHECK(empty_bytes.size() == 31);
    const NdtMap empty_back = eandt::deserialize_map(empty_bytes);
    CHECK(empty_back.size() == 0);
    CHECK(eandt::serialize_map(empty_back) == empty_bytes);
}

TEST_CASE("map deserialization rejects malformed input") {
    Rng rng(69);
    std::vector<NdtCell> cells = {random_cell(rng)};
    const NdtMap map(cells, MapMethod::grid_ndt, 1.0, 5);
    const auto good = eandt::serialize_map(map);

    auto mutate = [&](std::size_t at, std::uint8_t value) {
        auto bad = good;
        bad[at] = value;
        return bad;
    };

    CHECK_THROWS_AS(eandt::deserialize_map(mutate(0, 'X')), DataError);
    CHECK_THROWS_AS(eandt::deserialize_map(mutate(8, 9)), DataError);   // version
    CHECK_THROWS_AS(eandt::deserialize_map(mutate(10, 2)), DataError);  // method
    CHECK_THROWS_AS(eandt::deserialize_map(mutate(31, 7)), DataError);  // label

    // Zero or negative cell size.
    auto zero_size = good;
    std::fill(zero_size.begin() + 11, zero_size.begin() + 19, 0);
    CHECK_THROWS_AS(eandt::deserialize_map(zero_size), DataError);

    // Truncation anywhere in the payload.
    auto short_bytes = good;
    short_bytes.resize(good.size() - 10);
    CHECK_THROWS_AS(eandt::deserialize_map(short_bytes), DataError);
    CHECK_THROWS_AS(
        eandt::deserialize_map(std::vector<std::uint8_t>(good.begin(),
                                                         good.begin() + 20)),
        DataError);

    // Trailing garbage.
    auto long_bytes = good;
    long_bytes.push_back(0);
    CHECK_THROWS_AS(eandt::deserialize_map(long_bytes), DataError);
}

TEST_CASE("save and load maps through files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "eandt_ndt_tests";
    fs::create_directories(dir);
    const std::string path = (dir / "roundtrip.bin").string();

    Rng rng(70);
    std::vector<NdtCell> cells;
    for (int i = 0; i < 64; ++i) cells.push_back(random_cell(rng));
    const NdtMap map(cells, MapMethod::ea_ndt, 1.25, 42);
    eandt::save_map(map, path);
    const NdtMap back = eandt::load_map(path);
    CHECK(eandt::serialize_map(back) == eandt::serialize_map(map));

    CHECK_THROWS_AS(eandt::load_map((dir / "missing.bin").string()),
                    DataError);
    fs::remove_all(dir);
}
