#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "eandt/rng.hpp"

namespace eandt {

struct KMeansResult {
    std::vector<int> assignments;            // per point, cluster index in [0,k)
    std::vector<Eigen::Vector3d> centroids;  // k entries, all non-empty
    double sse = 0.0;
    int iterations = 0;
};

struct KMeansOptions {
    int max_iter = 100;
    double tol = 1e-4;  // stop when relative SSE improvement drops below
    int restarts = 1;   // best-of-n by SSE (ties: earlier restart)
};

// K-means++ seeding (first centroid uniform, later ones proportional to the
// squared distance to the nearest chosen centroid) followed by Lloyd
// iterations. Deterministic given the rng state. Empty clusters are re-seeded
// to the point farthest from its assigned centroid. Requires 1 <= k <= n.
KMeansResult kmeans_pp(std::span<const Eigen::Vector3d> points, int k, Rng rng,
                       const KMeansOptions& opts = {});

}  // namespace eandt
