#include "eandt/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eandt {

namespace {

// D^2-weighted seeding. Points coinciding with a chosen centroid get zero
// weight; if every weight is zero (all points already chosen/duplicated),
// fall back to the lowest-index unchosen point.
std::vector<Eigen::Vector3d> seed_centroids(
    std::span<const Eigen::Vector3d> points, int k, Rng& rng) {
    const int n = static_cast<int>(points.size());
    std::vector<Eigen::Vector3d> centroids;
    centroids.reserve(k);
    std::vector<char> chosen(n, 0);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    int first = static_cast<int>(rng.uniform_index(n));
    centroids.push_back(points[first]);
    chosen[first] = 1;

    std::vector<double> prefix(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = (points[i] - centroids.back()).squaredNorm();
            if (d < d2[i]) d2[i] = d;
            total += d2[i];
            prefix[i] = total;
        }
        int pick = -1;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            pick = static_cast<int>(
                std::upper_bound(prefix.begin(), prefix.end(), u) -
                prefix.begin());
            if (pick >= n) pick = n - 1;  // u == total under rounding
        } else {
            for (int i = 0; i < n; ++i)
                if (!chosen[i]) { pick = i; break; }
            if (pick < 0) pick = 0;  // every point chosen: duplicate freely
        }
        centroids.push_back(points[pick]);
        chosen[pick] = 1;
    }
    return centroids;
}

KMeansResult lloyd(std::span<const Eigen::Vector3d> points, int k, Rng& rng,
                   const KMeansOptions& opts) {
    const int n = static_cast<int>(points.size());
    KMeansResult res;
    res.centroids = seed_centroids(points, k, rng);
    res.assignments.assign(n, 0);

    std::vector<double> dist2(n, 0.0);
    std::vector<int> members(k, 0);
    double prev_sse = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // Assignment, re-seeding empty clusters until all k are populated.
        for (int round = 0; round <= k; ++round) {
            std::fill(members.begin(), members.end(), 0);
            for (int i = 0; i < n; ++i) {
                int best = 0;
                double best_d = (points[i] - res.centroids[0]).squaredNorm();
                for (int j = 1; j < k; ++j) {
                    const double d =
                        (points[i] - res.centroids[j]).squaredNorm();
                    if (d < best_d) { best_d = d; best = j; }
                }
                res.assignments[i] = best;
                dist2[i] = best_d;
                ++members[best];
            }
            bool any_empty = false;
            std::vector<char> grabbed(n, 0);
            for (int j = 0; j < k; ++j) {
                if (members[j] > 0) continue;
                any_empty = true;
                int far = -1;
                for (int i = 0; i < n; ++i)
                    if (!grabbed[i] && (far < 0 || dist2[i] > dist2[far]))
                        far = i;
                res.centroids[j] = points[far];
                grabbed[far] = 1;
            }
            if (!any_empty) break;
        }
        ++res.iterations;

        double sse = 0.0;
        for (int i = 0; i < n; ++i) sse += dist2[i];
        res.sse = sse;
        if (iter > 0 && prev_sse - sse <= opts.tol * prev_sse) break;
        prev_sse = sse;

        // Update step: centroids become member means.
        std::vector<Eigen::Vector3d> sums(k, Eigen::Vector3d::Zero());
        for (int i = 0; i < n; ++i) sums[res.assignments[i]] += points[i];
        for (int j = 0; j < k; ++j)
            res.centroids[j] = sums[j] / static_cast<double>(members[j]);
    }
    return res;
}

}  // namespace

KMeansResult kmeans_pp(std::span<const Eigen::Vector3d> points, int k, Rng rng,
                       const KMeansOptions& opts) {
    const int n = static_cast<int>(points.size());
    if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
    if (k > n) throw std::invalid_argument("kmeans: k exceeds point count");

    KMeansResult best;
    bool have = false;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        KMeansResult cand = lloyd(points, k, rng, opts);
        if (!have || cand.sse < best.sse) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

}  // namespace eandt
