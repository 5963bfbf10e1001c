#pragma once

#include <cstdint>
#include <vector>

#include "floorloc/core.hpp"

namespace floorloc {

enum class KmeansInit {
    KmeansPlusPlus,  // D^2-weighted seeding
    RandomPoints,    // k distinct row indices, uniform
};

struct KmeansConfig {
    std::size_t k = 1;
    std::size_t max_iters = 100;
    double rel_tol = 1e-6;  // stop when the relative objective decrease falls below this
    std::uint64_t seed = 0;
    KmeansInit init = KmeansInit::KmeansPlusPlus;
    std::size_t n_restarts = 1;  // best objective wins
};

struct KmeansResult {
    DenseMatrix centroids;  // k_actual x dim
    std::vector<std::size_t> assignment;
    double objective = 0.0;  // within-cluster sum of squares for (assignment, centroids)
    std::size_t iters_run = 0;
    bool saturated = false;  // k reached the distinct-point count; centroids are the points
    // Assignment-step objective logged once per Lloyd iteration of the
    // winning restart. Non-increasing by construction.
    std::vector<double> objective_trace;
};

// Within-cluster sum of squares of a (points, assignment, centroids)
// triple, accumulated in point-index order. All reported objectives in
// this module come from this one routine.
double wcss(const DenseMatrix& points, const std::vector<std::size_t>& assignment,
            const DenseMatrix& centroids);

// Lloyd iterations from explicit starting centroids. Ties in the
// assignment step go to the lower centroid index; empty clusters are
// repaired by moving the point farthest from its own centroid.
KmeansResult lloyd_from(const DenseMatrix& points, const DenseMatrix& init_centroids,
                        const KmeansConfig& cfg);

// Full K-means: seeded init (kmeans++ by default), optional restarts,
// deterministic for a fixed seed. Throws KTooLarge when cfg.k exceeds the
// point count. When cfg.k is not below the number of distinct point
// vectors the result saturates: centroids are the distinct vectors in
// first-occurrence order, the objective is exactly zero, and the result
// is flagged so callers can report the reduced head count.
KmeansResult kmeans(const DenseMatrix& points, const KmeansConfig& cfg);

// Number of distinct row vectors (exact bitwise comparison).
std::size_t distinct_rows(const DenseMatrix& points);

}  // namespace floorloc
