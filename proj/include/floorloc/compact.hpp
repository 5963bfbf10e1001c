#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floorloc/core.hpp"
#include "floorloc/kmeans.hpp"

namespace floorloc {

// Number of cluster heads for a floor holding n fingerprints: ceil(rho*n),
// at least 1 when the floor is non-empty. The tiny slack keeps products
// like 0.1*4020 from rounding up an extra head.
std::size_t head_count(double rho, std::size_t n);

struct FloorwiseConfig {
    double rho = 0.1;          // heads per fingerprint, in (0, 1]
    std::uint64_t base_seed = 1;  // per-floor k-means runs with base_seed + floor label
    std::size_t max_iters = 100;
    double rel_tol = 1e-6;
    std::size_t n_restarts = 1;
    KmeansInit init = KmeansInit::KmeansPlusPlus;
};

// One floor's clustering outcome, kept for reporting and tests.
struct FloorBuildReport {
    int floor = 0;  // native label
    std::size_t n_points = 0;
    std::size_t k = 0;
    std::size_t iters_run = 0;
    double objective = 0.0;
    bool saturated = false;
};

// The deployable classifier: every cluster head annotated with its floor.
// Heads are grouped by ascending floor label; within a floor they keep the
// k-means centroid order. Head vectors stay full precision in memory so a
// rho=1 model reproduces plain nearest-fingerprint decisions exactly.
struct CompactModel {
    std::string building_id;
    double rho = 0.0;
    double not_heard_dbm = -100.0;
    ApRegistry aps;
    DenseMatrix heads;             // n_heads x n_ap
    std::vector<int> head_floors;  // native label per head row
    std::vector<FloorBuildReport> build;  // one entry per non-empty floor, ascending

    std::size_t head_rows() const { return heads.rows; }
    // Stored parameters: one floor label plus one RSS value per AP, per head.
    std::size_t param_count() const { return head_rows() * (aps.size() + 1); }
};

// Builds the model by clustering each floor's fingerprints separately with
// k = head_count(rho, n_floor). Floors with no fingerprints contribute no
// heads. Throws ConfigError for rho outside (0, 1].
CompactModel floorwise_cluster(const FingerprintDatabase& db, const FloorwiseConfig& cfg);

struct FloorEstimate {
    int floor = 0;              // native label of the winning head
    std::size_t best_head = 0;  // row index into heads
    double best_distance = 0.0;
    std::size_t scanned = 0;    // distance evaluations = number of heads
    std::size_t dropped_aps = 0;
};

// Nearest head under squared Euclidean distance; ties go to the lowest
// head row, i.e. the lowest floor first.
FloorEstimate classify_floor(const CompactModel& model, std::span<const double> dense);

// Densifies against the model's own registry and sentinel, then classifies.
// Throws AllApsUnknown when no reading resolves.
FloorEstimate classify_floor(const CompactModel& model, const Observation& obs);

}  // namespace floorloc
