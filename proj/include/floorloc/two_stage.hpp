#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floorloc/core.hpp"
#include "floorloc/kmeans.hpp"

namespace floorloc {

// Legacy baseline: one k-means over the whole campaign, floors mixed.
// The model keeps every fingerprint, grouped under its cluster head, so
// its payload is the full database plus the heads.
struct TwoStageModel {
    std::string building_id;
    double rho = 0.0;
    double not_heard_dbm = -100.0;
    ApRegistry aps;
    DenseMatrix heads;                              // n_c x n_ap
    std::vector<std::vector<std::size_t>> members;  // record indices per cluster, ascending
    DenseMatrix points;                             // densified fingerprints, record order
    std::vector<int> record_floors;                 // native label per record
    std::size_t iters_run = 0;
    double objective = 0.0;
    bool saturated = false;

    std::size_t cluster_count() const { return heads.rows; }
    // Members carry a floor label each; heads do not (the second-stage
    // lookup supplies the floor).
    std::size_t param_count() const {
        return (aps.size() + 1) * points.rows + aps.size() * heads.rows;
    }
};

struct TwoStageConfig {
    std::uint64_t seed = 1;
    std::size_t max_iters = 100;
    double rel_tol = 1e-6;
    std::size_t n_restarts = 1;
    KmeansInit init = KmeansInit::KmeansPlusPlus;
};

// Global k-means with k = head_count(rho, n_records). Throws ConfigError
// for rho outside (0, 1].
TwoStageModel two_stage_build(const FingerprintDatabase& db, double rho,
                              const TwoStageConfig& cfg = {});

struct TwoStageEstimate {
    int floor = 0;                 // floor of the matched record
    std::size_t matched_record = 0;
    std::size_t best_head = 0;
    double best_distance = 0.0;    // to the matched record, not the head
    std::size_t scanned = 0;       // n_heads + chosen cluster's member count
    std::size_t dropped_aps = 0;
};

// S1: nearest head. S2: nearest member of that head's cluster. S3: that
// member's floor. Ties go to the lowest index at both stages. The nearest
// member of the chosen cluster need not be the global nearest fingerprint;
// that mismatch is the method's documented failure mode.
TwoStageEstimate two_stage_query(const TwoStageModel& model, std::span<const double> dense);
TwoStageEstimate two_stage_query(const TwoStageModel& model, const Observation& obs);

}  // namespace floorloc
