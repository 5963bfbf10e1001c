#pragma once

#include <cstddef>

#include "floorloc/core.hpp"

namespace floorloc {

struct NnEstimate {
    Vec3 position;
    int floor = 0;               // native label of the winning record
    std::size_t best_index = 0;  // record index in the database
    double best_distance = 0.0;
    std::size_t scanned = 0;  // distance evaluations spent on this query (= N_fp)
    int dropped_aps = 0;      // observation readings that missed the registry
};

// Full-database 1-NN scan. The matcher densifies the whole campaign once
// at construction; queries are pure and safe to run concurrently.
class NnMatcher {
public:
    explicit NnMatcher(const FingerprintDatabase& db);

    // Ties break to the lowest record index. Throws AllApsUnknown when no
    // observation reading resolves.
    NnEstimate estimate(const Observation& obs) const;

    const FingerprintDatabase& db() const { return *db_; }
    const DenseMatrix& dense() const { return dense_; }

private:
    const FingerprintDatabase* db_;
    DenseMatrix dense_;
};

// One-shot convenience wrapper; builds a matcher per call.
inline NnEstimate nn_estimate(const FingerprintDatabase& db, const Observation& obs) {
    return NnMatcher(db).estimate(obs);
}

}  // namespace floorloc
