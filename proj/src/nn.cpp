#include "floorloc/nn.hpp"

#include <limits>

#include "floorloc/detail/dist.hpp"

namespace floorloc {

NnMatcher::NnMatcher(const FingerprintDatabase& db) : db_(&db), dense_(densify_all(db)) {
    if (db.records.empty()) throw Error("nn: database has no records");
}

NnEstimate NnMatcher::estimate(const Observation& obs) const {
    const Densified q = densify(*db_, obs.readings);
    const std::size_t n = dense_.rows;
    const std::size_t dim = dense_.cols;

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = detail::sq_dist(q.values.data(), dense_.row(i).data(), dim);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }

    const FingerprintRecord& rec = db_->records[best_i];
    NnEstimate out;
    out.position = rec.position;
    out.floor = rec.floor;
    out.best_index = best_i;
    out.best_distance = best;
    out.scanned = n;
    out.dropped_aps = q.dropped;
    return out;
}

}  // namespace floorloc
