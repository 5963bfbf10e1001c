#include "floorloc/two_stage.hpp"

#include "floorloc/compact.hpp"
#include "floorloc/detail/dist.hpp"
#include "floorloc/errors.hpp"

namespace floorloc {

TwoStageModel two_stage_build(const FingerprintDatabase& db, double rho,
                              const TwoStageConfig& cfg) {
    if (!(rho > 0.0) || rho > 1.0)
        throw ConfigError("cluster ratio must lie in (0, 1], got " + std::to_string(rho));
    db.finalize();

    TwoStageModel model;
    model.building_id = db.building_id;
    model.rho = rho;
    model.not_heard_dbm = db.not_heard_dbm;
    model.aps = db.aps;
    model.points = densify_all(db);
    model.record_floors.reserve(db.records.size());
    for (const auto& rec : db.records) model.record_floors.push_back(rec.floor);

    KmeansConfig kc;
    kc.k = head_count(rho, db.records.size());
    kc.max_iters = cfg.max_iters;
    kc.rel_tol = cfg.rel_tol;
    kc.n_restarts = cfg.n_restarts;
    kc.init = cfg.init;
    kc.seed = cfg.seed;

    KmeansResult res = kmeans(model.points, kc);
    model.heads = std::move(res.centroids);
    model.iters_run = res.iters_run;
    model.objective = res.objective;
    model.saturated = res.saturated;

    model.members.assign(model.heads.rows, {});
    for (std::size_t i = 0; i < res.assignment.size(); ++i)
        model.members[res.assignment[i]].push_back(i);
    return model;
}

TwoStageEstimate two_stage_query(const TwoStageModel& model, std::span<const double> dense) {
    if (dense.size() != model.heads.cols)
        throw LengthMismatch("two_stage_query: vector has " + std::to_string(dense.size()) +
                             " entries, model expects " + std::to_string(model.heads.cols));
    if (model.heads.rows == 0) throw NoCoverage("two_stage_query: model has no clusters");

    // S1: nearest cluster head.
    std::size_t best_head = 0;
    double best_hd = detail::sq_dist(dense.data(), model.heads.row(0).data(), dense.size());
    for (std::size_t h = 1; h < model.heads.rows; ++h) {
        const double d = detail::sq_dist(dense.data(), model.heads.row(h).data(), dense.size());
        if (d < best_hd) {
            best_hd = d;
            best_head = h;
        }
    }

    // S2: nearest fingerprint within that head's cluster only.
    const auto& pool = model.members[best_head];
    std::size_t best_rec = pool.front();
    double best_d =
        detail::sq_dist(dense.data(), model.points.row(best_rec).data(), dense.size());
    for (std::size_t j = 1; j < pool.size(); ++j) {
        const double d =
            detail::sq_dist(dense.data(), model.points.row(pool[j]).data(), dense.size());
        if (d < best_d) {
            best_d = d;
            best_rec = pool[j];
        }
    }

    TwoStageEstimate est;
    est.floor = model.record_floors[best_rec];
    est.matched_record = best_rec;
    est.best_head = best_head;
    est.best_distance = best_d;
    est.scanned = model.heads.rows + pool.size();
    return est;
}

TwoStageEstimate two_stage_query(const TwoStageModel& model, const Observation& obs) {
    Densified d = densify(model.aps, model.not_heard_dbm, obs.readings);
    TwoStageEstimate est = two_stage_query(model, d.values);
    est.dropped_aps = d.dropped;
    return est;
}

}  // namespace floorloc
