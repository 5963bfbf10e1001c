#include "floorloc/compact.hpp"

#include <cmath>
#include <cstring>

#include "floorloc/detail/dist.hpp"
#include "floorloc/errors.hpp"

namespace floorloc {

std::size_t head_count(double rho, std::size_t n) {
    if (!(rho > 0.0) || rho > 1.0)
        throw ConfigError("head ratio must lie in (0, 1], got " + std::to_string(rho));
    if (n == 0) return 0;
    const double raw = rho * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

CompactModel floorwise_cluster(const FingerprintDatabase& db, const FloorwiseConfig& cfg) {
    if (!(cfg.rho > 0.0) || cfg.rho > 1.0)
        throw ConfigError("head ratio must lie in (0, 1], got " + std::to_string(cfg.rho));
    db.finalize();

    const std::size_t n_ap = db.aps.size();
    const DenseMatrix all = densify_all(db);
    const auto by_floor = records_by_floor(db);

    CompactModel model;
    model.building_id = db.building_id;
    model.rho = cfg.rho;
    model.not_heard_dbm = db.not_heard_dbm;
    model.aps = db.aps;

    // First pass sizes the head matrix so rows can be copied in directly.
    std::size_t total_heads = 0;
    for (const auto& [label, idxs] : by_floor) {
        (void)label;
        total_heads += head_count(cfg.rho, idxs.size());
    }
    // Saturated floors may yield fewer heads than head_count; build into a
    // staging buffer and shrink at the end.
    std::vector<double> head_data;
    head_data.reserve(total_heads * n_ap);

    for (const auto& [label, idxs] : by_floor) {
        if (idxs.empty()) continue;
        DenseMatrix pts = DenseMatrix::zeros(idxs.size(), n_ap);
        for (std::size_t r = 0; r < idxs.size(); ++r) {
            const auto src = all.row(idxs[r]);
            std::memcpy(pts.row(r).data(), src.data(), n_ap * sizeof(double));
        }

        KmeansConfig kc;
        kc.k = head_count(cfg.rho, idxs.size());
        kc.max_iters = cfg.max_iters;
        kc.rel_tol = cfg.rel_tol;
        kc.n_restarts = cfg.n_restarts;
        kc.init = cfg.init;
        kc.seed = cfg.base_seed + static_cast<std::uint64_t>(static_cast<std::int64_t>(label));

        KmeansResult res = kmeans(pts, kc);

        FloorBuildReport rep;
        rep.floor = label;
        rep.n_points = idxs.size();
        rep.k = res.centroids.rows;
        rep.iters_run = res.iters_run;
        rep.objective = res.objective;
        rep.saturated = res.saturated;
        model.build.push_back(rep);

        head_data.insert(head_data.end(), res.centroids.data.begin(), res.centroids.data.end());
        model.head_floors.insert(model.head_floors.end(), res.centroids.rows, label);
    }

    model.heads.rows = model.head_floors.size();
    model.heads.cols = n_ap;
    model.heads.data = std::move(head_data);
    return model;
}

FloorEstimate classify_floor(const CompactModel& model, std::span<const double> dense) {
    if (dense.size() != model.heads.cols)
        throw LengthMismatch("classify_floor: vector has " + std::to_string(dense.size()) +
                             " entries, model expects " + std::to_string(model.heads.cols));
    if (model.heads.rows == 0) throw NoCoverage("classify_floor: model has no heads");

    std::size_t best = 0;
    double best_d = detail::sq_dist(dense.data(), model.heads.row(0).data(), dense.size());
    for (std::size_t h = 1; h < model.heads.rows; ++h) {
        const double d = detail::sq_dist(dense.data(), model.heads.row(h).data(), dense.size());
        if (d < best_d) {
            best_d = d;
            best = h;
        }
    }

    FloorEstimate est;
    est.floor = model.head_floors[best];
    est.best_head = best;
    est.best_distance = best_d;
    est.scanned = model.heads.rows;
    return est;
}

FloorEstimate classify_floor(const CompactModel& model, const Observation& obs) {
    Densified d = densify(model.aps, model.not_heard_dbm, obs.readings);
    FloorEstimate est = classify_floor(model, d.values);
    est.dropped_aps = d.dropped;
    return est;
}

}  // namespace floorloc
