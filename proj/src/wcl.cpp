#include "floorloc/wcl.hpp"

#include <algorithm>
#include <cmath>

#include "floorloc/errors.hpp"

namespace floorloc {

double rss_weight(double rss_dbm, double w0_dbm) {
    return std::max(rss_dbm - w0_dbm, 0.0);
}

namespace {

double raw_weight(WclWeighting mode, double rss_dbm, double w0_dbm) {
    switch (mode) {
        case WclWeighting::ShiftFromFloor:
            return rss_weight(rss_dbm, w0_dbm);
        case WclWeighting::LinearPower:
            return std::pow(10.0, rss_dbm / 10.0);
    }
    return 0.0;
}

}  // namespace

std::size_t ApPositionTable::supported_count() const {
    std::size_t n = 0;
    for (const auto& e : entries)
        if (e.has_value()) ++n;
    return n;
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size())
        throw LengthMismatch("weighted_mean: " + std::to_string(values.size()) + " values vs " +
                             std::to_string(weights.size()) + " weights");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i] * values[i];
        den += weights[i];
    }
    if (den <= 0.0) throw NoCoverage("weighted_mean: total weight is zero");
    return num / den;
}

ApPositionTable estimate_ap_positions(const FingerprintDatabase& db, const WclConfig& cfg) {
    const std::size_t n_ap = db.aps.size();
    const double w0 = cfg.w0_dbm.value_or(db.not_heard_dbm);

    ApPositionTable table;
    table.building_id = db.building_id;
    table.aps = db.aps;
    table.floors = db.floors;
    table.mode = cfg.mode;
    table.w0_dbm = w0;
    table.entries.resize(n_ap);

    // Per-AP accumulators over the fingerprints that hear it.
    std::vector<double> wx(n_ap, 0.0), wy(n_ap, 0.0), wz(n_ap, 0.0), wsum(n_ap, 0.0);
    std::vector<double> ux(n_ap, 0.0), uy(n_ap, 0.0), uz(n_ap, 0.0);
    std::vector<std::size_t> support(n_ap, 0);

    for (const auto& rec : db.records) {
        for (const auto& [idx, rss] : rec.readings) {
            const auto i = static_cast<std::size_t>(idx);
            const double w = raw_weight(cfg.mode, rss, w0);
            wx[i] += w * rec.position.x;
            wy[i] += w * rec.position.y;
            wz[i] += w * rec.position.z;
            wsum[i] += w;
            ux[i] += rec.position.x;
            uy[i] += rec.position.y;
            uz[i] += rec.position.z;
            ++support[i];
        }
    }

    for (std::size_t i = 0; i < n_ap; ++i) {
        if (support[i] == 0) continue;
        ApPositionEntry e;
        e.support = support[i];
        if (wsum[i] > 0.0) {
            e.position = {wx[i] / wsum[i], wy[i] / wsum[i], wz[i] / wsum[i]};
        } else {
            const auto n = static_cast<double>(support[i]);
            e.position = {ux[i] / n, uy[i] / n, uz[i] / n};
            e.zero_weight_fallback = true;
        }
        table.entries[i] = e;
    }
    return table;
}

int snap_to_floor(double z_hat, std::span<const FloorSpec> floors) {
    if (floors.empty()) throw ConfigError("snap_to_floor: no floors");
    std::size_t best = 0;
    double best_d = std::abs(z_hat - floors[0].z_center);
    for (std::size_t f = 1; f < floors.size(); ++f) {
        const double d = std::abs(z_hat - floors[f].z_center);
        if (d < best_d) {
            best_d = d;
            best = f;
        }
    }
    return floors[best].label;
}

WclEstimate wcl_estimate(const ApPositionTable& table, const Observation& obs) {
    if (table.entries.size() != table.aps.size())
        throw LengthMismatch("wcl_estimate: table has " + std::to_string(table.entries.size()) +
                             " entry slots for " + std::to_string(table.aps.size()) + " APs");

    WclEstimate est;
    double num = 0.0;
    double den = 0.0;
    std::size_t resolved = 0;

    for (const auto& [id, rss] : obs.readings) {
        const int idx = table.aps.index_of(id);
        if (idx < 0) continue;
        ++resolved;
        const auto& entry = table.entries[static_cast<std::size_t>(idx)];
        if (!entry.has_value()) continue;
        ++est.scanned;
        const double w = raw_weight(table.mode, rss, table.w0_dbm);
        if (w <= 0.0) {
            ++est.clamped_count;
            continue;
        }
        ++est.heard_count;
        num += w * entry->position.z;
        den += w;
    }

    if (resolved == 0) throw AllApsUnknown("wcl_estimate: no reading matches the AP registry");
    if (den <= 0.0)
        throw NoCoverage("wcl_estimate: no heard AP carries positive weight");

    est.z_hat = num / den;
    est.floor = snap_to_floor(est.z_hat, table.floors);
    return est;
}

}  // namespace floorloc
