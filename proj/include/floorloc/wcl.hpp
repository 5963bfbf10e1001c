#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floorloc/core.hpp"

namespace floorloc {

// How a dBm reading becomes a non-negative averaging weight. RSS in dBm
// is negative, so weighting by raw readings would be ill-behaved; both
// modes positivize. The shift mode is the default, the linear-power mode
// is an alternate for sensitivity checks.
enum class WclWeighting {
    ShiftFromFloor,  // w = max(rss - w0, 0)
    LinearPower,     // w = 10^(rss / 10), always positive
};

struct WclConfig {
    WclWeighting mode = WclWeighting::ShiftFromFloor;
    // Hearability floor for the shift mode; defaults to the database's
    // not-heard sentinel when unset.
    std::optional<double> w0_dbm;
};

// Shift weight: rss - w0, clamped at zero. Strictly increasing in rss,
// zero at the hearability floor.
double rss_weight(double rss_dbm, double w0_dbm);

struct ApPositionEntry {
    Vec3 position;
    std::size_t support = 0;          // fingerprints that hear this AP
    bool zero_weight_fallback = false;  // all weights clamped to 0; unweighted mean used
};

// AP coordinates bootstrapped from the fingerprints, plus the floor
// geometry needed to snap an estimate. Entries exist exactly for APs
// heard by at least one fingerprint. Self-contained: online estimation
// needs nothing else.
struct ApPositionTable {
    std::string building_id;
    ApRegistry aps;  // copy of the campaign registry, same index order
    std::vector<FloorSpec> floors;  // ascending label, ascending z
    WclWeighting mode = WclWeighting::ShiftFromFloor;
    double w0_dbm = -100.0;  // resolved value used for the weights
    std::vector<std::optional<ApPositionEntry>> entries;  // size = registry size

    std::size_t supported_count() const;
};

struct WclEstimate {
    double z_hat = 0.0;
    int floor = 0;  // native label
    std::size_t heard_count = 0;   // heard APs with a table entry
    std::size_t clamped_count = 0; // readings whose weight clamped to zero
    std::size_t scanned = 0;       // table lookups spent on this query
};

// Offline phase: per AP, the weighted mean of the positions of the
// fingerprints that hear it. APs heard nowhere are omitted. When every
// supporting reading clamps to weight zero the AP falls back to the
// unweighted mean and is flagged.
ApPositionTable estimate_ap_positions(const FingerprintDatabase& db, const WclConfig& cfg = {});

// Online phase: z = weighted mean of the heard APs' estimated
// z-coordinates, snapped to the nearest floor plane. Throws NoCoverage
// when no heard AP has a table entry or the total weight is zero; throws
// AllApsUnknown when nothing resolves against the registry at all.
WclEstimate wcl_estimate(const ApPositionTable& table, const Observation& obs);

// Label of the floor whose plane is closest to z_hat; ties go to the
// lower floor. floors must be ordered by ascending z_center.
int snap_to_floor(double z_hat, std::span<const FloorSpec> floors);

// Shared weighted-mean kernel: sum(w*v)/sum(w). Throws LengthMismatch on
// length disagreement and NoCoverage when the weight sum is zero.
double weighted_mean(std::span<const double> values, std::span<const double> weights);

}  // namespace floorloc
