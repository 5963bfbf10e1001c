#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "floorloc/errors.hpp"

namespace floorloc {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// One floor of a building. label is the building-native floor number;
// z_center is the nominal height of the floor's measurement plane.
struct FloorSpec {
    int label = 0;
    double z_center = 0.0;
};

// Sparse RSS readings keyed by AP id string, as they arrive from a survey
// device or a track file. Later entries for the same id overwrite earlier
// ones when densified.
using SparseReadings = std::vector<std::pair<std::string, double>>;

// Ordered AP registry. The position of an id in the list is its dense
// vector index; ids are unique.
class ApRegistry {
public:
    ApRegistry() = default;
    explicit ApRegistry(std::vector<std::string> ids);

    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const std::string& id(std::size_t index) const { return ids_[index]; }

    // Dense index of an id, or -1 if the id is not registered.
    int index_of(std::string_view id) const;

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::vector<std::string> ids_;
    std::unordered_map<std::string, int, Hash, std::equal_to<>> index_;
};

// One survey point: a 3-D coordinate, its floor, and the APs heard there.
// readings hold (ap index, rss dBm) pairs in ascending index order.
struct FingerprintRecord {
    Vec3 position;
    int floor = 0;  // building-native label
    std::vector<std::pair<int, double>> readings;
};

struct RssBounds {
    double min_dbm = -110.0;
    double max_dbm = 0.0;
};

// A building's survey campaign. Immutable after finalize(); safe for
// concurrent reads from any number of query workers.
struct FingerprintDatabase {
    std::string building_id;
    ApRegistry aps;
    std::vector<FloorSpec> floors;  // ascending label, strictly increasing z
    std::vector<FingerprintRecord> records;
    double not_heard_dbm = -100.0;
    RssBounds bounds;
    std::string provenance;  // opaque JSON text carried through file round-trips

    // Validates every container-level invariant; throws Error on violation.
    void finalize() const;

    std::size_t n_aps() const { return aps.size(); }
    std::size_t n_records() const { return records.size(); }
    std::size_t n_floors() const { return floors.size(); }

    const FloorSpec* floor_spec(int label) const;
    // Minimum gap between adjacent floor planes; +inf for single-floor buildings.
    double floor_spacing() const;
};

// An online RSS measurement from the mobile, with optional ground truth
// for evaluation runs.
struct Observation {
    SparseReadings readings;
    std::optional<int> true_floor;
};

struct Densified {
    std::vector<double> values;  // length = registry size
    int dropped = 0;             // readings whose AP was not in the registry
};

// Expand sparse readings to a full-length vector over a registry: entry i
// is the RSS of AP i if heard, else not_heard_dbm. Unknown ids are
// dropped and counted. Throws AllApsUnknown when nothing resolves.
Densified densify(const ApRegistry& aps, double not_heard_dbm, const SparseReadings& readings);

inline Densified densify(const FingerprintDatabase& db, const SparseReadings& readings) {
    return densify(db.aps, db.not_heard_dbm, readings);
}

// Fast path for records, whose readings are already index-keyed.
std::vector<double> densify_record(const FingerprintDatabase& db, const FingerprintRecord& rec);

// Squared Euclidean distance. Uses a fixed four-lane accumulation order
// so results are reproducible run to run. Throws LengthMismatch.
double sq_euclidean(std::span<const double> a, std::span<const double> b);

// Row-major dense matrix of doubles.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    static DenseMatrix zeros(std::size_t rows, std::size_t cols) {
        return DenseMatrix{rows, cols, std::vector<double>(rows * cols, 0.0)};
    }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data).subspan(i * cols, cols);
    }
    std::span<double> row(std::size_t i) {
        return std::span<double>(data).subspan(i * cols, cols);
    }
    bool operator==(const DenseMatrix&) const = default;
};

// Densify every record of the database into one N_fp x N_ap matrix.
DenseMatrix densify_all(const FingerprintDatabase& db);

// Record indices grouped by floor, ascending floor label.
std::vector<std::pair<int, std::vector<std::size_t>>> records_by_floor(
    const FingerprintDatabase& db);

}  // namespace floorloc
