#include "floorloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "floorloc/detail/dist.hpp"

namespace floorloc {

ApRegistry::ApRegistry(std::vector<std::string> ids) : ids_(std::move(ids)) {
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty()) throw Error("AP registry: empty id at index " + std::to_string(i));
        auto [it, inserted] = index_.emplace(ids_[i], static_cast<int>(i));
        if (!inserted) throw Error("AP registry: duplicate id '" + ids_[i] + "'");
    }
}

int ApRegistry::index_of(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

const FloorSpec* FingerprintDatabase::floor_spec(int label) const {
    for (const auto& f : floors) {
        if (f.label == label) return &f;
    }
    return nullptr;
}

double FingerprintDatabase::floor_spacing() const {
    if (floors.size() < 2) return std::numeric_limits<double>::infinity();
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < floors.size(); ++i) {
        spacing = std::min(spacing, floors[i].z_center - floors[i - 1].z_center);
    }
    return spacing;
}

void FingerprintDatabase::finalize() const {
    if (aps.empty()) throw Error("database has no APs");
    if (floors.empty()) throw Error("database has no floors");
    if (records.empty()) throw Error("database has no records");
    if (!(bounds.min_dbm < bounds.max_dbm)) throw Error("rss bounds are inverted");
    if (!std::isfinite(not_heard_dbm)) throw Error("not-heard sentinel is not finite");

    std::unordered_set<int> labels;
    for (std::size_t i = 0; i < floors.size(); ++i) {
        if (!labels.insert(floors[i].label).second) {
            throw Error("duplicate floor label " + std::to_string(floors[i].label));
        }
        if (i > 0) {
            if (floors[i].label <= floors[i - 1].label) {
                throw Error("floor labels not ascending");
            }
            if (!(floors[i].z_center > floors[i - 1].z_center)) {
                throw Error("floor z_center not strictly increasing");
            }
        }
    }

    const double half_slab = floor_spacing() / 2.0;
    const int n_ap = static_cast<int>(aps.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where = "record " + std::to_string(r);
        if (rec.readings.empty()) throw Error(where + ": no readings");
        int prev = -1;
        for (const auto& [idx, rss] : rec.readings) {
            if (idx < 0 || idx >= n_ap) throw Error(where + ": AP index out of range");
            if (idx <= prev) throw Error(where + ": AP indices not strictly ascending");
            prev = idx;
            if (!std::isfinite(rss) || rss < bounds.min_dbm || rss > bounds.max_dbm) {
                throw Error(where + ": RSS outside [" + std::to_string(bounds.min_dbm) + ", " +
                            std::to_string(bounds.max_dbm) + "] dBm");
            }
        }
        const FloorSpec* spec = floor_spec(rec.floor);
        if (spec == nullptr) throw Error(where + ": unknown floor label " + std::to_string(rec.floor));
        if (std::abs(rec.position.z - spec->z_center) >= half_slab + 1e-9) {
            throw Error(where + ": z inconsistent with floor " + std::to_string(rec.floor));
        }
    }
}

Densified densify(const ApRegistry& aps, double not_heard_dbm, const SparseReadings& readings) {
    Densified out;
    out.values.assign(aps.size(), not_heard_dbm);
    std::size_t resolved = 0;
    for (const auto& [id, rss] : readings) {
        const int idx = aps.index_of(id);
        if (idx < 0) {
            ++out.dropped;
            continue;
        }
        out.values[static_cast<std::size_t>(idx)] = rss;
        ++resolved;
    }
    if (resolved == 0) throw AllApsUnknown("no reading matches the AP registry");
    return out;
}

std::vector<double> densify_record(const FingerprintDatabase& db, const FingerprintRecord& rec) {
    std::vector<double> out(db.n_aps(), db.not_heard_dbm);
    for (const auto& [idx, rss] : rec.readings) {
        out[static_cast<std::size_t>(idx)] = rss;
    }
    return out;
}

double sq_euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    return detail::sq_dist(a.data(), b.data(), a.size());
}

DenseMatrix densify_all(const FingerprintDatabase& db) {
    DenseMatrix m = DenseMatrix::zeros(db.n_records(), db.n_aps());
    for (std::size_t r = 0; r < db.n_records(); ++r) {
        auto row = m.row(r);
        std::fill(row.begin(), row.end(), db.not_heard_dbm);
        for (const auto& [idx, rss] : db.records[r].readings) {
            row[static_cast<std::size_t>(idx)] = rss;
        }
    }
    return m;
}

std::vector<std::pair<int, std::vector<std::size_t>>> records_by_floor(
    const FingerprintDatabase& db) {
    std::vector<std::pair<int, std::vector<std::size_t>>> groups;
    for (const auto& f : db.floors) {
        groups.emplace_back(f.label, std::vector<std::size_t>{});
    }
    for (std::size_t r = 0; r < db.records.size(); ++r) {
        const int label = db.records[r].floor;
        for (auto& [floor_label, indices] : groups) {
            if (floor_label == label) {
                indices.push_back(r);
                break;
            }
        }
    }
    return groups;
}

}  // namespace floorloc
