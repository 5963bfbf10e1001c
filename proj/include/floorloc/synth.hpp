#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "floorloc/core.hpp"

namespace floorloc {

// Geometry of a synthetic building: stacked rectangular floors with APs
// scattered uniformly at random, round-robin across floors.
struct BuildingPlan {
    std::string building_id = "synth";
    std::size_t n_floors = 4;
    double floor_spacing_m = 3.5;
    double width_m = 100.0;
    double depth_m = 90.0;
    std::size_t n_aps = 500;
    std::uint64_t seed = 1;  // governs AP placement only
};

// Log-distance path loss with per-floor attenuation and i.i.d. Gaussian
// shadowing. mean RSS = tx - 10*n*log10(max(d,1)) - FAF*floors_crossed.
struct PropagationModel {
    double tx_power_dbm = -30.0;  // at the 1 m reference distance
    double path_loss_exponent = 3.0;
    double floor_attenuation_db = 15.0;
    double shadowing_sigma_db = 4.0;
    double hearability_threshold_dbm = -95.0;
};

struct PlacedAp {
    std::string id;
    Vec3 position;
    int floor = 0;
};

// Floor specs for a plan: labels 0..n-1, z = label * spacing.
std::vector<FloorSpec> plan_floors(const BuildingPlan& plan);

// Deterministic AP layout from plan.seed. AP i sits on floor i mod
// n_floors at a uniform (x, y), z at the floor plane.
std::vector<PlacedAp> place_aps(const BuildingPlan& plan);

// Shadowing-free RSS at a given 3-D distance and floor-crossing count.
double mean_rss(const PropagationModel& prop, double distance_m, int floors_crossed);

// Survey the building on a per-floor grid at the given step: points at
// step*(i+0.5) along each axis while inside the footprint. Readings below
// the hearability threshold are unheard; grid points hearing nothing are
// dropped. Throws EmptyCampaign when every point is silent. The seed
// drives shadowing and is independent of plan.seed.
FingerprintDatabase generate_campaign(const BuildingPlan& plan, const PropagationModel& prop,
                                      double grid_step_m, std::uint64_t seed);

// Random-waypoint walks at walking-step spacing, n_points split evenly
// across floors, each observation drawn with fresh shadowing and tagged
// with its true floor.
std::vector<Observation> generate_tracks(const BuildingPlan& plan, const PropagationModel& prop,
                                         std::size_t n_points, std::uint64_t seed);

// A named experiment shape: plan, propagation, survey grid, track length.
struct SynthPreset {
    std::string name;
    BuildingPlan plan;
    PropagationModel prop;
    double grid_step_m = 1.5;
    std::size_t n_track_points = 1000;
};

// Built-in presets univ1, univ2, mall, office. Returns nullptr for an
// unknown name.
const SynthPreset* find_preset(std::string_view name);
std::vector<std::string> preset_names();

// One generation run's full configuration, the unit the CLI reads from a
// key-value config file.
struct SynthConfig {
    BuildingPlan plan;
    PropagationModel prop;
    double grid_step_m = 1.5;
    std::size_t n_track_points = 1000;
};

// Applies `key = value` pairs onto a config. Throws ConfigError on an
// unknown key or an unparsable value.
void apply_kv(SynthConfig& cfg, const std::vector<std::pair<std::string, std::string>>& pairs);

// The resolved configuration as a JSON object string; stored as campaign
// provenance so every generated file names its own recipe.
std::string describe_config(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace floorloc
