#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "floorloc/synth.hpp"

using namespace floorloc;

namespace {

BuildingPlan tiny_plan() {
    BuildingPlan plan;
    plan.building_id = "tiny";
    plan.n_floors = 2;
    plan.floor_spacing_m = 3.0;
    plan.width_m = 20.0;
    plan.depth_m = 15.0;
    plan.n_aps = 10;
    plan.seed = 5;
    return plan;
}

PropagationModel loud_prop() {
    PropagationModel prop;
    prop.tx_power_dbm = -20.0;  // everything is heard everywhere
    return prop;
}

}  // namespace

TEST_CASE("floor plan is a ladder of evenly spaced planes") {
    const auto floors = plan_floors(tiny_plan());
    REQUIRE(floors.size() == 2);
    CHECK(floors[0].label == 0);
    CHECK(floors[0].z_center == 0.0);
    CHECK(floors[1].label == 1);
    CHECK(floors[1].z_center == 3.0);
}

TEST_CASE("ap placement is deterministic and bounded") {
    const BuildingPlan plan = tiny_plan();
    const auto a = place_aps(plan);
    const auto b = place_aps(plan);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].position.x == b[i].position.x);
        CHECK(a[i].position.y == b[i].position.y);
        CHECK(a[i].floor == int(i % 2));
        CHECK(a[i].position.z == 3.0 * (i % 2));
        CHECK(a[i].position.x >= 0.0);
        CHECK(a[i].position.x < 20.0);
        CHECK(a[i].position.y >= 0.0);
        CHECK(a[i].position.y < 15.0);
    }
    CHECK(a[0].id == "ap-0000");
    CHECK(a[9].id == "ap-0009");

    BuildingPlan other = plan;
    other.seed = 6;
    const auto c = place_aps(other);
    bool any_moved = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].position.x != a[i].position.x) any_moved = true;
    }
    CHECK(any_moved);
}

TEST_CASE("mean rss follows log-distance loss with floor penalty") {
    PropagationModel prop;  // tx -30, exponent 3, FAF 15
    CHECK(mean_rss(prop, 1.0, 0) == -30.0);
    CHECK(mean_rss(prop, 0.2, 0) == -30.0);  // clamped at the reference distance
    CHECK(mean_rss(prop, 10.0, 0) == -60.0);
    CHECK(mean_rss(prop, 100.0, 0) == -90.0);
    CHECK(mean_rss(prop, 10.0, 2) == -90.0);
    CHECK(mean_rss(prop, 31.622776601683793, 1) ==
          doctest::Approx(-30.0 - 45.0 - 15.0).epsilon(1e-12));
}

TEST_CASE("survey covers the half-offset grid in row-major order") {
    BuildingPlan plan = tiny_plan();
    plan.width_m = 2.5;
    plan.depth_m = 3.0;
    const FingerprintDatabase db = generate_campaign(plan, loud_prop(), 1.0, 1);

    // 2 x-positions, 3 y-positions, 2 floors, nothing silent.
    REQUIRE(db.records.size() == 12);
    CHECK(db.records[0].position.x == 0.5);
    CHECK(db.records[0].position.y == 0.5);
    CHECK(db.records[1].position.x == 1.5);
    CHECK(db.records[1].position.y == 0.5);
    CHECK(db.records[2].position.x == 0.5);
    CHECK(db.records[2].position.y == 1.5);
    CHECK(db.records[5].position.y == 2.5);
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK(db.records[r].floor == 0);
        CHECK(db.records[r].position.z == 0.0);
        CHECK(db.records[r + 6].floor == 1);
        CHECK(db.records[r + 6].position.z == 3.0);
    }
    CHECK(db.building_id == "tiny");
    CHECK(db.n_aps() == 10);
    CHECK(db.aps.index_of("ap-0003") == 3);
}

TEST_CASE("identical seeds reproduce the campaign bit for bit") {
    const BuildingPlan plan = tiny_plan();
    const PropagationModel prop;
    const FingerprintDatabase a = generate_campaign(plan, prop, 2.0, 9);
    const FingerprintDatabase b = generate_campaign(plan, prop, 2.0, 9);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t r = 0; r < a.records.size(); ++r) {
        CHECK(a.records[r].readings == b.records[r].readings);
    }

    const FingerprintDatabase c = generate_campaign(plan, prop, 2.0, 10);
    REQUIRE(c.records.size() > 0);
    bool any_differs = false;
    for (std::size_t r = 0; r < std::min(a.records.size(), c.records.size()); ++r) {
        if (a.records[r].readings != c.records[r].readings) any_differs = true;
    }
    CHECK(any_differs);
}

TEST_CASE("raising the threshold only removes readings") {
    // One shadowing draw per (point, AP) pair regardless of audibility, so
    // a stricter threshold must keep every surviving value unchanged.
    const BuildingPlan plan = tiny_plan();
    PropagationModel lo;  // threshold -95
    PropagationModel hi = lo;
    hi.hearability_threshold_dbm = -70.0;

    const FingerprintDatabase full = generate_campaign(plan, lo, 2.0, 4);
    const FingerprintDatabase cut = generate_campaign(plan, hi, 2.0, 4);
    CHECK(cut.records.size() <= full.records.size());

    std::map<std::tuple<double, double, int>, const FingerprintRecord*> by_pos;
    for (const auto& rec : full.records)
        by_pos[{rec.position.x, rec.position.y, rec.floor}] = &rec;

    for (const auto& rec : cut.records) {
        const auto it = by_pos.find({rec.position.x, rec.position.y, rec.floor});
        REQUIRE(it != by_pos.end());
        for (const auto& [idx, rss] : rec.readings) {
            CHECK(rss >= -70.0);
            bool found = false;
            for (const auto& [fidx, frss] : it->second->readings) {
                if (fidx == idx) {
                    CHECK(frss == rss);
                    found = true;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("weak transmitters can silence the whole survey") {
    BuildingPlan plan = tiny_plan();
    PropagationModel prop;
    prop.tx_power_dbm = -200.0;
    prop.shadowing_sigma_db = 0.0;
    CHECK_THROWS_AS(generate_campaign(plan, prop, 2.0, 1), EmptyCampaign);
}

TEST_CASE("silent survey points are dropped, audible ones kept") {
    BuildingPlan plan = tiny_plan();
    PropagationModel prop;
    prop.tx_power_dbm = -78.0;  // heard only within a few meters of an AP
    prop.shadowing_sigma_db = 0.0;
    const FingerprintDatabase db = generate_campaign(plan, prop, 2.0, 1);
    CHECK(db.records.size() > 0);
    CHECK(db.records.size() < 140);  // the full 10 x 7 x 2 grid
    for (const auto& rec : db.records) CHECK(!rec.readings.empty());
}

TEST_CASE("tracks split the quota across floors and stay deterministic") {
    const BuildingPlan plan = tiny_plan();
    const PropagationModel prop;
    const auto tracks = generate_tracks(plan, prop, 101, 3);
    REQUIRE(tracks.size() == 101);

    std::map<int, int> per_floor;
    for (const auto& obs : tracks) {
        REQUIRE(obs.true_floor.has_value());
        ++per_floor[*obs.true_floor];
    }
    CHECK(per_floor[0] == 51);
    CHECK(per_floor[1] == 50);

    const auto again = generate_tracks(plan, prop, 101, 3);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        CHECK(tracks[i].readings == again[i].readings);
    }

    // Reading ids resolve against the campaign registry.
    const FingerprintDatabase db = generate_campaign(plan, prop, 2.0, 3);
    for (const auto& [id, rss] : tracks[0].readings) {
        CHECK(db.aps.index_of(id) >= 0);
        CHECK(rss >= prop.hearability_threshold_dbm);
    }
    CHECK(generate_tracks(plan, prop, 0, 3).empty());
}

TEST_CASE("presets carry the published shapes") {
    CHECK(preset_names() == std::vector<std::string>{"univ1", "univ2", "mall", "office"});
    CHECK(find_preset("nope") == nullptr);

    const SynthPreset* u1 = find_preset("univ1");
    REQUIRE(u1 != nullptr);
    CHECK(u1->plan.n_floors == 4);
    CHECK(u1->plan.n_aps == 509);
    CHECK(u1->grid_step_m == 1.4);
    CHECK(u1->n_track_points == 6796);
    // 67 x 60 grid points per floor at step 1.4 within 94 x 84.
    CHECK(std::size_t(u1->plan.width_m / 1.4) == 67);

    const SynthPreset* mall = find_preset("mall");
    REQUIRE(mall != nullptr);
    CHECK(mall->plan.n_floors == 6);
    CHECK(mall->grid_step_m == 7.0);

    const SynthPreset* office = find_preset("office");
    REQUIRE(office != nullptr);
    CHECK(office->plan.n_aps == 1103);
}

TEST_CASE("config keys cover the whole recipe") {
    SynthConfig cfg;
    apply_kv(cfg, {{"building_id", "x"},
                   {"floors", "7"},
                   {"floor_spacing_m", "2.8"},
                   {"width_m", "33"},
                   {"depth_m", "44"},
                   {"aps", "123"},
                   {"tx_power_dbm", "-25"},
                   {"path_loss_exponent", "2.5"},
                   {"floor_attenuation_db", "12"},
                   {"shadowing_sigma_db", "3"},
                   {"hearability_threshold_dbm", "-90"},
                   {"grid_step_m", "2"},
                   {"track_points", "555"}});
    CHECK(cfg.plan.building_id == "x");
    CHECK(cfg.plan.n_floors == 7);
    CHECK(cfg.plan.floor_spacing_m == 2.8);
    CHECK(cfg.plan.width_m == 33.0);
    CHECK(cfg.plan.n_aps == 123);
    CHECK(cfg.prop.tx_power_dbm == -25.0);
    CHECK(cfg.prop.path_loss_exponent == 2.5);
    CHECK(cfg.prop.floor_attenuation_db == 12.0);
    CHECK(cfg.prop.shadowing_sigma_db == 3.0);
    CHECK(cfg.prop.hearability_threshold_dbm == -90.0);
    CHECK(cfg.grid_step_m == 2.0);
    CHECK(cfg.n_track_points == 555);

    CHECK_THROWS_AS(apply_kv(cfg, {{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(cfg, {{"width_m", "abc"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(cfg, {{"floors", "-3"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(cfg, {{"floors", "3.5"}}), ConfigError);
}

TEST_CASE("bad plans and grids are rejected up front") {
    BuildingPlan plan = tiny_plan();
    plan.n_floors = 0;
    CHECK_THROWS_AS(generate_campaign(plan, {}, 1.0, 1), ConfigError);
    plan = tiny_plan();
    plan.n_aps = 0;
    CHECK_THROWS_AS(place_aps(plan), ConfigError);
    plan = tiny_plan();
    CHECK_THROWS_AS(generate_campaign(plan, {}, 0.0, 1), ConfigError);
    PropagationModel prop;
    prop.shadowing_sigma_db = -1.0;
    CHECK_THROWS_AS(generate_campaign(plan, prop, 1.0, 1), ConfigError);
}

TEST_CASE("the recipe description is self-contained json") {
    SynthConfig cfg;
    cfg.plan.building_id = "demo";
    cfg.plan.seed = 4;
    const std::string text = describe_config(cfg, 99);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["seed"] == 99);
    CHECK(j["plan"]["building_id"] == "demo");
    CHECK(j["plan"]["placement_seed"] == 4);
    CHECK(j["propagation"]["path_loss_exponent"] == 3.0);
    CHECK(describe_config(cfg, 99) == text);
}
