#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "floorloc/wcl.hpp"

using namespace floorloc;

namespace {

FingerprintDatabase three_ap_db() {
    FingerprintDatabase db;
    db.building_id = "t";
    db.aps = ApRegistry({"a", "b", "c"});
    db.floors = {{0, 0.0}, {1, 3.0}};
    db.records.push_back({{0.0, 0.0, 0.0}, 0, {{0, -60.0}, {2, -100.0}}});
    db.records.push_back({{10.0, 0.0, 0.0}, 0, {{0, -80.0}}});
    db.finalize();
    return db;
}

FingerprintDatabase random_db(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> rss(-95.0, -30.0);
    std::uniform_real_distribution<double> coord(0.0, 50.0);

    FingerprintDatabase db;
    db.building_id = "r";
    std::vector<std::string> ids;
    for (int a = 0; a < 10; ++a) ids.push_back("ap" + std::to_string(a));
    db.aps = ApRegistry(ids);
    db.floors = {{0, 0.0}, {1, 3.0}, {2, 6.0}};
    for (int r = 0; r < 40; ++r) {
        FingerprintRecord rec;
        const int floor = static_cast<int>(gen() % 3);
        rec.floor = floor;
        rec.position = {coord(gen), coord(gen), 3.0 * floor};
        for (int a = 0; a < 10; ++a) {
            if (gen() % 2 == 0) rec.readings.emplace_back(a, rss(gen));
        }
        if (rec.readings.empty()) rec.readings.emplace_back(0, rss(gen));
        db.records.push_back(std::move(rec));
    }
    db.finalize();
    return db;
}

}  // namespace

TEST_CASE("shift weight clamps at the hearability floor") {
    CHECK(rss_weight(-60.0, -100.0) == 40.0);
    CHECK(rss_weight(-100.0, -100.0) == 0.0);
    CHECK(rss_weight(-120.0, -100.0) == 0.0);
}

TEST_CASE("weighted mean") {
    std::vector<double> v = {0.0, 10.0};
    std::vector<double> w = {40.0, 20.0};
    CHECK(weighted_mean(v, w) == 200.0 / 60.0);
    CHECK_THROWS_AS(weighted_mean(v, std::vector<double>{1.0}), LengthMismatch);
    CHECK_THROWS_AS(weighted_mean(v, std::vector<double>{0.0, 0.0}), NoCoverage);

    // Scaling every weight by the same factor changes nothing material.
    std::vector<double> w3 = {120.0, 60.0};
    CHECK(weighted_mean(v, w) == doctest::Approx(weighted_mean(v, w3)).epsilon(1e-12));
}

TEST_CASE("ap positions are weight-averaged over hearing fingerprints") {
    const ApPositionTable table = estimate_ap_positions(three_ap_db());
    CHECK(table.building_id == "t");
    CHECK(table.w0_dbm == -100.0);  // defaulted from the database sentinel
    CHECK(table.floors.size() == 2);
    REQUIRE(table.entries.size() == 3);

    // AP a: weights 40 at x=0 and 20 at x=10.
    REQUIRE(table.entries[0].has_value());
    CHECK(table.entries[0]->position.x == 200.0 / 60.0);
    CHECK(table.entries[0]->position.z == 0.0);
    CHECK(table.entries[0]->support == 2);
    CHECK(!table.entries[0]->zero_weight_fallback);

    // AP b: heard nowhere.
    CHECK(!table.entries[1].has_value());

    // AP c: one reading exactly at the floor weight, so the unweighted
    // fallback keeps the hearing fingerprint's position.
    REQUIRE(table.entries[2].has_value());
    CHECK(table.entries[2]->zero_weight_fallback);
    CHECK(table.entries[2]->position.x == 0.0);
    CHECK(table.entries[2]->support == 1);
    CHECK(table.supported_count() == 2);
}

TEST_CASE("linear-power weighting matches its formula") {
    WclConfig cfg;
    cfg.mode = WclWeighting::LinearPower;
    const ApPositionTable table = estimate_ap_positions(three_ap_db(), cfg);
    const double w1 = std::pow(10.0, -60.0 / 10.0);
    const double w2 = std::pow(10.0, -80.0 / 10.0);
    REQUIRE(table.entries[0].has_value());
    CHECK(table.entries[0]->position.x == (w1 * 0.0 + w2 * 10.0) / (w1 + w2));
    // The -100 dBm reading still carries positive weight in this mode.
    REQUIRE(table.entries[2].has_value());
    CHECK(!table.entries[2]->zero_weight_fallback);
}

TEST_CASE("snapping picks the nearest plane, lower floor on ties") {
    std::vector<FloorSpec> floors = {{0, 0.0}, {1, 3.0}, {2, 6.0}};
    CHECK(snap_to_floor(-5.0, floors) == 0);
    CHECK(snap_to_floor(1.4, floors) == 0);
    CHECK(snap_to_floor(1.5, floors) == 0);  // exact midpoint
    CHECK(snap_to_floor(1.6, floors) == 1);
    CHECK(snap_to_floor(4.5, floors) == 1);  // midpoint again
    CHECK(snap_to_floor(100.0, floors) == 2);
    CHECK_THROWS_AS(snap_to_floor(0.0, std::vector<FloorSpec>{}), ConfigError);

    // Labels need not start at zero.
    std::vector<FloorSpec> base = {{-1, -4.0}, {0, 0.0}};
    CHECK(snap_to_floor(-2.0, base) == -1);  // midpoint, lower label
    CHECK(snap_to_floor(-1.9, base) == 0);
}

TEST_CASE("estimate is the weighted mean of heard ap heights") {
    FingerprintDatabase db;
    db.building_id = "t";
    db.aps = ApRegistry({"lo", "hi"});
    db.floors = {{0, 0.0}, {1, 4.0}};
    db.records.push_back({{0.0, 0.0, 0.0}, 0, {{0, -50.0}}});
    db.records.push_back({{0.0, 0.0, 4.0}, 1, {{1, -50.0}}});
    db.finalize();
    const ApPositionTable table = estimate_ap_positions(db);
    // lo sits at z=0, hi at z=4.

    Observation obs;
    obs.readings = {{"lo", -70.0}, {"hi", -40.0}, {"ghost", -30.0}};
    const WclEstimate est = wcl_estimate(table, obs);
    // Weights 30 and 60: z = (30*0 + 60*4) / 90.
    CHECK(est.z_hat == (30.0 * 0.0 + 60.0 * 4.0) / 90.0);
    CHECK(est.floor == 1);
    CHECK(est.heard_count == 2);
    CHECK(est.scanned == 2);
    CHECK(est.clamped_count == 0);
}

TEST_CASE("estimate failure modes are typed") {
    const ApPositionTable table = estimate_ap_positions(three_ap_db());

    Observation nothing;
    nothing.readings = {{"zz", -40.0}};
    CHECK_THROWS_AS(wcl_estimate(table, nothing), AllApsUnknown);

    // Only the never-heard AP resolves: no table entry to use.
    Observation entryless;
    entryless.readings = {{"b", -40.0}};
    CHECK_THROWS_AS(wcl_estimate(table, entryless), NoCoverage);

    // Resolves and has an entry, but the weight clamps to zero.
    Observation clamped;
    clamped.readings = {{"a", -100.0}};
    CHECK_THROWS_AS(wcl_estimate(table, clamped), NoCoverage);
}

TEST_CASE("clamped readings are counted but skipped") {
    const ApPositionTable table = estimate_ap_positions(three_ap_db());
    Observation obs;
    obs.readings = {{"a", -50.0}, {"c", -110.0}};
    const WclEstimate est = wcl_estimate(table, obs);
    CHECK(est.scanned == 2);
    CHECK(est.heard_count == 1);
    CHECK(est.clamped_count == 1);
    REQUIRE(table.entries[0].has_value());
    CHECK(est.z_hat == table.entries[0]->position.z);
}

TEST_CASE("the estimate stays inside the contributing height range") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const FingerprintDatabase db = random_db(seed);
        const ApPositionTable table = estimate_ap_positions(db);
        std::mt19937_64 gen(seed * 131);
        std::uniform_real_distribution<double> rss(-95.0, -30.0);

        for (int trial = 0; trial < 50; ++trial) {
            Observation obs;
            for (int a = 0; a < 10; ++a) {
                if (gen() % 2 == 0) obs.readings.emplace_back("ap" + std::to_string(a), rss(gen));
            }
            if (obs.readings.empty()) continue;

            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& [id, r] : obs.readings) {
                const int idx = table.aps.index_of(id);
                if (idx < 0 || !table.entries[size_t(idx)].has_value()) continue;
                if (rss_weight(r, table.w0_dbm) <= 0.0) continue;
                lo = std::min(lo, table.entries[size_t(idx)]->position.z);
                hi = std::max(hi, table.entries[size_t(idx)]->position.z);
            }
            if (!(lo <= hi)) continue;  // nothing contributes

            const WclEstimate est = wcl_estimate(table, obs);
            CHECK(est.z_hat >= lo - 1e-12);
            CHECK(est.z_hat <= hi + 1e-12);
        }
    }
}
