#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "floorloc/nn.hpp"

using namespace floorloc;

namespace {

// Integer RSS keeps every squared distance exactly representable, so the
// production kernel and this plain loop must agree bitwise.
FingerprintDatabase integer_db(std::size_t n_records, std::size_t n_aps, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> rss(-95, -30);
    std::uniform_int_distribution<int> coord(0, 80);

    FingerprintDatabase db;
    db.building_id = "t";
    std::vector<std::string> ids;
    for (std::size_t a = 0; a < n_aps; ++a) ids.push_back("ap" + std::to_string(a));
    db.aps = ApRegistry(ids);
    db.floors = {{0, 0.0}, {1, 3.0}, {2, 6.0}};
    for (std::size_t r = 0; r < n_records; ++r) {
        FingerprintRecord rec;
        const int floor = static_cast<int>(gen() % 3);
        rec.floor = floor;
        rec.position = {double(coord(gen)), double(coord(gen)), 3.0 * floor};
        for (std::size_t a = 0; a < n_aps; ++a) {
            if (gen() % 3 == 0) continue;  // unheard
            rec.readings.emplace_back(int(a), double(rss(gen)));
        }
        if (rec.readings.empty()) rec.readings.emplace_back(0, double(rss(gen)));
        db.records.push_back(std::move(rec));
    }
    db.finalize();
    return db;
}

struct NaiveBest {
    std::size_t index = 0;
    double distance = 0.0;
};

NaiveBest naive_nn(const FingerprintDatabase& db, const Observation& obs) {
    const Densified q = densify(db, obs.readings);
    NaiveBest best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < db.n_records(); ++r) {
        const std::vector<double> v = densify_record(db, db.records[r]);
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double diff = q.values[i] - v[i];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best.index = r;
            best.distance = d;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("matcher agrees with a naive rescan on every query") {
    const FingerprintDatabase db = integer_db(200, 20, 5);
    const NnMatcher matcher(db);
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> rss(-95, -30);

    for (int q = 0; q < 300; ++q) {
        Observation obs;
        for (std::size_t a = 0; a < 20; ++a) {
            if (gen() % 2 == 0) obs.readings.emplace_back("ap" + std::to_string(a), double(rss(gen)));
        }
        obs.readings.emplace_back("ghost", -40.0);  // never in the registry
        if (obs.readings.size() == 1) obs.readings.emplace_back("ap0", double(rss(gen)));

        const NnEstimate got = matcher.estimate(obs);
        const NaiveBest want = naive_nn(db, obs);
        CHECK(got.best_index == want.index);
        CHECK(got.best_distance == want.distance);
        CHECK(got.floor == db.records[want.index].floor);
        CHECK(got.position.x == db.records[want.index].position.x);
        CHECK(got.scanned == db.n_records());
        CHECK(got.dropped_aps == 1);
    }
}

TEST_CASE("exact ties break to the lowest record index") {
    FingerprintDatabase db;
    db.building_id = "t";
    db.aps = ApRegistry({"a", "b"});
    db.floors = {{0, 0.0}, {1, 3.0}};
    // Records 1 and 2 are identical vectors on different floors.
    db.records.push_back({{0.0, 0.0, 0.0}, 0, {{0, -80.0}, {1, -30.0}}});
    db.records.push_back({{1.0, 0.0, 3.0}, 1, {{0, -50.0}, {1, -60.0}}});
    db.records.push_back({{2.0, 0.0, 0.0}, 0, {{0, -50.0}, {1, -60.0}}});
    db.finalize();

    Observation obs;
    obs.readings = {{"a", -50.0}, {"b", -60.0}};
    const NnEstimate est = nn_estimate(db, obs);
    CHECK(est.best_index == 1);
    CHECK(est.floor == 1);
    CHECK(est.best_distance == 0.0);
}

TEST_CASE("a query that resolves nothing throws") {
    const FingerprintDatabase db = integer_db(5, 4, 7);
    Observation obs;
    obs.readings = {{"nope", -40.0}, {"alsono", -50.0}};
    CHECK_THROWS_AS(nn_estimate(db, obs), AllApsUnknown);
}

TEST_CASE("unheard aps take the sentinel on both sides") {
    FingerprintDatabase db;
    db.building_id = "t";
    db.aps = ApRegistry({"a", "b"});
    db.floors = {{0, 0.0}};
    db.not_heard_dbm = -100.0;
    db.records.push_back({{0.0, 0.0, 0.0}, 0, {{0, -40.0}}});
    db.records.push_back({{1.0, 0.0, 0.0}, 0, {{0, -40.0}, {1, -99.0}}});
    db.finalize();

    Observation obs;
    obs.readings = {{"a", -40.0}};
    // Query vector is (-40, -100): record 0 matches exactly, record 1
    // differs only in the b slot by 1 dB.
    const NnEstimate est = nn_estimate(db, obs);
    CHECK(est.best_index == 0);
    CHECK(est.best_distance == 0.0);
}
