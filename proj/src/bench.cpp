#include "floorloc/bench.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "floorloc/compact.hpp"
#include "floorloc/errors.hpp"
#include "floorloc/nn.hpp"
#include "floorloc/two_stage.hpp"
#include "floorloc/wcl.hpp"

namespace floorloc {

Method parse_method(std::string_view name) {
    if (name == "nn") return Method::Nn;
    if (name == "wcl") return Method::Wcl;
    if (name == "twostage") return Method::TwoStage;
    if (name == "proposed") return Method::Proposed;
    throw UnknownMethod("unknown method '" + std::string(name) +
                        "' (expected nn, wcl, twostage, or proposed)");
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::Nn: return "nn";
        case Method::Wcl: return "wcl";
        case Method::TwoStage: return "twostage";
        case Method::Proposed: return "proposed";
    }
    return "?";
}

std::uint64_t payload_params(Method m, std::uint64_t n_ap, std::uint64_t n_fp, std::uint64_t n_c) {
    switch (m) {
        case Method::Nn: return (n_ap + 1) * n_fp;
        case Method::Wcl: return n_ap;
        case Method::TwoStage: return (n_ap + 1) * n_fp + n_ap * n_c;
        case Method::Proposed: return (n_ap + 1) * n_c;
    }
    throw UnknownMethod("unknown method enum value");
}

namespace {

class NnMethod final : public FloorMethod {
public:
    Method id() const override { return Method::Nn; }
    void build(const FingerprintDatabase& train) override { matcher_.emplace(train); }
    int query(const Observation& obs, std::size_t& scanned) const override {
        const NnEstimate est = matcher_->estimate(obs);
        scanned = est.scanned;
        return est.floor;
    }
    std::uint64_t payload_parameters() const override {
        const auto& db = matcher_->db();
        return payload_params(Method::Nn, db.n_aps(), db.n_records(), 0);
    }

private:
    std::optional<NnMatcher> matcher_;
};

class WclMethod final : public FloorMethod {
public:
    WclMethod() = default;
    explicit WclMethod(ApPositionTable table) : table_(std::move(table)) {}
    Method id() const override { return Method::Wcl; }
    void build(const FingerprintDatabase& train) override { table_ = estimate_ap_positions(train); }
    int query(const Observation& obs, std::size_t& scanned) const override {
        const WclEstimate est = wcl_estimate(table_, obs);
        scanned = est.scanned;
        return est.floor;
    }
    std::uint64_t payload_parameters() const override {
        return payload_params(Method::Wcl, table_.aps.size(), 0, 0);
    }

private:
    ApPositionTable table_;
};

class TwoStageMethod final : public FloorMethod {
public:
    TwoStageMethod(double rho, std::uint64_t seed) : rho_(rho), seed_(seed) {}
    Method id() const override { return Method::TwoStage; }
    std::optional<double> rho() const override { return rho_; }
    void build(const FingerprintDatabase& train) override {
        TwoStageConfig cfg;
        cfg.seed = seed_;
        model_ = two_stage_build(train, rho_, cfg);
    }
    int query(const Observation& obs, std::size_t& scanned) const override {
        const TwoStageEstimate est = two_stage_query(model_, obs);
        scanned = est.scanned;
        return est.floor;
    }
    std::uint64_t payload_parameters() const override { return model_.param_count(); }

private:
    double rho_;
    std::uint64_t seed_;
    TwoStageModel model_;
};

class ProposedMethod final : public FloorMethod {
public:
    ProposedMethod(double rho, std::uint64_t seed) : rho_(rho), seed_(seed) {}
    explicit ProposedMethod(CompactModel model) : rho_(model.rho), model_(std::move(model)) {}
    Method id() const override { return Method::Proposed; }
    std::optional<double> rho() const override { return rho_; }
    void build(const FingerprintDatabase& train) override {
        FloorwiseConfig cfg;
        cfg.rho = rho_;
        cfg.base_seed = seed_;
        model_ = floorwise_cluster(train, cfg);
    }
    int query(const Observation& obs, std::size_t& scanned) const override {
        const FloorEstimate est = classify_floor(model_, obs);
        scanned = est.scanned;
        return est.floor;
    }
    std::uint64_t payload_parameters() const override { return model_.param_count(); }

private:
    double rho_;
    std::uint64_t seed_ = 0;
    CompactModel model_;
};

// Shortest-round-trip decimal text for a double.
std::string num(double v) { return nlohmann::json(v).dump(); }

}  // namespace

std::unique_ptr<FloorMethod> wrap_model(CompactModel model) {
    return std::make_unique<ProposedMethod>(std::move(model));
}

std::unique_ptr<FloorMethod> wrap_model(ApPositionTable table) {
    return std::make_unique<WclMethod>(std::move(table));
}

std::unique_ptr<FloorMethod> make_method(Method m, std::optional<double> rho, std::uint64_t seed) {
    const bool needs_rho = m == Method::TwoStage || m == Method::Proposed;
    if (needs_rho && !rho.has_value())
        throw ConfigError(std::string(method_name(m)) + " requires a clustering ratio");
    if (!needs_rho && rho.has_value())
        throw ConfigError(std::string(method_name(m)) + " takes no clustering ratio");
    switch (m) {
        case Method::Nn: return std::make_unique<NnMethod>();
        case Method::Wcl: return std::make_unique<WclMethod>();
        case Method::TwoStage: return std::make_unique<TwoStageMethod>(*rho, seed);
        case Method::Proposed: return std::make_unique<ProposedMethod>(*rho, seed);
    }
    throw UnknownMethod("unknown method enum value");
}

EvalReport evaluate_prebuilt(FloorMethod& method, std::span<const Observation> test) {
    if (test.empty()) throw EmptyTestSet("no test observations");

    EvalReport rep;
    rep.method = method.id();
    rep.rho = method.rho();
    rep.n_queries = test.size();
    rep.payload_bytes = kBytesPerParam * method.payload_parameters();

    std::size_t correct = 0;
    std::uint64_t scanned_total = 0;
    std::vector<double> latencies;
    latencies.reserve(test.size());

    using clock = std::chrono::steady_clock;
    for (const auto& obs : test) {
        if (!obs.true_floor.has_value())
            throw ConfigError("test observation lacks a ground-truth floor");
        std::size_t scanned = 0;
        const auto t0 = clock::now();
        int floor = 0;
        try {
            floor = method.query(obs, scanned);
        } catch (const AllApsUnknown&) {
            ++rep.no_coverage;
            continue;
        } catch (const NoCoverage&) {
            ++rep.no_coverage;
            continue;
        }
        const auto t1 = clock::now();
        latencies.push_back(std::chrono::duration<double>(t1 - t0).count());
        scanned_total += scanned;
        if (floor == *obs.true_floor) ++correct;
    }

    const std::size_t answered = rep.n_queries - rep.no_coverage;
    rep.detection_prob = answered ? static_cast<double>(correct) / static_cast<double>(answered) : 0.0;
    rep.mean_scanned = answered ? static_cast<double>(scanned_total) / static_cast<double>(answered) : 0.0;
    if (!latencies.empty()) {
        double sum = 0.0;
        for (const double l : latencies) sum += l;
        rep.mean_latency_s = sum / static_cast<double>(latencies.size());
        std::sort(latencies.begin(), latencies.end());
        const std::size_t n = latencies.size();
        rep.median_latency_s =
            n % 2 == 1 ? latencies[n / 2] : 0.5 * (latencies[n / 2 - 1] + latencies[n / 2]);
    }
    return rep;
}

EvalReport evaluate(FloorMethod& method, const FingerprintDatabase& train,
                    std::span<const Observation> test) {
    if (test.empty()) throw EmptyTestSet("no test observations");
    train.finalize();
    method.build(train);
    return evaluate_prebuilt(method, test);
}

std::vector<EvalReport> compare_all(const FingerprintDatabase& train,
                                    std::span<const Observation> test,
                                    std::span<const double> rhos, std::uint64_t seed) {
    std::vector<EvalReport> reports;
    const auto run = [&](Method m, std::optional<double> rho) {
        auto method = make_method(m, rho, seed);
        reports.push_back(evaluate(*method, train, test));
    };
    run(Method::Nn, std::nullopt);
    run(Method::Wcl, std::nullopt);
    for (const double r : rhos) run(Method::TwoStage, r);
    for (const double r : rhos) run(Method::Proposed, r);
    return reports;
}

std::string reports_to_csv(std::span<const EvalReport> reports,
                           std::span<const std::string> provenance_lines) {
    std::string out;
    for (const auto& line : provenance_lines) {
        out += "# ";
        out += line;
        out.push_back('\n');
    }
    out += "method,rho,detection_prob,mean_latency_s,median_latency_s,payload_bytes,n_queries,no_coverage\n";
    for (const auto& r : reports) {
        out += method_name(r.method);
        out.push_back(',');
        if (r.rho.has_value()) out += num(*r.rho);
        out.push_back(',');
        out += num(r.detection_prob);
        out.push_back(',');
        out += num(r.mean_latency_s);
        out.push_back(',');
        out += num(r.median_latency_s);
        out.push_back(',');
        out += std::to_string(r.payload_bytes);
        out.push_back(',');
        out += std::to_string(r.n_queries);
        out.push_back(',');
        out += std::to_string(r.no_coverage);
        out.push_back('\n');
    }
    return out;
}

std::string reports_to_json(std::span<const EvalReport> reports,
                            const std::string& provenance_json) {
    nlohmann::json j;
    if (provenance_json.empty()) {
        j["provenance"] = nlohmann::json::object();
    } else {
        nlohmann::json p = nlohmann::json::parse(provenance_json, nullptr, false);
        if (p.is_discarded()) throw ConfigError("provenance is not valid JSON");
        j["provenance"] = std::move(p);
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json o;
        o["method"] = std::string(method_name(r.method));
        if (r.rho.has_value())
            o["rho"] = *r.rho;
        else
            o["rho"] = nullptr;
        o["detection_prob"] = r.detection_prob;
        o["mean_latency_s"] = r.mean_latency_s;
        o["median_latency_s"] = r.median_latency_s;
        o["payload_bytes"] = r.payload_bytes;
        o["n_queries"] = r.n_queries;
        o["no_coverage"] = r.no_coverage;
        o["mean_scanned"] = r.mean_scanned;
        arr.push_back(std::move(o));
    }
    j["reports"] = std::move(arr);
    return j.dump(2) + "\n";
}

}  // namespace floorloc
