#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floorloc/compact.hpp"
#include "floorloc/core.hpp"
#include "floorloc/wcl.hpp"

namespace floorloc {

enum class Method { Nn, Wcl, TwoStage, Proposed };

// Accepts the CSV/CLI spellings nn, wcl, twostage, proposed; throws
// UnknownMethod otherwise.
Method parse_method(std::string_view name);
std::string_view method_name(Method m);

// Mobile-side parameter counts. NN ships every fingerprint with its floor;
// WCL ships one z per AP; two-stage ships the full database plus the
// heads; the compact model ships heads with floors only.
//   nn:       (n_ap + 1) * n_fp
//   wcl:      n_ap
//   twostage: (n_ap + 1) * n_fp + n_ap * n_c
//   proposed: (n_ap + 1) * n_c
std::uint64_t payload_params(Method m, std::uint64_t n_ap, std::uint64_t n_fp, std::uint64_t n_c);

// Parameters are accounted at 32 bits each.
inline constexpr std::uint64_t kBytesPerParam = 4;

// Parameter volume of a full-survey transfer: so many buildings, so many
// survey points each, so many parameters per point.
constexpr std::uint64_t survey_transfer_params(std::uint64_t n_buildings,
                                               std::uint64_t points_per_building,
                                               std::uint64_t params_per_point) {
    return n_buildings * points_per_building * params_per_point;
}

struct EvalReport {
    Method method = Method::Nn;
    std::optional<double> rho;
    double detection_prob = 0.0;
    double mean_latency_s = 0.0;
    double median_latency_s = 0.0;
    std::uint64_t payload_bytes = 0;
    std::size_t n_queries = 0;
    std::size_t no_coverage = 0;
    // Mean distance evaluations per answered query; reported in the JSON
    // mirror only (the CSV schema is fixed).
    double mean_scanned = 0.0;
};

// A floor estimator under test. build() runs once, untimed; query() is
// the timed online call and reports how many stored vectors it compared
// against.
class FloorMethod {
public:
    virtual ~FloorMethod() = default;
    virtual Method id() const = 0;
    virtual std::optional<double> rho() const { return std::nullopt; }
    virtual void build(const FingerprintDatabase& train) = 0;
    virtual int query(const Observation& obs, std::size_t& scanned) const = 0;
    virtual std::uint64_t payload_parameters() const = 0;
};

// rho is required for twostage and proposed, rejected for nn and wcl.
std::unique_ptr<FloorMethod> make_method(Method m, std::optional<double> rho, std::uint64_t seed);

// Wraps an already-built model so it can be evaluated without its
// training campaign.
std::unique_ptr<FloorMethod> wrap_model(CompactModel model);
std::unique_ptr<FloorMethod> wrap_model(ApPositionTable table);

// Builds once, then answers every test observation, timing only the query
// calls. Queries that raise AllApsUnknown or NoCoverage count as
// no_coverage and stay out of the probability denominator and the latency
// stats. Throws EmptyTestSet; throws ConfigError when an observation has
// no ground-truth floor or the method was not built.
EvalReport evaluate(FloorMethod& method, const FingerprintDatabase& train,
                    std::span<const Observation> test);

// Same query loop for a method whose model is already in place (e.g.
// loaded from a file); build() is not called.
EvalReport evaluate_prebuilt(FloorMethod& method, std::span<const Observation> test);

// NN, WCL, then twostage and proposed at each rho: 2 + 2*|rhos| reports,
// in that order. Build failures propagate immediately.
std::vector<EvalReport> compare_all(const FingerprintDatabase& train,
                                    std::span<const Observation> test,
                                    std::span<const double> rhos, std::uint64_t seed);

// CSV with '#' provenance comment lines, a fixed schema line
// method,rho,detection_prob,mean_latency_s,median_latency_s,payload_bytes,n_queries,no_coverage
// and one row per report. rho is empty for methods without one. Numbers
// print shortest-round-trip, so identical reports give identical text.
std::string reports_to_csv(std::span<const EvalReport> reports,
                           std::span<const std::string> provenance_lines);

// JSON mirror of the CSV plus mean_scanned; provenance_json must be a
// valid JSON object ("" means empty).
std::string reports_to_json(std::span<const EvalReport> reports, const std::string& provenance_json);

}  // namespace floorloc
