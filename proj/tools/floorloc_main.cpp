#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "floorloc/bench.hpp"
#include "floorloc/compact.hpp"
#include "floorloc/errors.hpp"
#include "floorloc/io.hpp"
#include "floorloc/nn.hpp"
#include "floorloc/synth.hpp"
#include "floorloc/two_stage.hpp"
#include "floorloc/wcl.hpp"

namespace fs = std::filesystem;
using namespace floorloc;

namespace {

// Resolved-config lines embedded in every emitted report, CSV comments and
// JSON object alike.
struct Provenance {
    std::vector<std::pair<std::string, std::string>> items;

    void add(std::string key, std::string value) {
        items.emplace_back(std::move(key), std::move(value));
    }
    std::vector<std::string> lines() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : items) out.push_back(k + "=" + v);
        return out;
    }
    std::string json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : items) j[k] = v;
        return j.dump();
    }
};

std::string num(double v) { return nlohmann::json(v).dump(); }

void emit_reports(const std::vector<EvalReport>& reports, const Provenance& prov,
                  const std::string& format, const std::string& out_path) {
    const std::string text = format == "json"
                                 ? reports_to_json(reports, prov.json())
                                 : reports_to_csv(reports, prov.lines());
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

std::vector<double> parse_rhos(const std::string& csv) {
    std::vector<double> rhos;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (tok.empty()) throw ConfigError("empty entry in rho list '" + csv + "'");
        double r = 0.0;
        try {
            std::size_t used = 0;
            r = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad rho '" + tok + "' in list");
        }
        if (!(r > 0.0) || r > 1.0) throw ConfigError("rho must lie in (0, 1], got " + tok);
        rhos.push_back(r);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (rhos.empty()) throw ConfigError("rho list is empty");
    return rhos;
}

std::string rhos_text(const std::vector<double>& rhos) {
    std::string s;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        if (i) s.push_back(',');
        s += num(rhos[i]);
    }
    return s;
}

SynthConfig resolve_synth_config(const std::string& preset, const std::string& config_path) {
    SynthConfig cfg;
    if (!preset.empty()) {
        const SynthPreset* p = find_preset(preset);
        if (p == nullptr) {
            std::string names;
            for (const auto& n : preset_names()) {
                if (!names.empty()) names += ", ";
                names += n;
            }
            throw ConfigError("unknown preset '" + preset + "' (have: " + names + ")");
        }
        cfg.plan = p->plan;
        cfg.prop = p->prop;
        cfg.grid_step_m = p->grid_step_m;
        cfg.n_track_points = p->n_track_points;
    }
    if (!config_path.empty()) apply_kv(cfg, parse_kv(read_text_file(config_path)));
    return cfg;
}

int do_generate(const std::string& preset, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed) {
    SynthConfig cfg = resolve_synth_config(preset, config_path);
    cfg.plan.seed = seed;

    FingerprintDatabase db = generate_campaign(cfg.plan, cfg.prop, cfg.grid_step_m, seed);
    db.provenance = describe_config(cfg, seed);
    const std::vector<Observation> tracks =
        generate_tracks(cfg.plan, cfg.prop, cfg.n_track_points, seed);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const std::string campaign_path = (dir / "campaign.jsonl").string();
    const std::string tracks_path = (dir / "tracks.jsonl").string();
    const std::string campaign_text = serialize_campaign(db);
    const std::string tracks_text = serialize_tracks(db.building_id, tracks);
    write_text_file(campaign_path, campaign_text);
    write_text_file(tracks_path, tracks_text);

    std::cout << "building " << db.building_id << ": floors=" << db.n_floors()
              << " fingerprints=" << db.n_records() << " track_points=" << tracks.size()
              << " aps=" << db.n_aps() << "\n";
    std::cout << "wrote " << campaign_path << " (" << campaign_text.size() << " bytes)\n";
    std::cout << "wrote " << tracks_path << " (" << tracks_text.size() << " bytes)\n";
    return 0;
}

int do_train(const std::string& campaign_path, const std::string& method_name_arg,
             std::optional<double> rho, std::uint64_t seed, const std::string& out_path) {
    const Method method = parse_method(method_name_arg);
    const FingerprintDatabase db = read_campaign(campaign_path);
    std::cout << "campaign " << db.building_id << ": fingerprints=" << db.n_records()
              << " aps=" << db.n_aps() << " floors=" << db.n_floors() << "\n";

    switch (method) {
        case Method::Nn:
            throw ConfigError(
                "nn needs no training: the campaign itself is the model "
                "((n_ap+1)*n_fp parameters)");
        case Method::Proposed: {
            if (!rho.has_value()) throw ConfigError("proposed requires --rho in (0, 1]");
            FloorwiseConfig cfg;
            cfg.rho = *rho;
            cfg.base_seed = seed;
            const CompactModel model = floorwise_cluster(db, cfg);
            for (const auto& rep : model.build) {
                std::cout << "floor " << rep.floor << ": " << rep.n_points << " fingerprints -> "
                          << rep.k << " heads" << (rep.saturated ? " (saturated)" : "") << "\n";
            }
            const std::uint64_t params = model.param_count();
            std::cout << "heads total: " << model.head_rows() << "\n";
            std::cout << "payload: " << params << " parameters, " << params * kBytesPerParam
                      << " bytes\n";
            if (!out_path.empty()) {
                const auto bytes = serialize_compact_model(model);
                write_binary_file(out_path, bytes);
                std::cout << "wrote " << out_path << " (" << bytes.size() << " bytes on disk)\n";
            }
            return 0;
        }
        case Method::TwoStage: {
            if (!rho.has_value()) throw ConfigError("twostage requires --rho in (0, 1]");
            TwoStageConfig cfg;
            cfg.seed = seed;
            const TwoStageModel model = two_stage_build(db, *rho, cfg);
            std::cout << "clusters: " << model.cluster_count()
                      << (model.saturated ? " (saturated)" : "") << ", iterations "
                      << model.iters_run << "\n";
            const std::uint64_t params = model.param_count();
            std::cout << "payload: " << params << " parameters, " << params * kBytesPerParam
                      << " bytes (retains all " << db.n_records() << " fingerprints)\n";
            if (!out_path.empty())
                throw ConfigError(
                    "twostage has no model file format: its payload is the full campaign "
                    "plus heads, so ship the campaign file itself");
            return 0;
        }
        case Method::Wcl: {
            if (rho.has_value()) throw ConfigError("wcl takes no --rho");
            const ApPositionTable table = estimate_ap_positions(db);
            std::cout << "ap positions: " << table.supported_count() << " of " << table.aps.size()
                      << " APs heard somewhere\n";
            const std::uint64_t params = payload_params(Method::Wcl, table.aps.size(), 0, 0);
            std::cout << "payload: " << params << " parameters, " << params * kBytesPerParam
                      << " bytes\n";
            if (!out_path.empty()) {
                const auto bytes = serialize_ap_table(table);
                write_binary_file(out_path, bytes);
                std::cout << "wrote " << out_path << " (" << bytes.size() << " bytes on disk)\n";
            }
            return 0;
        }
    }
    throw UnknownMethod("unknown method enum value");
}

// First bytes decide the file kind; returns "" for non-binary files.
std::string sniff_magic(const std::string& path) {
    const auto bytes = read_binary_file(path);
    if (bytes.size() >= 4) {
        const std::string magic(bytes.begin(), bytes.begin() + 4);
        if (magic == "FPCM" || magic == "FPAT") return magic;
    }
    return "";
}

int do_eval(const std::string& campaign_path, const std::string& tracks_path,
            const std::string& model_path, const std::string& method_arg,
            std::optional<double> rho, std::uint64_t seed, const std::string& format,
            const std::string& out_path) {
    const TrackFile tracks = read_tracks(tracks_path);

    Provenance prov;
    prov.add("tool", "floorloc");
    prov.add("command", "eval");
    prov.add("tracks", tracks_path);
    prov.add("building", tracks.building_id);

    std::unique_ptr<FloorMethod> method;
    std::vector<EvalReport> reports;

    if (!model_path.empty()) {
        if (!campaign_path.empty())
            throw ConfigError("pass either --model or --campaign, not both");
        if (rho.has_value()) throw ConfigError("--rho comes from the model file");
        const std::string magic = sniff_magic(model_path);
        std::string source_building;
        if (magic == "FPCM") {
            CompactModel model = read_compact_model(model_path);
            source_building = model.building_id;
            if (!method_arg.empty() && parse_method(method_arg) != Method::Proposed)
                throw ConfigError("model file " + model_path + " holds a proposed-method model");
            method = wrap_model(std::move(model));
        } else if (magic == "FPAT") {
            ApPositionTable table = read_ap_table(model_path);
            source_building = table.building_id;
            if (!method_arg.empty() && parse_method(method_arg) != Method::Wcl)
                throw ConfigError("model file " + model_path + " holds a wcl model");
            method = wrap_model(std::move(table));
        } else {
            throw BadMagic("not a model file: " + model_path);
        }
        if (source_building != tracks.building_id)
            throw BuildingMismatch("model is for '" + source_building + "', tracks are for '" +
                                   tracks.building_id + "'");
        prov.add("model", model_path);
        prov.add("method", std::string(method_name(method->id())));
        if (method->rho().has_value()) prov.add("rho", num(*method->rho()));
        reports.push_back(evaluate_prebuilt(*method, tracks.observations));
    } else {
        if (campaign_path.empty()) throw ConfigError("eval needs --campaign or --model");
        if (method_arg.empty()) throw ConfigError("eval needs --method when building from a campaign");
        const FingerprintDatabase db = read_campaign(campaign_path);
        if (db.building_id != tracks.building_id)
            throw BuildingMismatch("campaign is for '" + db.building_id + "', tracks are for '" +
                                   tracks.building_id + "'");
        const Method m = parse_method(method_arg);
        method = make_method(m, rho, seed);
        prov.add("campaign", campaign_path);
        prov.add("method", std::string(method_name(m)));
        if (rho.has_value()) prov.add("rho", num(*rho));
        prov.add("seed", std::to_string(seed));
        reports.push_back(evaluate(*method, db, tracks.observations));
    }

    emit_reports(reports, prov, format, out_path);
    return 0;
}

int do_compare(const std::string& campaign_path, const std::string& tracks_path,
               const std::string& rhos_csv, std::uint64_t seed, const std::string& format,
               const std::string& out_path) {
    const std::vector<double> rhos = parse_rhos(rhos_csv);
    const FingerprintDatabase db = read_campaign(campaign_path);
    const TrackFile tracks = read_tracks(tracks_path);
    if (db.building_id != tracks.building_id)
        throw BuildingMismatch("campaign is for '" + db.building_id + "', tracks are for '" +
                               tracks.building_id + "'");

    Provenance prov;
    prov.add("tool", "floorloc");
    prov.add("command", "compare");
    prov.add("campaign", campaign_path);
    prov.add("tracks", tracks_path);
    prov.add("building", db.building_id);
    prov.add("rhos", rhos_text(rhos));
    prov.add("seed", std::to_string(seed));

    const std::vector<EvalReport> reports =
        compare_all(db, tracks.observations, rhos, seed);
    emit_reports(reports, prov, format, out_path);
    return 0;
}

int do_inspect(const std::string& path) {
    const std::string magic = sniff_magic(path);
    if (magic == "FPCM") {
        const CompactModel model = read_compact_model(path);
        std::cout << "compact model (FPCM v" << kCompactModelVersion << "): building "
                  << model.building_id << "\n";
        std::cout << "aps=" << model.aps.size() << " heads=" << model.head_rows()
                  << " rho=" << num(model.rho) << " not_heard=" << num(model.not_heard_dbm)
                  << "\n";
        std::map<int, std::size_t> per_floor;
        for (const int f : model.head_floors) ++per_floor[f];
        for (const auto& [floor, count] : per_floor)
            std::cout << "floor " << floor << ": " << count << " heads\n";
        const std::uint64_t params = model.param_count();
        std::cout << "payload: " << params << " parameters, " << params * kBytesPerParam
                  << " bytes\n";
        return 0;
    }
    if (magic == "FPAT") {
        const ApPositionTable table = read_ap_table(path);
        std::cout << "ap-position table (FPAT v" << kApTableVersion << "): building "
                  << table.building_id << "\n";
        std::cout << "aps=" << table.aps.size() << " with_position=" << table.supported_count()
                  << " floors=" << table.floors.size() << " w0=" << num(table.w0_dbm) << " mode="
                  << (table.mode == WclWeighting::ShiftFromFloor ? "shift" : "linear-power")
                  << "\n";
        return 0;
    }

    const std::string text = read_text_file(path);
    const std::size_t nl = text.find('\n');
    const std::string first = text.substr(0, nl == std::string::npos ? text.size() : nl);
    const nlohmann::json j = nlohmann::json::parse(first, nullptr, false);
    if (j.is_object() && j.contains("format")) {
        const std::string fmt = j["format"].is_string() ? j["format"].get<std::string>() : "";
        if (fmt == "fingerprint-campaign") {
            const FingerprintDatabase db = parse_campaign(text);
            std::cout << "campaign: building " << db.building_id << "\n";
            std::cout << "floors=" << db.n_floors() << " fingerprints=" << db.n_records()
                      << " aps=" << db.n_aps() << " not_heard=" << num(db.not_heard_dbm) << "\n";
            for (const auto& f : db.floors) {
                std::size_t count = 0;
                for (const auto& rec : db.records)
                    if (rec.floor == f.label) ++count;
                std::cout << "floor " << f.label << " (z=" << num(f.z_center) << "): " << count
                          << " fingerprints\n";
            }
            return 0;
        }
        if (fmt == "rss-tracks") {
            const TrackFile tf = parse_tracks(text);
            std::cout << "tracks: building " << tf.building_id << ", "
                      << tf.observations.size() << " observations\n";
            std::map<int, std::size_t> per_floor;
            for (const auto& o : tf.observations) ++per_floor[*o.true_floor];
            for (const auto& [floor, count] : per_floor)
                std::cout << "floor " << floor << ": " << count << " observations\n";
            return 0;
        }
        throw MalformedFile(1, "unknown format '" + fmt + "'");
    }

    const auto pairs = parse_kv(text);
    std::cout << "key-value config, " << pairs.size() << " entries\n";
    for (const auto& [k, v] : pairs) std::cout << k << " = " << v << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floor estimation from RSS fingerprints: synthetic campaigns, model training, "
                 "and method benchmarks"};
    app.require_subcommand(1);

    std::string preset, config_path, out_dir, campaign_path, tracks_path, model_path;
    std::string method_arg, format = "csv", out_path, rhos_csv = "0.01,0.05,0.1", inspect_path;
    std::uint64_t seed = 1;
    double rho_flag = 0.0;

    auto add_seed = [&seed](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed")->envname("FLOORLOC_SEED");
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", out_path, "write the report here instead of stdout");
    };

    CLI::App* gen = app.add_subcommand("generate", "Generate a synthetic campaign and track set");
    gen->add_option("--preset", preset, "building preset (univ1, univ2, mall, office)");
    gen->add_option("--config", config_path, "key-value config file")->check(CLI::ExistingFile);
    gen->add_option("--out-dir", out_dir, "directory for campaign.jsonl and tracks.jsonl")
        ->required();
    add_seed(gen);

    CLI::App* train = app.add_subcommand("train", "Build a model from a campaign file");
    train->add_option("--campaign", campaign_path, "campaign file")
        ->required()
        ->check(CLI::ExistingFile);
    CLI::Option* train_method =
        train->add_option("--method", method_arg, "proposed, twostage, or wcl")->required();
    (void)train_method;
    CLI::Option* train_rho = train->add_option("--rho", rho_flag, "clustering ratio in (0, 1]");
    train->add_option("--out", out_path, "model file to write");
    add_seed(train);

    CLI::App* eval = app.add_subcommand("eval", "Evaluate one method on a track set");
    eval->add_option("--campaign", campaign_path, "training campaign file")
        ->check(CLI::ExistingFile);
    eval->add_option("--tracks", tracks_path, "test track file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--model", model_path, "pre-trained model file (FPCM or FPAT)")
        ->check(CLI::ExistingFile);
    eval->add_option("--method", method_arg, "nn, wcl, twostage, or proposed");
    CLI::Option* eval_rho = eval->add_option("--rho", rho_flag, "clustering ratio in (0, 1]");
    add_seed(eval);
    add_format(eval);

    CLI::App* compare = app.add_subcommand("compare", "Run all four methods and emit the metrics");
    compare->add_option("--campaign", campaign_path, "training campaign file")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--tracks", tracks_path, "test track file")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--rhos", rhos_csv, "comma-separated clustering ratios");
    add_seed(compare);
    add_format(compare);

    CLI::App* inspect = app.add_subcommand("inspect", "Describe a campaign, track, model, or config file");
    inspect->add_option("file", inspect_path, "file to describe")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gen))
            return do_generate(preset, config_path, out_dir, seed);
        if (app.got_subcommand(train)) {
            std::optional<double> rho;
            if (train_rho->count() > 0) rho = rho_flag;
            return do_train(campaign_path, method_arg, rho, seed, out_path);
        }
        if (app.got_subcommand(eval)) {
            std::optional<double> rho;
            if (eval_rho->count() > 0) rho = rho_flag;
            return do_eval(campaign_path, tracks_path, model_path, method_arg, rho, seed, format,
                           out_path);
        }
        if (app.got_subcommand(compare))
            return do_compare(campaign_path, tracks_path, rhos_csv, seed, format, out_path);
        if (app.got_subcommand(inspect)) return do_inspect(inspect_path);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownMethod& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
