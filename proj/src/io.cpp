#include "floorloc/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "floorloc/errors.hpp"

namespace floorloc {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- binary

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v & 0xff));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
    void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void str16(std::string_view s) {
        if (s.size() > 0xffff)
            throw ConfigError("string too long for 16-bit length prefix: " +
                              std::to_string(s.size()) + " bytes");
        u16(static_cast<std::uint16_t>(s.size()));
        raw(s);
    }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> buf) : buf_(buf) {}

    std::size_t remaining() const { return buf_.size() - pos_; }

    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
    std::string str16() {
        const std::uint16_t len = u16();
        need(len);
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    void need(std::size_t n) const {
        if (n > remaining())
            throw TruncatedFile("need " + std::to_string(n) + " more bytes, have " +
                                std::to_string(remaining()));
    }

private:
    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

void check_magic(ByteReader& r, std::string_view want) {
    r.need(want.size());
    std::string got;
    for (std::size_t i = 0; i < want.size(); ++i) got.push_back(static_cast<char>(r.u8()));
    if (got != want) throw BadMagic("expected '" + std::string(want) + "', found '" + got + "'");
}

// ------------------------------------------------------------------ json

json parse_json_line(std::string_view line, std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw MalformedFile(line_no, "invalid JSON");
    return j;
}

const json& need_key(const json& j, const char* key, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end()) throw MalformedFile(line_no, std::string("missing key '") + key + "'");
    return *it;
}

double need_number(const json& j, const char* key, std::size_t line_no) {
    const json& v = need_key(j, key, line_no);
    if (!v.is_number()) throw MalformedFile(line_no, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

int need_int(const json& j, const char* key, std::size_t line_no) {
    const json& v = need_key(j, key, line_no);
    if (!v.is_number_integer())
        throw MalformedFile(line_no, std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

std::string need_string(const json& j, const char* key, std::size_t line_no) {
    const json& v = need_key(j, key, line_no);
    if (!v.is_string()) throw MalformedFile(line_no, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

// Splits on '\n'; one trailing newline is allowed, interior blank lines
// are not.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t line_no = 1; start <= text.size(); ++line_no) {
        const std::size_t nl = text.find('\n', start);
        const bool last = nl == std::string_view::npos;
        const std::string_view line = text.substr(start, last ? text.size() - start : nl - start);
        if (last && line.empty()) break;  // end of text or trailing newline
        if (line.empty()) throw MalformedFile(line_no, "empty line");
        lines.push_back(line);
        if (last) break;
        start = nl + 1;
    }
    if (lines.empty()) throw MalformedFile(1, "empty file");
    return lines;
}

void check_version(const json& header, std::uint16_t want) {
    const json& v = need_key(header, "version", 1);
    if (!v.is_number_integer()) throw MalformedFile(1, "'version' must be an integer");
    const auto got = v.get<std::int64_t>();
    if (got != want)
        throw VersionUnsupported("file version " + std::to_string(got) + ", reader supports " +
                                 std::to_string(want));
}

json provenance_json(const std::string& text) {
    if (text.empty()) return json::object();
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("database provenance is not valid JSON");
    return j;
}

}  // namespace

// -------------------------------------------------------------- kv files

std::vector<std::pair<std::string, std::string>> parse_kv(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t line_no = 0;
    std::size_t start = 0;
    const auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    while (start <= text.size()) {
        ++line_no;
        const std::size_t nl = text.find('\n', start);
        std::string_view line =
            text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw MalformedFile(line_no, "expected 'key = value'");
            const std::string_view key = trim(line.substr(0, eq));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) throw MalformedFile(line_no, "empty key");
            pairs.emplace_back(std::string(key), std::string(value));
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return pairs;
}

// -------------------------------------------------------------- campaign

std::string serialize_campaign(const FingerprintDatabase& db) {
    db.finalize();

    json header;
    header["format"] = "fingerprint-campaign";
    header["version"] = kCampaignFormatVersion;
    header["building_id"] = db.building_id;
    header["not_heard_dbm"] = db.not_heard_dbm;
    header["rss_min_dbm"] = db.bounds.min_dbm;
    header["rss_max_dbm"] = db.bounds.max_dbm;
    json floors = json::array();
    for (const auto& f : db.floors) floors.push_back({{"label", f.label}, {"z_center", f.z_center}});
    header["floors"] = std::move(floors);
    json aps = json::array();
    for (const auto& id : db.aps.ids()) aps.push_back(id);
    header["aps"] = std::move(aps);
    header["provenance"] = provenance_json(db.provenance);

    std::string out = header.dump();
    out.push_back('\n');
    for (const auto& rec : db.records) {
        json r;
        r["pos"] = {rec.position.x, rec.position.y, rec.position.z};
        r["floor"] = rec.floor;
        json rss = json::object();
        for (const auto& [idx, val] : rec.readings) rss[db.aps.id(static_cast<std::size_t>(idx))] = val;
        r["rss"] = std::move(rss);
        out += r.dump();
        out.push_back('\n');
    }
    return out;
}

FingerprintDatabase parse_campaign(std::string_view text) {
    const auto lines = split_lines(text);
    const json header = parse_json_line(lines[0], 1);
    if (!header.is_object()) throw MalformedFile(1, "header must be a JSON object");
    if (need_string(header, "format", 1) != "fingerprint-campaign")
        throw MalformedFile(1, "not a fingerprint-campaign file");
    check_version(header, kCampaignFormatVersion);

    FingerprintDatabase db;
    db.building_id = need_string(header, "building_id", 1);
    db.not_heard_dbm = need_number(header, "not_heard_dbm", 1);
    db.bounds.min_dbm = need_number(header, "rss_min_dbm", 1);
    db.bounds.max_dbm = need_number(header, "rss_max_dbm", 1);
    if (!(db.bounds.min_dbm < db.bounds.max_dbm))
        throw MalformedFile(1, "rss bounds must satisfy min < max");

    const json& floors = need_key(header, "floors", 1);
    if (!floors.is_array() || floors.empty())
        throw MalformedFile(1, "'floors' must be a non-empty array");
    std::vector<bool> z_missing;
    for (const auto& f : floors) {
        if (!f.is_object()) throw MalformedFile(1, "floor entries must be objects");
        FloorSpec spec;
        spec.label = need_int(f, "label", 1);
        if (auto it = f.find("z_center"); it != f.end()) {
            if (!it->is_number()) throw MalformedFile(1, "'z_center' must be a number");
            spec.z_center = it->get<double>();
            z_missing.push_back(false);
        } else {
            z_missing.push_back(true);
        }
        db.floors.push_back(spec);
    }

    const json& aps = need_key(header, "aps", 1);
    if (!aps.is_array() || aps.empty()) throw MalformedFile(1, "'aps' must be a non-empty array");
    std::vector<std::string> ids;
    ids.reserve(aps.size());
    for (const auto& a : aps) {
        if (!a.is_string()) throw MalformedFile(1, "'aps' entries must be strings");
        ids.push_back(a.get<std::string>());
    }
    try {
        db.aps = ApRegistry(std::move(ids));
    } catch (const Error& e) {
        throw MalformedFile(1, e.what());
    }

    if (auto it = header.find("provenance"); it != header.end()) {
        if (!it->is_object()) throw MalformedFile(1, "'provenance' must be an object");
        db.provenance = it->dump();
    } else {
        db.provenance = "{}";
    }

    std::map<int, std::size_t> floor_pos;
    for (std::size_t i = 0; i < db.floors.size(); ++i) floor_pos[db.floors[i].label] = i;

    if (lines.size() < 2) throw MalformedFile(2, "no records");
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const json r = parse_json_line(lines[li], line_no);
        if (!r.is_object()) throw MalformedFile(line_no, "record must be a JSON object");

        FingerprintRecord rec;
        const json& pos = need_key(r, "pos", line_no);
        if (!pos.is_array() || pos.size() != 3 ||
            !std::all_of(pos.begin(), pos.end(), [](const json& v) { return v.is_number(); }))
            throw MalformedFile(line_no, "'pos' must be an array of 3 numbers");
        rec.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};

        rec.floor = need_int(r, "floor", line_no);
        if (!floor_pos.count(rec.floor))
            throw MalformedFile(line_no, "unknown floor label " + std::to_string(rec.floor));

        const json& rss = need_key(r, "rss", line_no);
        if (!rss.is_object()) throw MalformedFile(line_no, "'rss' must be an object");
        if (rss.empty()) throw MalformedFile(line_no, "record hears no AP");
        for (const auto& [id, val] : rss.items()) {
            if (!val.is_number())
                throw MalformedFile(line_no, "rss value for '" + id + "' must be a number");
            const int idx = db.aps.index_of(id);
            if (idx < 0) throw MalformedFile(line_no, "unknown AP id '" + id + "'");
            const double v = val.get<double>();
            if (v < db.bounds.min_dbm || v > db.bounds.max_dbm)
                throw MalformedFile(line_no, "rss value " + std::to_string(v) + " out of bounds");
            rec.readings.emplace_back(idx, v);
        }
        std::sort(rec.readings.begin(), rec.readings.end());
        db.records.push_back(std::move(rec));
    }

    // Floors without an explicit z_center take the median z of their own
    // records.
    for (std::size_t i = 0; i < db.floors.size(); ++i) {
        if (!z_missing[i]) continue;
        std::vector<double> zs;
        for (const auto& rec : db.records)
            if (rec.floor == db.floors[i].label) zs.push_back(rec.position.z);
        if (zs.empty())
            throw MalformedFile(1, "floor " + std::to_string(db.floors[i].label) +
                                       " has no z_center and no records to infer it from");
        std::sort(zs.begin(), zs.end());
        const std::size_t n = zs.size();
        db.floors[i].z_center = (n % 2 == 1) ? zs[n / 2] : 0.5 * (zs[n / 2 - 1] + zs[n / 2]);
    }

    try {
        db.finalize();
    } catch (const Error& e) {
        throw MalformedFile(1, std::string("inconsistent campaign: ") + e.what());
    }
    return db;
}

void write_campaign(const std::string& path, const FingerprintDatabase& db) {
    write_text_file(path, serialize_campaign(db));
}

FingerprintDatabase read_campaign(const std::string& path) {
    return parse_campaign(read_text_file(path));
}

// ---------------------------------------------------------------- tracks

std::string serialize_tracks(std::string_view building_id, std::span<const Observation> obs) {
    json header;
    header["format"] = "rss-tracks";
    header["version"] = kCampaignFormatVersion;
    header["building_id"] = std::string(building_id);

    std::string out = header.dump();
    out.push_back('\n');
    for (const auto& o : obs) {
        if (!o.true_floor.has_value())
            throw ConfigError("track files require a floor label on every observation");
        json r;
        r["floor"] = *o.true_floor;
        json rss = json::object();
        for (const auto& [id, val] : o.readings) rss[id] = val;
        r["rss"] = std::move(rss);
        out += r.dump();
        out.push_back('\n');
    }
    return out;
}

TrackFile parse_tracks(std::string_view text) {
    const auto lines = split_lines(text);
    const json header = parse_json_line(lines[0], 1);
    if (!header.is_object()) throw MalformedFile(1, "header must be a JSON object");
    if (need_string(header, "format", 1) != "rss-tracks")
        throw MalformedFile(1, "not an rss-tracks file");
    check_version(header, kCampaignFormatVersion);

    TrackFile tf;
    tf.building_id = need_string(header, "building_id", 1);

    if (lines.size() < 2) throw MalformedFile(2, "no records");
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const json r = parse_json_line(lines[li], line_no);
        if (!r.is_object()) throw MalformedFile(line_no, "record must be a JSON object");
        Observation o;
        o.true_floor = need_int(r, "floor", line_no);
        const json& rss = need_key(r, "rss", line_no);
        if (!rss.is_object()) throw MalformedFile(line_no, "'rss' must be an object");
        for (const auto& [id, val] : rss.items()) {
            if (!val.is_number())
                throw MalformedFile(line_no, "rss value for '" + id + "' must be a number");
            o.readings.emplace_back(id, val.get<double>());
        }
        tf.observations.push_back(std::move(o));
    }
    return tf;
}

void write_tracks(const std::string& path, std::string_view building_id,
                  std::span<const Observation> obs) {
    write_text_file(path, serialize_tracks(building_id, obs));
}

TrackFile read_tracks(const std::string& path) { return parse_tracks(read_text_file(path)); }

// ----------------------------------------------------------- FPCM binary

std::vector<std::uint8_t> serialize_compact_model(const CompactModel& model) {
    const std::size_t n_ap = model.aps.size();
    const std::size_t n_c = model.heads.rows;
    if (model.heads.cols != n_ap)
        throw LengthMismatch("model registry has " + std::to_string(n_ap) + " APs but heads have " +
                             std::to_string(model.heads.cols) + " columns");
    if (model.head_floors.size() != n_c)
        throw LengthMismatch("model has " + std::to_string(n_c) + " heads but " +
                             std::to_string(model.head_floors.size()) + " floor labels");
    if (n_ap > 0xffffffffull || n_c > 0xffffffffull)
        throw ConfigError("model too large for 32-bit counts");

    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.raw("FPCM");
    w.u16(kCompactModelVersion);
    w.u32(static_cast<std::uint32_t>(n_ap));
    w.u32(static_cast<std::uint32_t>(n_c));
    w.f64(model.rho);
    w.f32(static_cast<float>(model.not_heard_dbm));
    w.str16(model.building_id);
    for (const auto& id : model.aps.ids()) w.str16(id);
    for (std::size_t h = 0; h < n_c; ++h) {
        const int floor = model.head_floors[h];
        if (floor < std::numeric_limits<std::int16_t>::min() ||
            floor > std::numeric_limits<std::int16_t>::max())
            throw ConfigError("floor label " + std::to_string(floor) + " out of 16-bit range");
        w.i16(static_cast<std::int16_t>(floor));
        const auto row = model.heads.row(h);
        for (std::size_t a = 0; a < n_ap; ++a) w.f32(static_cast<float>(row[a]));
    }
    return out;
}

CompactModel parse_compact_model(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    check_magic(r, "FPCM");
    const std::uint16_t version = r.u16();
    if (version != kCompactModelVersion)
        throw VersionUnsupported("compact-model version " + std::to_string(version) +
                                 ", reader supports " + std::to_string(kCompactModelVersion));
    const std::uint32_t n_ap = r.u32();
    const std::uint32_t n_c = r.u32();

    CompactModel model;
    model.rho = r.f64();
    model.not_heard_dbm = static_cast<double>(r.f32());
    model.building_id = r.str16();

    // Registry ids are length-prefixed, so each needs at least 2 bytes.
    if (r.remaining() / 2 < n_ap)
        throw TruncatedFile("registry block needs at least " + std::to_string(2ull * n_ap) +
                            " bytes, have " + std::to_string(r.remaining()));
    std::vector<std::string> ids;
    ids.reserve(n_ap);
    for (std::uint32_t i = 0; i < n_ap; ++i) ids.push_back(r.str16());
    try {
        model.aps = ApRegistry(std::move(ids));
    } catch (const Error& e) {
        throw LengthMismatch(std::string("bad AP registry: ") + e.what());
    }

    const std::uint64_t per_entry = 2 + 4ull * n_ap;
    if (n_c != 0 && per_entry > std::numeric_limits<std::uint64_t>::max() / n_c)
        throw TruncatedFile("entry block size overflows");
    const std::uint64_t body = compact_body_bytes(n_ap, n_c);
    if (r.remaining() < body)
        throw TruncatedFile("entry block needs " + std::to_string(body) + " bytes, have " +
                            std::to_string(r.remaining()));
    if (r.remaining() > body)
        throw LengthMismatch(std::to_string(r.remaining() - body) + " trailing bytes after " +
                             std::to_string(n_c) + " entries");

    model.heads = DenseMatrix::zeros(n_c, n_ap);
    model.head_floors.reserve(n_c);
    for (std::uint32_t h = 0; h < n_c; ++h) {
        model.head_floors.push_back(r.i16());
        auto row = model.heads.row(h);
        for (std::uint32_t a = 0; a < n_ap; ++a) row[a] = static_cast<double>(r.f32());
    }
    return model;
}

void write_compact_model(const std::string& path, const CompactModel& model) {
    write_binary_file(path, serialize_compact_model(model));
}

CompactModel read_compact_model(const std::string& path) {
    return parse_compact_model(read_binary_file(path));
}

// ----------------------------------------------------------- FPAT binary

std::vector<std::uint8_t> serialize_ap_table(const ApPositionTable& table) {
    const std::size_t n_ap = table.aps.size();
    if (table.entries.size() != n_ap)
        throw LengthMismatch("table has " + std::to_string(table.entries.size()) +
                             " entry slots for " + std::to_string(n_ap) + " APs");
    if (n_ap > 0xffffffffull) throw ConfigError("table too large for 32-bit counts");

    if (table.floors.empty()) throw ConfigError("ap table needs at least one floor");
    if (table.floors.size() > 0xffff) throw ConfigError("too many floors for 16-bit count");

    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.raw("FPAT");
    w.u16(kApTableVersion);
    w.u32(static_cast<std::uint32_t>(n_ap));
    w.u32(static_cast<std::uint32_t>(table.supported_count()));
    w.u8(table.mode == WclWeighting::ShiftFromFloor ? 0 : 1);
    w.f64(table.w0_dbm);
    w.str16(table.building_id);
    w.u16(static_cast<std::uint16_t>(table.floors.size()));
    for (const auto& f : table.floors) {
        if (f.label < std::numeric_limits<std::int16_t>::min() ||
            f.label > std::numeric_limits<std::int16_t>::max())
            throw ConfigError("floor label " + std::to_string(f.label) + " out of 16-bit range");
        w.i16(static_cast<std::int16_t>(f.label));
        w.f64(f.z_center);
    }
    for (const auto& id : table.aps.ids()) w.str16(id);
    for (std::size_t i = 0; i < n_ap; ++i) {
        const auto& e = table.entries[i];
        if (!e.has_value()) continue;
        w.u32(static_cast<std::uint32_t>(i));
        w.f64(e->position.x);
        w.f64(e->position.y);
        w.f64(e->position.z);
        if (e->support > 0xffffffffull) throw ConfigError("support count exceeds 32 bits");
        w.u32(static_cast<std::uint32_t>(e->support));
        w.u8(e->zero_weight_fallback ? 1 : 0);
    }
    return out;
}

ApPositionTable parse_ap_table(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    check_magic(r, "FPAT");
    const std::uint16_t version = r.u16();
    if (version != kApTableVersion)
        throw VersionUnsupported("ap-table version " + std::to_string(version) +
                                 ", reader supports " + std::to_string(kApTableVersion));
    const std::uint32_t n_ap = r.u32();
    const std::uint32_t n_entries = r.u32();
    const std::uint8_t mode = r.u8();
    if (mode > 1) throw LengthMismatch("unknown weight mode byte " + std::to_string(mode));

    ApPositionTable table;
    table.mode = mode == 0 ? WclWeighting::ShiftFromFloor : WclWeighting::LinearPower;
    table.w0_dbm = r.f64();
    table.building_id = r.str16();

    const std::uint16_t n_floors = r.u16();
    if (n_floors == 0) throw LengthMismatch("ap table declares zero floors");
    for (std::uint16_t f = 0; f < n_floors; ++f) {
        FloorSpec spec;
        spec.label = r.i16();
        spec.z_center = r.f64();
        if (!table.floors.empty()) {
            if (spec.label <= table.floors.back().label)
                throw LengthMismatch("floor labels must be strictly ascending");
            if (!(spec.z_center > table.floors.back().z_center))
                throw LengthMismatch("floor z_centers must be strictly increasing");
        }
        table.floors.push_back(spec);
    }

    if (n_entries > n_ap)
        throw LengthMismatch("table declares " + std::to_string(n_entries) + " entries for " +
                             std::to_string(n_ap) + " APs");
    if (r.remaining() / 2 < n_ap)
        throw TruncatedFile("registry block needs at least " + std::to_string(2ull * n_ap) +
                            " bytes, have " + std::to_string(r.remaining()));
    std::vector<std::string> ids;
    ids.reserve(n_ap);
    for (std::uint32_t i = 0; i < n_ap; ++i) ids.push_back(r.str16());
    try {
        table.aps = ApRegistry(std::move(ids));
    } catch (const Error& e) {
        throw LengthMismatch(std::string("bad AP registry: ") + e.what());
    }

    constexpr std::uint64_t kEntryBytes = 4 + 3 * 8 + 4 + 1;
    const std::uint64_t body = kEntryBytes * n_entries;
    if (r.remaining() < body)
        throw TruncatedFile("entry block needs " + std::to_string(body) + " bytes, have " +
                            std::to_string(r.remaining()));
    if (r.remaining() > body)
        throw LengthMismatch(std::to_string(r.remaining() - body) + " trailing bytes after " +
                             std::to_string(n_entries) + " entries");

    table.entries.resize(n_ap);
    std::int64_t prev = -1;
    for (std::uint32_t e = 0; e < n_entries; ++e) {
        const std::uint32_t idx = r.u32();
        if (idx >= n_ap)
            throw LengthMismatch("entry references AP index " + std::to_string(idx) + " of " +
                                 std::to_string(n_ap));
        if (static_cast<std::int64_t>(idx) <= prev)
            throw LengthMismatch("entries must have strictly ascending AP indices");
        prev = idx;
        ApPositionEntry entry;
        entry.position.x = r.f64();
        entry.position.y = r.f64();
        entry.position.z = r.f64();
        entry.support = r.u32();
        const std::uint8_t flags = r.u8();
        if (flags > 1) throw LengthMismatch("unknown entry flags byte " + std::to_string(flags));
        entry.zero_weight_fallback = flags != 0;
        table.entries[idx] = entry;
    }
    return table;
}

void write_ap_table(const std::string& path, const ApPositionTable& table) {
    write_binary_file(path, serialize_ap_table(table));
}

ApPositionTable read_ap_table(const std::string& path) {
    return parse_ap_table(read_binary_file(path));
}

// ------------------------------------------------------------ file utils

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed: " + path);
    return std::move(ss).str();
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    const std::string text = read_text_file(path);
    return std::vector<std::uint8_t>(text.begin(), text.end());
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw IoError("write failed: " + path);
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    write_text_file(path,
                    std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace floorloc
