#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floorloc/compact.hpp"
#include "floorloc/core.hpp"
#include "floorloc/wcl.hpp"

namespace floorloc {

inline constexpr std::uint16_t kCampaignFormatVersion = 1;
inline constexpr std::uint16_t kCompactModelVersion = 1;
inline constexpr std::uint16_t kApTableVersion = 1;

// `key = value` lines, '#' starts a comment, blank lines ignored.
// Pairs come back in file order; errors carry the line number.
std::vector<std::pair<std::string, std::string>> parse_kv(std::string_view text);

// Campaign files: one JSON object per line. Line 1 is the header
// (building id, floors, AP registry in index order, sentinel, bounds,
// provenance); every further line is a fingerprint record. Numbers are
// printed shortest-round-trip, so write -> read -> write is
// byte-identical.
std::string serialize_campaign(const FingerprintDatabase& db);
FingerprintDatabase parse_campaign(std::string_view text);
void write_campaign(const std::string& path, const FingerprintDatabase& db);
FingerprintDatabase read_campaign(const std::string& path);

// Track files: JSONL like campaigns, header then one observation per
// line, each with its ground-truth floor.
struct TrackFile {
    std::string building_id;
    std::vector<Observation> observations;
};
std::string serialize_tracks(std::string_view building_id, std::span<const Observation> obs);
TrackFile parse_tracks(std::string_view text);
void write_tracks(const std::string& path, std::string_view building_id,
                  std::span<const Observation> obs);
TrackFile read_tracks(const std::string& path);

// Compact-model payload, binary little-endian:
//   "FPCM" | u16 version | u32 n_ap | u32 n_c | f64 rho | f32 not_heard
//   | u16-prefixed building id | n_ap x (u16-prefixed AP id)
//   | n_c x (i16 floor, n_ap x f32 rss)
// Head vectors are quantized to 32-bit floats on disk.
std::vector<std::uint8_t> serialize_compact_model(const CompactModel& model);
CompactModel parse_compact_model(std::span<const std::uint8_t> bytes);
void write_compact_model(const std::string& path, const CompactModel& model);
CompactModel read_compact_model(const std::string& path);

// Bytes of the entry block that follows the header and registry.
constexpr std::uint64_t compact_body_bytes(std::uint64_t n_ap, std::uint64_t n_c) {
    return n_c * (2 + 4 * n_ap);
}

// AP-position table, binary little-endian:
//   "FPAT" | u16 version | u32 n_ap | u32 n_entries | u8 weight_mode
//   | f64 w0 | u16-prefixed building id
//   | u16 n_floors, n_floors x (i16 label, f64 z_center)
//   | n_ap x (u16-prefixed AP id)
//   | n_entries x (u32 ap_index, f64 x, f64 y, f64 z, u32 support, u8 flags)
// Entries are stored with strictly ascending ap_index.
std::vector<std::uint8_t> serialize_ap_table(const ApPositionTable& table);
ApPositionTable parse_ap_table(std::span<const std::uint8_t> bytes);
void write_ap_table(const std::string& path, const ApPositionTable& table);
ApPositionTable read_ap_table(const std::string& path);

// Whole-file helpers; failures raise IoError with the path in the message.
std::string read_text_file(const std::string& path);
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace floorloc
