#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ktgaps {

/// One maximal gap: consecutive tuple starts p_start < p_next with no tuple
/// starting strictly between them.
struct GapRecord {
    std::string pattern_id;
    std::uint64_t p_start = 0;
    std::uint64_t p_next = 0;
    std::uint64_t gap = 0;

    friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

inline constexpr const char* kRecordCsvHeader = "pattern_id,p_start,p_next,gap";

/// Header line plus one row per record.
void write_records_csv(std::ostream& out, std::span<const GapRecord> records);
void write_record_csv_row(std::ostream& out, const GapRecord& record);

/// Reads the CSV written by write_records_csv. InputError on a bad header,
/// malformed row, or a row whose gap is not p_next - p_start.
std::vector<GapRecord> read_records_csv(std::istream& in);

/// JSON array of objects keyed like the CSV header.
std::string records_to_json(std::span<const GapRecord> records);
std::string record_to_json(const GapRecord& record);

} // namespace ktgaps
