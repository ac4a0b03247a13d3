#include "ktgaps/records.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include <json.hpp>

#include "ktgaps/error.hpp"

namespace ktgaps {
namespace {

std::uint64_t parse_u64(std::string_view field, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        throw InputError("line " + std::to_string(line_no) + ": bad integer '" + std::string(field) + "'");
    }
    return value;
}

nlohmann::ordered_json to_json(const GapRecord& r) {
    return {{"pattern_id", r.pattern_id}, {"p_start", r.p_start}, {"p_next", r.p_next}, {"gap", r.gap}};
}

} // namespace

void write_record_csv_row(std::ostream& out, const GapRecord& r) {
    out << r.pattern_id << ',' << r.p_start << ',' << r.p_next << ',' << r.gap << '\n';
}

void write_records_csv(std::ostream& out, std::span<const GapRecord> records) {
    out << kRecordCsvHeader << '\n';
    for (const auto& r : records) write_record_csv_row(out, r);
}

std::vector<GapRecord> read_records_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    if (!next_line() || line != kRecordCsvHeader) {
        throw InputError(std::string("record CSV must start with the header '") + kRecordCsvHeader + "'");
    }
    std::vector<GapRecord> records;
    while (next_line()) {
        if (line.empty()) continue;
        std::string_view rest = line;
        std::string_view fields[4];
        std::size_t n = 0;
        while (n < 4) {
            const std::size_t comma = rest.find(',');
            fields[n++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) {
                rest = {};
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (n != 4 || !rest.empty() || fields[0].empty()) {
            throw InputError("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        GapRecord r{std::string(fields[0]), parse_u64(fields[1], line_no), parse_u64(fields[2], line_no),
                    parse_u64(fields[3], line_no)};
        if (r.p_next <= r.p_start || r.gap != r.p_next - r.p_start) {
            throw InputError("line " + std::to_string(line_no) + ": gap is not p_next - p_start");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string record_to_json(const GapRecord& record) {
    return to_json(record).dump();
}

std::string records_to_json(std::span<const GapRecord> records) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr.dump(2);
}

} // namespace ktgaps
