#include "ktgaps/reference.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "ktgaps/error.hpp"
#include "ktgaps/pattern.hpp"

#ifndef KTGAPS_DEFAULT_DATA_DIR
#define KTGAPS_DEFAULT_DATA_DIR "data"
#endif

namespace ktgaps {
namespace {

std::string oeis_source(std::string_view id) {
    static const std::map<std::string, std::string, std::less<>> sources{
        {"1", "OEIS A005250"},  {"2", "OEIS A113274"},  {"3a", "OEIS A201598"}, {"3b", "OEIS A201596"},
        {"4", "OEIS A113404"},  {"5a", "OEIS A201073"}, {"5b", "OEIS A201062"}, {"6", "OEIS A200503"},
        {"7a", "OEIS A201251"}, {"7b", "OEIS A201051"},
    };
    auto it = sources.find(id);
    return it == sources.end() ? std::string() : it->second;
}

auto key(const GapRecord& r) { return std::tie(r.p_start, r.p_next, r.gap); }

} // namespace

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("KTGAPS_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return KTGAPS_DEFAULT_DATA_DIR;
}

ReferenceTable reference_table(std::string_view pattern_id, const std::filesystem::path& data_dir) {
    const Pattern pattern = builtin_pattern(pattern_id);
    const auto path = data_dir / ("table_" + pattern.id() + ".csv");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open reference table " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != "p_start,p_next,gap") {
        throw InputError(path.string() + ": expected header 'p_start,p_next,gap'");
    }
    // Reuse the record reader by prefixing the pattern id to each row.
    std::stringstream rows;
    rows << kRecordCsvHeader << '\n';
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows << pattern.id() << ',' << line << '\n';
    }

    ReferenceTable table;
    table.pattern_id = pattern.id();
    table.source = oeis_source(pattern.id());
    try {
        table.rows = read_records_csv(rows);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return table;
}

VerificationReport verify_against_reference(std::span<const GapRecord> computed, const ReferenceTable& table,
                                            std::uint64_t limit) {
    VerificationReport report;
    report.pattern_id = table.pattern_id;
    report.limit = limit;

    std::vector<GapRecord> expected;
    for (const auto& row : table.rows) {
        if (row.p_next <= limit) expected.push_back(row);
    }

    auto less = [](const GapRecord& a, const GapRecord& b) { return key(a) < key(b); };
    std::vector<GapRecord> want = expected;
    std::vector<GapRecord> got(computed.begin(), computed.end());
    std::ranges::sort(want, less);
    std::ranges::sort(got, less);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < want.size() || j < got.size()) {
        if (j == got.size() || (i < want.size() && less(want[i], got[j]))) {
            report.missing.push_back(want[i++]);
        } else if (i == want.size() || less(got[j], want[i])) {
            report.extra.push_back(got[j++]);
        } else {
            ++report.matched;
            ++i;
            ++j;
        }
    }

    // Same rows in a different order still count as a mismatch.
    if (report.ok()) {
        for (std::size_t n = 0; n < expected.size(); ++n) {
            if (key(expected[n]) != key(computed[n])) {
                report.missing.push_back(expected[n]);
                report.extra.push_back(computed[n]);
                --report.matched;
            }
        }
    }
    return report;
}

VerificationReport verify_against_reference(std::span<const GapRecord> computed, std::string_view pattern_id,
                                            std::uint64_t limit) {
    return verify_against_reference(computed, reference_table(pattern_id), limit);
}

} // namespace ktgaps
