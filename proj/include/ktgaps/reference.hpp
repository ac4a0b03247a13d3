#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktgaps/records.hpp"

namespace ktgaps {

/// Largest start covered by the published exhaustive scans; the pattern 1 table carries
/// rows beyond it from longer external computations.
inline constexpr std::uint64_t kPublishedScanLimit = 1'000'000'000'000'000;

/// Published maximal gaps for one built-in pattern.
struct ReferenceTable {
    std::string pattern_id;
    std::string source;
    std::vector<GapRecord> rows;

    static bool beyond_published_scan_limit(const GapRecord& row) noexcept {
        return row.p_next > kPublishedScanLimit;
    }
};

/// Data directory: $KTGAPS_DATA_DIR if set, else the directory baked in at build time.
std::filesystem::path default_data_dir();

/// Loads <dir>/table_<id>.csv (header p_start,p_next,gap). InputError for an
/// unknown id, a missing file, or a malformed row.
ReferenceTable reference_table(std::string_view pattern_id,
                               const std::filesystem::path& data_dir = default_data_dir());

/// Comparison of computed records with the table rows whose p_next <= limit.
/// missing and extra are both empty exactly when the two sequences are equal.
struct VerificationReport {
    std::string pattern_id;
    std::uint64_t limit = 0;
    std::size_t matched = 0;
    std::vector<GapRecord> missing;
    std::vector<GapRecord> extra;

    bool ok() const noexcept { return missing.empty() && extra.empty(); }
};

VerificationReport verify_against_reference(std::span<const GapRecord> computed, const ReferenceTable& table,
                                            std::uint64_t limit);

VerificationReport verify_against_reference(std::span<const GapRecord> computed, std::string_view pattern_id,
                                            std::uint64_t limit);

} // namespace ktgaps
