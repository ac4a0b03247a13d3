#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace ktgaps::cli {

enum class Subcommand { scan, constants, verify, predict };
enum class OutputFormat { text, csv, json };

struct RunConfig {
    Subcommand subcommand = Subcommand::scan;
    std::string pattern = "all";
    std::uint64_t limit = 0;
    std::uint64_t segment_length = std::uint64_t{1} << 22;
    unsigned workers = 1;
    std::optional<std::filesystem::path> checkpoint_path;
    bool resume = false;
    std::uint64_t checkpoint_interval = 10'000'000'000;
    OutputFormat format = OutputFormat::text;
    std::optional<std::filesystem::path> output_path;
    std::uint64_t truncation_bound = 10'000'000;
    std::optional<std::uint64_t> x;
    /// predict: record CSV to evaluate instead of a single x.
    std::optional<std::filesystem::path> records_path;
};

/// Accepts plain digits, "1e9", "10^9" and "4x10^18". InputError otherwise.
std::uint64_t parse_count(std::string_view text);

/// Checks the RunConfig invariants; InputError on violation.
void validate(const RunConfig& config);

/// Parses argv into a RunConfig. Returns nullopt after printing help or a
/// usage error, with the process exit code in `exit_code`.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& exit_code);

/// Executes one subcommand. Records go to `out` (or the output file) and
/// progress and diagnostics to `err`. Returns the process exit status:
/// 0 on success, 1 on a verification mismatch, 2 on bad input, 130 if `stop`
/// interrupted a scan (after its checkpoint was written).
int run(const RunConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop = nullptr);

} // namespace ktgaps::cli
