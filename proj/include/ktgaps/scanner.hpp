#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ktgaps/pattern.hpp"
#include "ktgaps/records.hpp"
#include "ktgaps/sieve.hpp"

namespace ktgaps {

inline constexpr int kCheckpointVersion = 1;
inline constexpr std::uint64_t kDefaultCheckpointInterval = 10'000'000'000;

/// Resumable scanner state.
///
/// Every tuple start <= scanned_to has been consumed; a resumed scan picks up
/// at scanned_to + 1. last_tuple_start is 0 until the first tuple is seen
/// (0 never starts a tuple). current_max_gap is the gap of the last record,
/// or 0 when there is none.
struct ScanCheckpoint {
    std::string pattern_id;
    std::vector<std::uint64_t> offsets;
    std::uint64_t scanned_to = 0;
    std::uint64_t last_tuple_start = 0;
    std::uint64_t current_max_gap = 0;
    std::vector<GapRecord> records;

    friend bool operator==(const ScanCheckpoint&, const ScanCheckpoint&) = default;
};

/// Which sieve enumerates tuple starts.
///
/// prime_sieve sieves every integer and intersects shifted primality bits.
/// tuple_sieve sieves start candidates directly on a 30030 wheel, striking
/// p whenever p + d is divisible by a sieving prime; it only runs above the
/// square root of the scan range, below which prime_sieve is used.
/// automatic picks tuple_sieve for k >= 2.
enum class Engine { automatic, prime_sieve, tuple_sieve };

struct ScanOptions {
    /// prime_sieve: integers per segment. tuple_sieve: candidate bits per
    /// chunk, summed over wheel residues.
    std::uint64_t segment_length = kDefaultSegmentLength;
    /// 0 means std::thread::hardware_concurrency().
    unsigned workers = 0;
    Engine engine = Engine::automatic;

    /// When set, a checkpoint is written atomically each time the frontier
    /// advances by checkpoint_interval, and once more when the scan ends.
    std::optional<std::filesystem::path> checkpoint_path;
    std::uint64_t checkpoint_interval = kDefaultCheckpointInterval;

    /// Called in order for each new record, from the calling thread.
    std::function<void(const GapRecord&)> on_record;
    /// Called after each chunk with the frontier and the limit.
    std::function<void(std::uint64_t, std::uint64_t)> on_progress;
    /// Polled between chunks; when it reads true the scan stops at a chunk
    /// boundary and returns an incomplete checkpoint.
    const std::atomic<bool>* stop = nullptr;
};

struct ScanResult {
    ScanCheckpoint checkpoint;
    bool completed = false;
};

/// Every p in [segment.lo, segment.hi) that starts a tuple. `lookahead` must
/// begin at segment.hi and cover at least pattern.span() integers so tuples
/// near the end can be decided (it may be empty when the span is 0).
std::vector<std::uint64_t> scan_segment(const SieveSegment& segment, const SieveSegment& lookahead,
                                        const Pattern& pattern);

/// Same, sieving the lookahead window with `base`.
std::vector<std::uint64_t> scan_segment(const SieveSegment& segment, const Pattern& pattern,
                                        const BasePrimes& base);

/// All tuple starts in [lo, hi), one segment at a time.
std::vector<std::uint64_t> tuple_starts(const Pattern& pattern, std::uint64_t lo, std::uint64_t hi,
                                        Engine engine = Engine::automatic);

/// Streams the maximal gaps between consecutive tuples with p_next <= limit.
///
/// The first gap is a record; after that a gap is a record when it strictly
/// exceeds every earlier gap. With `resume`, scanning continues from the
/// checkpoint and the returned checkpoint holds the old records followed by
/// the new ones; only new records reach on_record.
///
/// InputError for an inadmissible pattern, a limit too large for 64-bit
/// arithmetic, or a limit below the checkpoint's frontier; CheckpointError if
/// the checkpoint belongs to another pattern.
ScanResult find_maximal_gaps(const Pattern& pattern, std::uint64_t limit, const ScanOptions& options = {},
                             const std::optional<ScanCheckpoint>& resume = std::nullopt);

/// Fresh checkpoint for a scan that has not started.
ScanCheckpoint empty_checkpoint(const Pattern& pattern);

std::string checkpoint_to_string(const ScanCheckpoint& checkpoint);
/// CheckpointError on malformed text, an unknown version, or inconsistent fields.
ScanCheckpoint checkpoint_from_string(const std::string& text);

/// Writes to a temporary sibling file and renames it over `path`.
void save_checkpoint(const ScanCheckpoint& checkpoint, const std::filesystem::path& path);
ScanCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace ktgaps
