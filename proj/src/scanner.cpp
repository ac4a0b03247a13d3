#include "ktgaps/scanner.hpp"

#include <algorithm>
#include <bit>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <type_traits>

#include <json.hpp>

#include "ktgaps/error.hpp"
#include "ktgaps/primality.hpp"
#include "tuple_sieve.hpp"

namespace ktgaps {
namespace {

constexpr std::uint64_t kMaxLimit = std::numeric_limits<std::int64_t>::max();

bool has_odd_offset(const Pattern& pattern) {
    return std::ranges::any_of(pattern.offsets(), [](std::uint64_t d) { return d % 2 != 0; });
}

// Starts in [lo, hi) read from `seg`, which must cover [lo, hi + span).
void collect_starts(const SieveSegment& seg, std::uint64_t lo, std::uint64_t hi, const Pattern& pattern,
                    std::vector<std::uint64_t>& out) {
    out.clear();
    if (pattern.k() == 1) {
        seg.for_each_prime([&](std::uint64_t p) {
            if (p >= lo && p < hi) out.push_back(p);
        });
        return;
    }
    if (has_odd_offset(pattern)) {
        seg.for_each_prime([&](std::uint64_t p) {
            if (p < lo || p >= hi) return;
            if (std::ranges::all_of(pattern.offsets(), [&](std::uint64_t d) { return seg.test(p + d); })) {
                out.push_back(p);
            }
        });
        return;
    }

    // All offsets even: p starts a tuple iff odd bits i, i + d/2, ... are all set.
    const std::uint64_t first_odd = lo | 1;
    if (first_odd >= hi) return;
    const std::uint64_t origin = seg.odd_origin();
    const std::uint64_t begin = (first_odd - origin) / 2;
    const std::uint64_t end = begin + (hi - first_odd + 1) / 2;
    const auto offsets = pattern.offsets().subspan(1);
    for (std::uint64_t pos = begin; pos < end; pos += 64) {
        std::uint64_t acc = seg.odd_bits_at(pos);
        for (std::uint64_t d : offsets) {
            if (acc == 0) break;
            acc &= seg.odd_bits_at(pos + d / 2);
        }
        if (end - pos < 64) acc &= (std::uint64_t{1} << (end - pos)) - 1;
        while (acc != 0) {
            const auto b = static_cast<std::uint64_t>(std::countr_zero(acc));
            out.push_back(origin + 2 * (pos + b));
            acc &= acc - 1;
        }
    }
}

struct Chunk {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool tuple_engine = false;
};

// Partition of the start range [begin, end) into chunks, plus the engines
// that enumerate tuple starts in each.
class ScanPlan {
public:
    ScanPlan(const Pattern& pattern, std::uint64_t begin, std::uint64_t end, std::uint64_t segment_length,
             Engine engine)
        : pattern_(pattern), begin_(begin), end_(std::max(begin, end)), split_(end_), prime_step_(segment_length),
          base_(base_primes(std::max<std::uint64_t>(2, isqrt(end_ - 1 + pattern.span()) + 1))) {
        const bool use_tuple =
            engine == Engine::tuple_sieve || (engine == Engine::automatic && pattern.k() >= 2);
        if (use_tuple && begin_ < end_) {
            tuple_.emplace(pattern, base_, base_.limit(), segment_length);
            split_ = std::clamp(tuple_->min_start(), begin_, end_);
        }
        prime_chunks_ = (split_ - begin_ + prime_step_ - 1) / prime_step_;
        tuple_chunks_ = tuple_ ? (end_ - split_ + tuple_->chunk_length() - 1) / tuple_->chunk_length() : 0;
    }

    std::size_t size() const { return prime_chunks_ + tuple_chunks_; }

    Chunk operator[](std::size_t i) const {
        if (i < prime_chunks_) {
            const std::uint64_t lo = begin_ + i * prime_step_;
            return {lo, std::min(lo + prime_step_, split_), false};
        }
        const std::uint64_t step = tuple_->chunk_length();
        const std::uint64_t lo = split_ + (i - prime_chunks_) * step;
        return {lo, std::min(lo + step, end_), true};
    }

    void starts(const Chunk& chunk, std::vector<std::uint64_t>& out) const {
        if (chunk.tuple_engine) {
            tuple_->starts(chunk.lo, chunk.hi, out);
        } else {
            const SieveSegment seg = sieve_segment(chunk.lo, chunk.hi + pattern_.span(), base_);
            collect_starts(seg, chunk.lo, chunk.hi, pattern_, out);
        }
    }

private:
    Pattern pattern_;
    std::uint64_t begin_;
    std::uint64_t end_;
    std::uint64_t split_;
    std::uint64_t prime_step_;
    BasePrimes base_;
    std::optional<detail::TupleSieve> tuple_;
    std::size_t prime_chunks_ = 0;
    std::size_t tuple_chunks_ = 0;
};

// What the reducer needs from one chunk: its first and last start and the
// gaps inside it that beat every earlier gap inside it. Any global record
// lying inside the chunk is among the latter.
struct ChunkSummary {
    std::uint64_t hi = 0;
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rising;
};

ChunkSummary summarize(const Chunk& chunk, const std::vector<std::uint64_t>& starts) {
    ChunkSummary s;
    s.hi = chunk.hi;
    if (starts.empty()) return s;
    s.first = starts.front();
    s.last = starts.back();
    std::uint64_t best = 0;
    for (std::size_t i = 1; i < starts.size(); ++i) {
        const std::uint64_t gap = starts[i] - starts[i - 1];
        if (gap > best) {
            best = gap;
            s.rising.emplace_back(starts[i - 1], starts[i]);
        }
    }
    return s;
}

// Runs produce(i) on `workers` threads and consume(i, result) on the calling
// thread in index order. Returns false if `stop` ended the run early.
template <typename Produce, typename Consume>
bool run_ordered(std::size_t count, unsigned workers, Produce&& produce, Consume&& consume,
                 const std::atomic<bool>* stop) {
    auto stopped = [&] { return stop != nullptr && stop->load(std::memory_order_relaxed); };
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            if (stopped()) return false;
            consume(i, produce(i));
        }
        return true;
    }

    using Result = std::invoke_result_t<Produce&, std::size_t>;
    std::mutex mutex;
    std::condition_variable cv;
    std::map<std::size_t, Result> ready;
    std::size_t next = 0;
    std::size_t consumed = 0;
    bool abort = false;
    std::exception_ptr error;
    const std::size_t window = 2 * static_cast<std::size_t>(workers);

    auto worker = [&] {
        for (;;) {
            std::size_t i = 0;
            {
                std::unique_lock lock(mutex);
                cv.wait(lock, [&] { return abort || next >= count || next < consumed + window; });
                if (abort || next >= count) return;
                i = next++;
            }
            try {
                Result r = produce(i);
                std::lock_guard lock(mutex);
                ready.emplace(i, std::move(r));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                abort = true;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    auto shutdown = [&] {
        {
            std::lock_guard lock(mutex);
            abort = true;
        }
        cv.notify_all();
        for (auto& t : pool) t.join();
        pool.clear();
    };
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

    bool complete = true;
    try {
        for (std::size_t c = 0; c < count; ++c) {
            if (stopped()) {
                complete = false;
                break;
            }
            std::optional<Result> r;
            {
                std::unique_lock lock(mutex);
                cv.wait(lock, [&] { return abort || ready.contains(c); });
                if (error) break;
                auto node = ready.extract(c);
                r.emplace(std::move(node.mapped()));
                ++consumed;
            }
            cv.notify_all();
            consume(c, std::move(*r));
        }
    } catch (...) {
        shutdown();
        throw;
    }
    shutdown();
    if (error) std::rethrow_exception(error);
    return complete;
}

void validate_scan(const Pattern& pattern, std::uint64_t limit, const ScanOptions& options) {
    if (!is_admissible(pattern)) {
        throw InputError("pattern " + pattern.offsets_string() + " is not admissible and cannot be scanned");
    }
    if (limit > kMaxLimit - pattern.span() - 1) {
        throw InputError("scan limit " + std::to_string(limit) + " exceeds 2^63 - 1 minus the pattern span");
    }
    if (options.segment_length < 2 || options.segment_length % 2 != 0 ||
        options.segment_length > kMaxSegmentLength / 2) {
        throw InputError("segment length must be a positive even number up to 2^31, got " +
                         std::to_string(options.segment_length));
    }
    if (options.checkpoint_interval == 0) throw InputError("checkpoint interval must be positive");
}

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::ordered_json checkpoint_json(const ScanCheckpoint& cp) {
    nlohmann::ordered_json j;
    j["version"] = kCheckpointVersion;
    j["pattern_id"] = cp.pattern_id;
    j["offsets"] = cp.offsets;
    j["scanned_to"] = cp.scanned_to;
    j["last_tuple_start"] = cp.last_tuple_start;
    j["current_max_gap"] = cp.current_max_gap;
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : cp.records) {
        records.push_back({{"p_start", r.p_start}, {"p_next", r.p_next}, {"gap", r.gap}});
    }
    j["records"] = std::move(records);
    return j;
}

std::uint64_t get_u64(const nlohmann::json& obj, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end()) throw CheckpointError(std::string("checkpoint lacks field '") + name + "'");
    if (!it->is_number_unsigned()) {
        throw CheckpointError(std::string("checkpoint field '") + name + "' is not a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

} // namespace

std::vector<std::uint64_t> scan_segment(const SieveSegment& segment, const SieveSegment& lookahead,
                                        const Pattern& pattern) {
    if (lookahead.lo() != segment.hi()) {
        throw PreconditionError("lookahead must start where the segment ends (" + std::to_string(segment.hi()) + ")");
    }
    if (lookahead.size() < pattern.span()) {
        throw PreconditionError("lookahead shorter than the pattern span " + std::to_string(pattern.span()));
    }
    std::vector<std::uint64_t> out;
    collect_starts(SieveSegment::concat(segment, lookahead), segment.lo(), segment.hi(), pattern, out);
    return out;
}

std::vector<std::uint64_t> scan_segment(const SieveSegment& segment, const Pattern& pattern,
                                        const BasePrimes& base) {
    std::vector<std::uint64_t> out;
    if (pattern.span() == 0) {
        collect_starts(segment, segment.lo(), segment.hi(), pattern, out);
        return out;
    }
    return scan_segment(segment, sieve_segment(segment.hi(), segment.hi() + pattern.span(), base), pattern);
}

std::vector<std::uint64_t> tuple_starts(const Pattern& pattern, std::uint64_t lo, std::uint64_t hi, Engine engine) {
    if (hi <= lo) return {};
    if (hi - 1 > kMaxLimit - pattern.span() - 1) throw InputError("interval too large for 64-bit scanning");
    const ScanPlan plan(pattern, lo, hi, kDefaultSegmentLength, engine);
    std::vector<std::uint64_t> out;
    std::vector<std::uint64_t> chunk;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        plan.starts(plan[i], chunk);
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

ScanCheckpoint empty_checkpoint(const Pattern& pattern) {
    ScanCheckpoint cp;
    cp.pattern_id = pattern.id();
    cp.offsets.assign(pattern.offsets().begin(), pattern.offsets().end());
    return cp;
}

ScanResult find_maximal_gaps(const Pattern& pattern, std::uint64_t limit, const ScanOptions& options,
                             const std::optional<ScanCheckpoint>& resume) {
    validate_scan(pattern, limit, options);

    ScanResult result;
    ScanCheckpoint& cp = result.checkpoint;
    if (resume) {
        if (resume->pattern_id != pattern.id() ||
            !std::ranges::equal(resume->offsets, pattern.offsets())) {
            throw CheckpointError("checkpoint belongs to pattern '" + resume->pattern_id + "', not '" + pattern.id() +
                                  "'");
        }
        if (limit < resume->scanned_to) {
            throw InputError("limit " + std::to_string(limit) + " lies below the checkpoint frontier " +
                             std::to_string(resume->scanned_to));
        }
        cp = *resume;
    } else {
        cp = empty_checkpoint(pattern);
    }

    const ScanPlan plan(pattern, cp.scanned_to + 1, limit + 1, options.segment_length, options.engine);
    std::uint64_t last_saved = cp.scanned_to;

    auto emit = [&](std::uint64_t p_start, std::uint64_t p_next) {
        const std::uint64_t gap = p_next - p_start;
        if (gap <= cp.current_max_gap) return;
        cp.current_max_gap = gap;
        cp.records.push_back({pattern.id(), p_start, p_next, gap});
        if (options.on_record) options.on_record(cp.records.back());
    };

    auto produce = [&](std::size_t i) {
        thread_local std::vector<std::uint64_t> starts;
        const Chunk chunk = plan[i];
        plan.starts(chunk, starts);
        return summarize(chunk, starts);
    };

    auto consume = [&](std::size_t, ChunkSummary s) {
        if (s.first != 0) {
            if (cp.last_tuple_start != 0) emit(cp.last_tuple_start, s.first);
            for (const auto& [a, b] : s.rising) emit(a, b);
            cp.last_tuple_start = s.last;
        }
        cp.scanned_to = s.hi - 1;
        if (options.on_progress) options.on_progress(cp.scanned_to, limit);
        if (options.checkpoint_path && cp.scanned_to - last_saved >= options.checkpoint_interval) {
            save_checkpoint(cp, *options.checkpoint_path);
            last_saved = cp.scanned_to;
        }
    };

    result.completed = run_ordered(plan.size(), resolve_workers(options.workers), produce, consume, options.stop);
    if (result.completed) cp.scanned_to = limit;
    if (options.checkpoint_path) save_checkpoint(cp, *options.checkpoint_path);
    return result;
}

std::string checkpoint_to_string(const ScanCheckpoint& checkpoint) {
    return checkpoint_json(checkpoint).dump(2) + "\n";
}

ScanCheckpoint checkpoint_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
    if (!j.is_object()) throw CheckpointError("checkpoint is not a JSON object");

    static constexpr const char* kFields[] = {"version",          "pattern_id",      "offsets", "scanned_to",
                                              "last_tuple_start", "current_max_gap", "records"};
    for (const auto& item : j.items()) {
        if (std::ranges::find_if(kFields, [&](const char* f) { return item.key() == f; }) == std::end(kFields)) {
            throw CheckpointError("checkpoint has unknown field '" + item.key() + "'");
        }
    }
    const std::uint64_t version = get_u64(j, "version");
    if (version != kCheckpointVersion) {
        throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
    }

    ScanCheckpoint cp;
    auto id = j.find("pattern_id");
    if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
        throw CheckpointError("checkpoint lacks a pattern_id string");
    }
    cp.pattern_id = id->get<std::string>();

    auto offsets = j.find("offsets");
    if (offsets == j.end() || !offsets->is_array()) throw CheckpointError("checkpoint lacks an offsets array");
    for (const auto& d : *offsets) {
        if (!d.is_number_unsigned()) throw CheckpointError("checkpoint offsets must be non-negative integers");
        cp.offsets.push_back(d.get<std::uint64_t>());
    }
    try {
        Pattern check(cp.pattern_id, cp.offsets);
        if (auto builtin = find_builtin(cp.pattern_id); builtin && !(*builtin == check)) {
            throw CheckpointError("checkpoint offsets do not match built-in pattern " + cp.pattern_id);
        }
    } catch (const InputError& e) {
        throw CheckpointError(std::string("checkpoint pattern is invalid: ") + e.what());
    }

    cp.scanned_to = get_u64(j, "scanned_to");
    cp.last_tuple_start = get_u64(j, "last_tuple_start");
    cp.current_max_gap = get_u64(j, "current_max_gap");

    auto records = j.find("records");
    if (records == j.end() || !records->is_array()) throw CheckpointError("checkpoint lacks a records array");
    for (const auto& r : *records) {
        if (!r.is_object() || r.size() != 3) throw CheckpointError("checkpoint record must hold p_start, p_next, gap");
        GapRecord rec{cp.pattern_id, get_u64(r, "p_start"), get_u64(r, "p_next"), get_u64(r, "gap")};
        if (rec.p_next <= rec.p_start || rec.gap != rec.p_next - rec.p_start) {
            throw CheckpointError("checkpoint record gap is not p_next - p_start");
        }
        if (!cp.records.empty() &&
            (rec.p_start <= cp.records.back().p_start || rec.gap <= cp.records.back().gap)) {
            throw CheckpointError("checkpoint records must have increasing starts and gaps");
        }
        cp.records.push_back(std::move(rec));
    }

    const std::uint64_t max_gap = cp.records.empty() ? 0 : cp.records.back().gap;
    if (cp.current_max_gap != max_gap) throw CheckpointError("checkpoint current_max_gap disagrees with its records");
    if (cp.last_tuple_start > cp.scanned_to) throw CheckpointError("checkpoint last_tuple_start lies past scanned_to");
    if (!cp.records.empty() && cp.last_tuple_start < cp.records.back().p_next) {
        throw CheckpointError("checkpoint last_tuple_start precedes its last record");
    }
    return cp;
}

void save_checkpoint(const ScanCheckpoint& checkpoint, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
        out << checkpoint_to_string(checkpoint);
        out.flush();
        if (!out) throw CheckpointError("failed writing checkpoint " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CheckpointError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

ScanCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return checkpoint_from_string(buffer.str());
}

} // namespace ktgaps
