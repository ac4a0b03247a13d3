#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "ktgaps/error.hpp"
#include "ktgaps/primality.hpp"
#include "ktgaps/scanner.hpp"
#include "oracle.hpp"

using namespace ktgaps;
using V = std::vector<std::uint64_t>;
namespace fs = std::filesystem;

namespace {

std::vector<GapRecord> recs(const std::string& id, std::initializer_list<std::array<std::uint64_t, 3>> rows) {
    std::vector<GapRecord> out;
    for (const auto& r : rows) out.push_back({id, r[0], r[1], r[2]});
    return out;
}

std::vector<GapRecord> scan(const Pattern& p, std::uint64_t limit, ScanOptions o = {}) {
    std::vector<GapRecord> streamed;
    o.on_record = [&](const GapRecord& r) { streamed.push_back(r); };
    auto result = find_maximal_gaps(p, limit, o);
    REQUIRE(result.completed);
    REQUIRE(streamed == result.checkpoint.records);
    return streamed;
}

fs::path temp_path(const std::string& name) {
    return fs::temp_directory_path() / ("ktgaps_test_" + std::to_string(::getpid()) + "_" + name);
}

} // namespace

TEST_CASE("scan_segment examples") {
    const auto base = base_primes(100);
    const Pattern quad = builtin_pattern("4");
    CHECK(scan_segment(sieve_segment(0, 100, base), quad, base) == V{5, 11});
    CHECK(scan_segment(sieve_segment(0, 50, base), builtin_pattern("2"), base) == V{3, 5, 11, 17, 29, 41});
    for (const auto& p : builtin_patterns()) {
        CHECK(scan_segment(sieve_segment(24, 28, base), p, base).empty());
    }
    // Explicit lookahead form.
    const auto seg = sieve_segment(0, 100, base);
    const auto ahead = sieve_segment(100, 108, base);
    CHECK(scan_segment(seg, ahead, quad) == V{5, 11});
    CHECK_THROWS_AS(scan_segment(seg, sieve_segment(100, 104, base), quad), PreconditionError);
    CHECK_THROWS_AS(scan_segment(seg, sieve_segment(101, 110, base), quad), PreconditionError);
}

TEST_CASE("tuple_starts agrees with trial division") {
    std::mt19937_64 rng(3);
    for (const auto& p : builtin_patterns()) {
        for (Engine e : {Engine::prime_sieve, Engine::tuple_sieve, Engine::automatic}) {
            CHECK(tuple_starts(p, 0, 200'000, e) == oracle::tuple_starts(p.offsets(), 0, 200'000));
            for (int i = 0; i < 5; ++i) {
                const std::uint64_t lo = rng() % 50'000'000;
                const std::uint64_t hi = lo + 1 + rng() % 300'000;
                INFO(p.id() << " [" << lo << "," << hi << ")");
                REQUIRE(tuple_starts(p, lo, hi, e) == oracle::tuple_starts(p.offsets(), lo, hi));
            }
        }
    }
}

TEST_CASE("custom patterns") {
    const Pattern p = parse_pattern("0,4");
    CHECK(tuple_starts(p, 0, 100'000) == oracle::tuple_starts(p.offsets(), 0, 100'000));
    const Pattern q = parse_pattern("0,6,12,18");
    CHECK(tuple_starts(q, 0, 100'000) == oracle::tuple_starts(q.offsets(), 0, 100'000));
}

TEST_CASE("records: twins to 1000") {
    CHECK(scan(builtin_pattern("2"), 1000) ==
          recs("2", {{3, 5, 2}, {5, 11, 6}, {17, 29, 12}, {41, 59, 18}, {71, 101, 30}, {311, 347, 36},
                     {347, 419, 72}, {659, 809, 150}}));
}

TEST_CASE("records: primes to 100") {
    CHECK(scan(builtin_pattern("1"), 100) ==
          recs("1", {{2, 3, 1}, {3, 5, 2}, {7, 11, 4}, {23, 29, 6}, {89, 97, 8}}));
}

TEST_CASE("records: 7a to 10^6") {
    CHECK(scan(builtin_pattern("7a"), 1'000'000) ==
          recs("7a", {{5639, 88799, 83160}, {88799, 284729, 195930}, {284729, 626609, 341880}}));
}

TEST_CASE("records need p_next <= limit") {
    CHECK(scan(builtin_pattern("2"), 808).size() == 7);
    CHECK(scan(builtin_pattern("2"), 809).size() == 8);
    CHECK(scan(builtin_pattern("1"), 2).empty());
    CHECK(scan(builtin_pattern("1"), 3).size() == 1);
    // Fewer than two occurrences: no records, but a valid checkpoint.
    auto r = find_maximal_gaps(builtin_pattern("7a"), 6000);
    CHECK(r.completed);
    CHECK(r.checkpoint.records.empty());
    CHECK(r.checkpoint.last_tuple_start == 5639);
    CHECK(r.checkpoint.scanned_to == 6000);
}

TEST_CASE("oracle equivalence to 10^5 for every pattern") {
    for (const auto& p : builtin_patterns()) {
        INFO(p.id());
        CHECK(scan(p, 100'000) == oracle::maximal_gaps(p.id(), p.offsets(), 100'000));
    }
}

TEST_CASE("stream properties and independent recheck") {
    for (const auto& p : builtin_patterns()) {
        const auto r = scan(p, 100'000'000);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(r[i].gap == r[i].p_next - r[i].p_start);
            if (i > 0) {
                CHECK(r[i].gap > r[i - 1].gap);
                CHECK(r[i].p_start > r[i - 1].p_start);
            }
            for (auto d : p.offsets()) {
                CHECK(is_prime(r[i].p_start + d));
                CHECK(is_prime(r[i].p_next + d));
            }
        }
    }
}

TEST_CASE("segment length, worker count and engine do not change the records") {
    for (const auto& p : builtin_patterns()) {
        INFO(p.id());
        const auto expected = scan(p, 20'000'000);
        for (std::uint64_t seg : {std::uint64_t{1} << 16, std::uint64_t{1} << 22, std::uint64_t{1000}}) {
            for (unsigned w : {1u, 3u}) {
                for (Engine e : {Engine::prime_sieve, Engine::tuple_sieve}) {
                    ScanOptions o;
                    o.segment_length = seg;
                    o.workers = w;
                    o.engine = e;
                    REQUIRE(scan(p, 20'000'000, o) == expected);
                }
            }
        }
    }
}

TEST_CASE("resume equals an uninterrupted scan") {
    for (const auto& p : builtin_patterns()) {
        INFO(p.id());
        const auto full = find_maximal_gaps(p, 10'000'000).checkpoint;
        const auto part = find_maximal_gaps(p, 1'000'000).checkpoint;
        std::vector<GapRecord> fresh;
        ScanOptions o;
        o.on_record = [&](const GapRecord& r) { fresh.push_back(r); };
        const auto resumed = find_maximal_gaps(p, 10'000'000, o, part);
        CHECK(resumed.completed);
        CHECK(resumed.checkpoint == full);
        std::vector<GapRecord> joined = part.records;
        joined.insert(joined.end(), fresh.begin(), fresh.end());
        CHECK(joined == full.records);
    }
}

TEST_CASE("chains of resumes at awkward points") {
    const Pattern p = builtin_pattern("2");
    const auto full = find_maximal_gaps(p, 3'000'000).checkpoint;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::optional<ScanCheckpoint> cp;
        std::uint64_t at = 0;
        while (at < 3'000'000) {
            at = std::min<std::uint64_t>(3'000'000, at + 1 + rng() % 700'000);
            ScanOptions o;
            o.segment_length = 2 * (1 + rng() % 40'000);
            cp = find_maximal_gaps(p, at, o, cp).checkpoint;
        }
        CHECK(*cp == full);
    }
}

TEST_CASE("stop flag interrupts at a chunk boundary and resumes cleanly") {
    const Pattern p = builtin_pattern("3a");
    const auto full = find_maximal_gaps(p, 50'000'000).checkpoint;
    const fs::path path = temp_path("stop.json");
    std::atomic<bool> stop{false};
    ScanOptions o;
    o.segment_length = 1 << 16;
    o.workers = 2;
    o.checkpoint_path = path;
    o.stop = &stop;
    o.on_progress = [&](std::uint64_t done, std::uint64_t limit) {
        if (done >= limit / 2) stop = true;
    };
    const auto first = find_maximal_gaps(p, 50'000'000, o);
    CHECK_FALSE(first.completed);
    CHECK(first.checkpoint.scanned_to < 50'000'000);
    CHECK(first.checkpoint.scanned_to >= 25'000'000);
    const auto loaded = load_checkpoint(path);
    CHECK(loaded == first.checkpoint);
    const auto second = find_maximal_gaps(p, 50'000'000, {}, loaded);
    CHECK(second.completed);
    CHECK(second.checkpoint == full);
    fs::remove(path);
}

TEST_CASE("input validation") {
    const Pattern twin = builtin_pattern("2");
    CHECK_THROWS_AS(find_maximal_gaps(Pattern("x", {0, 2, 4}), 100), InputError);
    ScanOptions odd;
    odd.segment_length = 1001;
    CHECK_THROWS_AS(find_maximal_gaps(twin, 100, odd), InputError);
    ScanOptions zero;
    zero.segment_length = 0;
    CHECK_THROWS_AS(find_maximal_gaps(twin, 100, zero), InputError);
    CHECK_THROWS_AS(find_maximal_gaps(twin, ~std::uint64_t{0}), InputError);

    const auto cp = find_maximal_gaps(twin, 10'000).checkpoint;
    CHECK_THROWS_AS(find_maximal_gaps(builtin_pattern("4"), 20'000, {}, cp), CheckpointError);
    CHECK_THROWS_AS(find_maximal_gaps(twin, 5'000, {}, cp), InputError);
    auto same = find_maximal_gaps(twin, 10'000, {}, cp);
    CHECK(same.completed);
    CHECK(same.checkpoint == cp);
}

TEST_CASE("checkpoint round trip") {
    const Pattern p = builtin_pattern("4");
    const auto cp = find_maximal_gaps(p, 1'000'000).checkpoint;
    CHECK(checkpoint_from_string(checkpoint_to_string(cp)) == cp);
    const auto empty = empty_checkpoint(p);
    CHECK(empty.scanned_to == 0);
    CHECK(checkpoint_from_string(checkpoint_to_string(empty)) == empty);

    const fs::path path = temp_path("rt.json");
    save_checkpoint(cp, path);
    CHECK(load_checkpoint(path) == cp);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    fs::remove(path);
}

TEST_CASE("checkpoint corruption is reported") {
    const Pattern p = builtin_pattern("2");
    const std::string text = checkpoint_to_string(find_maximal_gaps(p, 100'000).checkpoint);
    for (std::size_t cut : {std::size_t{0}, std::size_t{1}, text.size() / 3, text.size() / 2, text.size() - 2}) {
        CHECK_THROWS_AS(checkpoint_from_string(text.substr(0, cut)), CheckpointError);
    }
    auto j = text;
    j.replace(j.find("\"version\": 1"), 12, "\"version\": 2");
    CHECK_THROWS_AS(checkpoint_from_string(j), CheckpointError);

    auto gap = text;
    gap.replace(gap.find("\"gap\": 2"), 8, "\"gap\": 3");
    CHECK_THROWS_AS(checkpoint_from_string(gap), CheckpointError);

    auto extra = text;
    extra.insert(1, "\"bogus\": 1,");
    CHECK_THROWS_AS(checkpoint_from_string(extra), CheckpointError);

    CHECK_THROWS_AS(load_checkpoint(temp_path("does_not_exist.json")), CheckpointError);

    const fs::path path = temp_path("trunc.json");
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
    fs::remove(path);
}

TEST_CASE("periodic checkpoints are written") {
    const fs::path path = temp_path("periodic.json");
    ScanOptions o;
    o.checkpoint_path = path;
    o.checkpoint_interval = 1'000'000;
    const auto r = find_maximal_gaps(builtin_pattern("2"), 5'000'000, o);
    CHECK(load_checkpoint(path) == r.checkpoint);
    fs::remove(path);
}
