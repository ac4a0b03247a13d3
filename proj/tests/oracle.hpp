// Slow, obviously-correct reference implementations for the tests.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktgaps/records.hpp"

namespace oracle {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d <= n / d; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

inline bool starts_tuple(std::uint64_t p, std::span<const std::uint64_t> offsets) {
    for (auto d : offsets) {
        if (!is_prime(p + d)) return false;
    }
    return true;
}

inline std::vector<std::uint64_t> tuple_starts(std::span<const std::uint64_t> offsets, std::uint64_t lo,
                                               std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = lo; p < hi; ++p) {
        if (starts_tuple(p, offsets)) out.push_back(p);
    }
    return out;
}

inline std::vector<std::uint64_t> primes(std::uint64_t lo, std::uint64_t hi) {
    static const std::uint64_t zero[] = {0};
    return tuple_starts(zero, lo, hi);
}

// Walks every integer up to limit; first gap is a record, later ones must beat the maximum.
inline std::vector<ktgaps::GapRecord> maximal_gaps(const std::string& id, std::span<const std::uint64_t> offsets,
                                                   std::uint64_t limit) {
    std::vector<ktgaps::GapRecord> out;
    std::uint64_t prev = 0;
    bool have_prev = false;
    std::uint64_t best = 0;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (!starts_tuple(p, offsets)) continue;
        if (have_prev && p - prev > best) {
            best = p - prev;
            out.push_back({id, prev, p, best});
        }
        prev = p;
        have_prev = true;
    }
    return out;
}

} // namespace oracle
