#pragma once

#include <cstdint>
#include <vector>

#include "ktgaps/pattern.hpp"
#include "ktgaps/sieve.hpp"

namespace ktgaps::detail {

inline constexpr std::uint32_t kWheelModulus = 2 * 3 * 5 * 7 * 11 * 13;

/// Sieves tuple start candidates directly.
///
/// A start p = r + 30030 j survives the wheel when no p + d is divisible by
/// 2..13. For every larger sieving prime q and offset d, the j with
/// p + d = 0 (mod q) form one residue class mod q and are struck out. Above
/// the largest sieving prime no member of a surviving tuple can equal a
/// sieving prime, so survivors are exactly the tuple starts there; min_start()
/// marks that threshold.
class TupleSieve {
public:
    /// `sieve_limit`: largest sieving prime; must satisfy
    /// sieve_limit^2 >= largest start + span and be covered by `base`.
    TupleSieve(const Pattern& pattern, const BasePrimes& base, std::uint64_t sieve_limit,
               std::uint64_t segment_length);

    std::uint64_t min_start() const noexcept { return min_start_; }
    /// Integers covered by one full window.
    std::uint64_t chunk_length() const noexcept { return window_ * kWheelModulus; }
    std::size_t wheel_residues() const noexcept { return residues_.size(); }

    /// Ascending tuple starts in [lo, hi), replacing the contents of `out`.
    /// Requires min_start() <= lo and hi - lo <= chunk_length(). Thread-safe.
    void starts(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t>& out) const;

private:
    std::vector<std::uint32_t> residues_;
    std::vector<std::uint32_t> primes_;
    std::vector<std::uint32_t> inverses_;
    std::vector<std::uint32_t> roots_;
    std::vector<std::uint32_t> root_counts_;
    std::size_t stride_ = 0;
    std::uint64_t min_start_ = 0;
    std::uint64_t window_ = 0;
};

} // namespace ktgaps::detail
