#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "ktgaps/pattern.hpp"
#include "ktgaps/sieve.hpp"

namespace ktgaps {

inline constexpr std::uint64_t kDefaultTruncationBound = 10'000'000;
inline constexpr std::uint64_t kMinTruncationBound = 1'000;

/// Truncated singular series of a pattern.
///
/// H = prod_{p <= truncation_bound} (1 - w(p)/p) / (1 - 1/p)^k and C = 1/H,
/// so tuples near x are spaced about C * log^k x apart on average.
/// est_rel_error bounds the relative effect of the omitted primes: past the
/// span each factor is 1 - k(k-1)/(2p^2) + O(p^-3), and the sum of 1/p^2 over
/// primes above B is about 1/(B log B); the estimate doubles that.
struct HLConstant {
    std::string pattern_id;
    std::size_t k = 0;
    double H = 1.0;
    double C = 1.0;
    std::uint64_t truncation_bound = 0;
    double est_rel_error = 0.0;
};

/// InputError if the pattern is inadmissible or the bound is outside [10^3, 2^32].
HLConstant hl_constant(const Pattern& pattern, std::uint64_t truncation_bound = kDefaultTruncationBound);

/// Same, using an existing prime list; the truncation bound is primes.limit().
HLConstant hl_constant(const Pattern& pattern, const BasePrimes& primes);

} // namespace ktgaps
