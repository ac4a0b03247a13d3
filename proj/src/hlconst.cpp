#include "ktgaps/hlconst.hpp"

#include <cmath>
#include <string>

#include "ktgaps/error.hpp"

namespace ktgaps {

HLConstant hl_constant(const Pattern& pattern, std::uint64_t truncation_bound) {
    if (truncation_bound < kMinTruncationBound || truncation_bound > kMaxBaseLimit) {
        throw InputError("truncation bound must lie in [1000, 2^32], got " + std::to_string(truncation_bound));
    }
    if (!is_admissible(pattern)) {
        throw InputError("pattern " + pattern.offsets_string() + " is not admissible; its singular series vanishes");
    }
    return hl_constant(pattern, base_primes(truncation_bound));
}

HLConstant hl_constant(const Pattern& pattern, const BasePrimes& primes) {
    if (primes.limit() < kMinTruncationBound) {
        throw InputError("truncation bound must be at least 1000, got " + std::to_string(primes.limit()));
    }
    if (!is_admissible(pattern)) {
        throw InputError("pattern " + pattern.offsets_string() + " is not admissible; its singular series vanishes");
    }

    const std::size_t k = pattern.k();
    const auto offsets = pattern.offsets();
    long double h = 1.0L;
    for (std::uint32_t p32 : primes.primes()) {
        const auto p = static_cast<long double>(p32);
        const unsigned w = detail::residue_count_unchecked(offsets, p32);
        const long double unit = 1.0L - 1.0L / p;
        h *= (1.0L - w / p) / std::pow(unit, static_cast<int>(k));
    }

    HLConstant out;
    out.pattern_id = pattern.id();
    out.k = k;
    out.H = static_cast<double>(h);
    out.C = static_cast<double>(1.0L / h);
    out.truncation_bound = primes.limit();
    const double bound = static_cast<double>(primes.limit());
    out.est_rel_error = static_cast<double>(k * (k - 1)) / (bound * std::log(bound));
    return out;
}

} // namespace ktgaps
