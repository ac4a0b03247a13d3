#include "tuple_sieve.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace ktgaps::detail {
namespace {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1;
    base %= m;
    while (exp != 0) {
        if (exp & 1) result = result * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

} // namespace

TupleSieve::TupleSieve(const Pattern& pattern, const BasePrimes& base, std::uint64_t sieve_limit,
                       std::uint64_t segment_length)
    : stride_(pattern.k()), min_start_(std::max<std::uint64_t>(sieve_limit + 1, 14)) {
    const auto offsets = pattern.offsets();

    constexpr std::array<std::uint32_t, 6> wheel_primes{2, 3, 5, 7, 11, 13};
    for (std::uint32_t r = 0; r < kWheelModulus; ++r) {
        const bool ok = std::ranges::none_of(wheel_primes, [&](std::uint32_t w) {
            return std::ranges::any_of(offsets, [&](std::uint64_t d) { return (r + d) % w == 0; });
        });
        if (ok) residues_.push_back(r);
    }

    std::vector<std::uint64_t> roots;
    for (std::uint32_t q : base.primes()) {
        if (q < 17) continue;
        if (q > sieve_limit) break;
        const std::uint64_t inv = pow_mod(kWheelModulus, q - 2, q);
        roots.clear();
        for (std::uint64_t d : offsets) {
            const std::uint64_t neg = (q - d % q) % q;
            roots.push_back(neg * inv % q);
        }
        std::ranges::sort(roots);
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

        primes_.push_back(q);
        inverses_.push_back(static_cast<std::uint32_t>(inv));
        root_counts_.push_back(static_cast<std::uint32_t>(roots.size()));
        for (std::size_t i = 0; i < stride_; ++i) {
            roots_.push_back(i < roots.size() ? static_cast<std::uint32_t>(roots[i]) : 0);
        }
    }

    // Each window costs one modular reduction per residue and sieving prime,
    // so it is kept at least as wide as the prime count.
    const std::uint64_t per_residue = residues_.empty() ? 64 : segment_length / residues_.size();
    window_ = std::max<std::uint64_t>({per_residue, primes_.size(), 64});
    window_ = (window_ + 63) / 64 * 64;
}

void TupleSieve::starts(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t>& out) const {
    out.clear();
    if (hi <= lo) return;
    const std::uint64_t j0 = lo / kWheelModulus;
    const std::uint64_t nj = (hi - 1) / kWheelModulus + 1 - j0;
    const std::size_t nwords = (nj + 63) / 64;
    const std::uint64_t tail_mask = nj % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (nj % 64)) - 1;

    std::vector<std::uint32_t> j0_mod(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) j0_mod[i] = static_cast<std::uint32_t>(j0 % primes_[i]);

    std::vector<std::uint64_t> bits(nwords);
    for (std::uint32_t r : residues_) {
        std::fill(bits.begin(), bits.end(), ~std::uint64_t{0});
        bits.back() &= tail_mask;

        for (std::size_t i = 0; i < primes_.size(); ++i) {
            const std::uint64_t q = primes_[i];
            const std::uint64_t shift = (r % q) * std::uint64_t{inverses_[i]} % q;
            const std::uint64_t jm = j0_mod[i];
            const std::uint32_t* roots = &roots_[i * stride_];
            for (std::uint32_t c = 0; c < root_counts_[i]; ++c) {
                // r + 30030 j = -d (mod q)  <=>  j = root - r / 30030 (mod q)
                const std::uint64_t a = roots[c];
                const std::uint64_t t = a >= shift ? a - shift : a + q - shift;
                for (std::uint64_t x = t >= jm ? t - jm : t + q - jm; x < nj; x += q) {
                    bits[x >> 6] &= ~(std::uint64_t{1} << (x & 63));
                }
            }
        }

        for (std::size_t w = 0; w < nwords; ++w) {
            std::uint64_t word = bits[w];
            while (word != 0) {
                const auto b = static_cast<std::uint64_t>(std::countr_zero(word));
                const std::uint64_t p = r + kWheelModulus * (j0 + 64 * w + b);
                if (p >= lo && p < hi) out.push_back(p);
                word &= word - 1;
            }
        }
    }
    std::ranges::sort(out);
}

} // namespace ktgaps::detail
