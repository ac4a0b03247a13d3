#include "ktgaps/sieve.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "ktgaps/error.hpp"
#include "ktgaps/primality.hpp"

namespace ktgaps {
namespace {

// Odd integers are indexed globally by g = (n - 1) / 2. Multiples of the
// presieve primes repeat every 15015 indices, so 15015 words hold 64 full
// periods and any 64-bit window can be read with one shift.
constexpr std::array<std::uint64_t, 5> kPresievePrimes{3, 5, 7, 11, 13};
constexpr std::uint64_t kPresievePeriod = 3 * 5 * 7 * 11 * 13;
constexpr std::uint64_t kPresieveBits = 64 * kPresievePeriod;

const std::vector<std::uint64_t>& presieve_pattern() {
    static const std::vector<std::uint64_t> pattern = [] {
        std::vector<std::uint64_t> words(kPresievePeriod + 1, ~std::uint64_t{0});
        for (std::uint64_t q : kPresievePrimes) {
            // 2g + 1 = 0 (mod q)  <=>  g = (q - 1) / 2 (mod q)
            for (std::uint64_t g = (q - 1) / 2; g < kPresieveBits; g += q) {
                words[g >> 6] &= ~(std::uint64_t{1} << (g & 63));
            }
        }
        words[kPresievePeriod] = words[0];
        return words;
    }();
    return pattern;
}

void clear_bit(std::vector<std::uint64_t>& words, std::uint64_t i) {
    words[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

void set_bit(std::vector<std::uint64_t>& words, std::uint64_t i) {
    words[i >> 6] |= std::uint64_t{1} << (i & 63);
}

std::vector<std::uint32_t> simple_sieve(std::uint64_t limit) {
    std::vector<std::uint8_t> composite(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return primes;
}

} // namespace

bool BasePrimes::covers(std::uint64_t hi) const noexcept {
    __extension__ using u128 = unsigned __int128;
    return static_cast<u128>(limit_) * limit_ >= hi;
}

BasePrimes base_primes(std::uint64_t limit) {
    if (limit < 2 || limit > kMaxBaseLimit) {
        throw InputError("base prime limit must lie in [2, 2^32], got " + std::to_string(limit));
    }
    constexpr std::uint64_t kSimpleLimit = std::uint64_t{1} << 20;
    if (limit <= kSimpleLimit) return BasePrimes(limit, simple_sieve(limit));

    const BasePrimes boot = base_primes(isqrt(limit) + 1);
    std::vector<std::uint32_t> primes;
    constexpr std::uint64_t kChunk = std::uint64_t{1} << 24;
    for (std::uint64_t lo = 0; lo <= limit; lo += kChunk) {
        const std::uint64_t hi = std::min(lo + kChunk, limit + 1);
        sieve_segment(lo, hi, boot).for_each_prime(
            [&](std::uint64_t p) { primes.push_back(static_cast<std::uint32_t>(p)); });
    }
    return BasePrimes(limit, std::move(primes));
}

SieveSegment::SieveSegment(std::uint64_t lo, std::uint64_t hi)
    : lo_(lo), hi_(hi), odd_origin_(lo | 1), odd_count_((hi - (lo | 1) + 1) / 2),
      words_((odd_count_ + 63) / 64, 0) {}

bool SieveSegment::test(std::uint64_t n) const noexcept {
    if ((n & 1) == 0) return n == 2;
    const std::uint64_t i = (n - odd_origin_) >> 1;
    return (words_[i >> 6] >> (i & 63)) & 1;
}

std::uint64_t SieveSegment::count() const noexcept {
    std::uint64_t total = (lo_ <= 2 && 2 < hi_) ? 1 : 0;
    for (std::uint64_t w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::vector<std::uint64_t> SieveSegment::primes() const {
    std::vector<std::uint64_t> out;
    for_each_prime([&](std::uint64_t p) { out.push_back(p); });
    return out;
}

std::uint64_t SieveSegment::odd_bits_at(std::uint64_t pos) const noexcept {
    const std::uint64_t w = pos >> 6;
    const std::uint64_t s = pos & 63;
    const std::uint64_t low = w < words_.size() ? words_[w] : 0;
    if (s == 0) return low;
    const std::uint64_t high = w + 1 < words_.size() ? words_[w + 1] : 0;
    return (low >> s) | (high << (64 - s));
}

SieveSegment SieveSegment::concat(const SieveSegment& a, const SieveSegment& b) {
    if (a.hi_ != b.lo_) {
        throw InputError("concat needs adjacent segments, got [" + std::to_string(a.lo_) + ", " +
                         std::to_string(a.hi_) + ") and [" + std::to_string(b.lo_) + ", " + std::to_string(b.hi_) +
                         ")");
    }
    SieveSegment out(a.lo_, b.hi_);
    std::copy(a.words_.begin(), a.words_.end(), out.words_.begin());
    for (std::size_t i = 0; i < b.words_.size(); ++i) {
        const std::uint64_t pos = a.odd_count_ + 64 * i;
        const std::uint64_t w = pos >> 6;
        const std::uint64_t s = pos & 63;
        out.words_[w] |= b.words_[i] << s;
        if (s != 0 && w + 1 < out.words_.size()) out.words_[w + 1] |= b.words_[i] >> (64 - s);
    }
    return out;
}

SieveSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base) {
    if (hi <= lo) {
        throw InputError("empty sieve interval [" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    if (hi - lo > kMaxSegmentLength) {
        throw InputError("sieve interval longer than 2^32: " + std::to_string(hi - lo));
    }
    if (!base.covers(hi)) {
        throw PreconditionError("base primes up to " + std::to_string(base.limit()) + " cannot sieve up to " +
                                std::to_string(hi));
    }

    SieveSegment seg(lo, hi);
    const std::uint64_t origin = seg.odd_origin_;
    const std::uint64_t n = seg.odd_count_;
    auto& words = seg.words_;
    if (n == 0) return seg;

    const auto& pattern = presieve_pattern();
    std::uint64_t offset = ((origin - 1) / 2) % kPresieveBits;
    std::uint64_t k = offset >> 6;
    const std::uint64_t s = offset & 63;
    for (auto& w : words) {
        w = s == 0 ? pattern[k] : (pattern[k] >> s) | (pattern[k + 1] << (64 - s));
        if (++k == kPresievePeriod) k = 0;
    }
    for (std::uint64_t q : kPresievePrimes) {
        if (origin <= q && q < hi) set_bit(words, (q - origin) / 2);
    }
    if (origin == 1) clear_bit(words, 0);

    for (std::uint32_t q32 : base.primes()) {
        const std::uint64_t q = q32;
        if (q < 17) continue;
        if (q * q >= hi) break;
        std::uint64_t start = std::max(q * q, (origin + q - 1) / q * q);
        if ((start & 1) == 0) start += q;
        for (std::uint64_t i = (start - origin) / 2; i < n; i += q) {
            words[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
        }
    }

    if (n % 64 != 0) words.back() &= (std::uint64_t{1} << (n % 64)) - 1;
    return seg;
}

} // namespace ktgaps
