#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ktgaps {

inline constexpr std::uint64_t kDefaultSegmentLength = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kMaxSegmentLength = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kMaxBaseLimit = std::uint64_t{1} << 32;

/// Every prime up to `limit`, ascending. Immutable once built and safe to
/// share between threads.
class BasePrimes {
public:
    std::uint64_t limit() const noexcept { return limit_; }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }
    std::size_t size() const noexcept { return primes_.size(); }

    /// True when limit^2 >= hi, i.e. the primes can sieve any interval ending below hi.
    bool covers(std::uint64_t hi) const noexcept;

private:
    friend BasePrimes base_primes(std::uint64_t limit);
    BasePrimes(std::uint64_t limit, std::vector<std::uint32_t> primes)
        : limit_(limit), primes_(std::move(primes)) {}

    std::uint64_t limit_;
    std::vector<std::uint32_t> primes_;
};

/// Primality bits for the half-open interval [lo, hi).
///
/// Logically there is one bit per integer; storage keeps one bit per odd
/// integer and answers for 2 and the even numbers directly. Bits beyond the
/// last odd integer of the interval are always zero, so two segments over the
/// same interval compare equal exactly when their bits do.
class SieveSegment {
public:
    std::uint64_t lo() const noexcept { return lo_; }
    std::uint64_t hi() const noexcept { return hi_; }
    std::uint64_t size() const noexcept { return hi_ - lo_; }

    /// Primality of n; n must lie in [lo, hi).
    bool test(std::uint64_t n) const noexcept;

    /// Logical bit i, i.e. primality of lo + i.
    bool operator[](std::uint64_t i) const noexcept { return test(lo_ + i); }

    std::uint64_t count() const noexcept;
    std::vector<std::uint64_t> primes() const;

    template <typename F>
    void for_each_prime(F&& f) const;

    /// First odd integer >= lo; odd bit b stands for odd_origin() + 2*b.
    std::uint64_t odd_origin() const noexcept { return odd_origin_; }
    std::uint64_t odd_count() const noexcept { return odd_count_; }
    std::span<const std::uint64_t> odd_words() const noexcept { return words_; }

    /// 64 odd bits starting at odd bit `pos`; positions past the end read as zero.
    std::uint64_t odd_bits_at(std::uint64_t pos) const noexcept;

    /// Joins [a.lo, a.hi) and [b.lo, b.hi) where a.hi == b.lo.
    static SieveSegment concat(const SieveSegment& a, const SieveSegment& b);

    friend bool operator==(const SieveSegment&, const SieveSegment&) = default;

private:
    friend SieveSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base);
    SieveSegment(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t lo_ = 0;
    std::uint64_t hi_ = 0;
    std::uint64_t odd_origin_ = 0;
    std::uint64_t odd_count_ = 0;
    std::vector<std::uint64_t> words_;
};

/// All primes <= limit. Requires 2 <= limit <= 2^32.
BasePrimes base_primes(std::uint64_t limit);

/// Sieves [lo, hi). Requires hi > lo, hi - lo <= kMaxSegmentLength and
/// base.limit()^2 >= hi.
SieveSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base);

template <typename F>
void SieveSegment::for_each_prime(F&& f) const {
    if (lo_ <= 2 && 2 < hi_) f(std::uint64_t{2});
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits != 0) {
            const auto b = static_cast<std::uint64_t>(std::countr_zero(bits));
            f(odd_origin_ + 2 * (64 * w + b));
            bits &= bits - 1;
        }
    }
}

} // namespace ktgaps
