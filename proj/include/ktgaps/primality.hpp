#pragma once

#include <cstdint>

namespace ktgaps {

/// Deterministic primality test for the full 64-bit range
/// (Miller-Rabin with the first twelve prime bases).
bool is_prime(std::uint64_t n) noexcept;

/// floor(sqrt(n)) computed exactly.
std::uint64_t isqrt(std::uint64_t n) noexcept;

} // namespace ktgaps
