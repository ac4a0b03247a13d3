#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ktgaps {

/// Offsets of a prime constellation: a tuple starts at p when p + d is prime
/// for every offset d. Offsets begin at 0 and strictly ascend.
class Pattern {
public:
    /// Throws InputError unless offsets is non-empty, starts at 0 and strictly ascends.
    Pattern(std::string id, std::vector<std::uint64_t> offsets);

    const std::string& id() const noexcept { return id_; }
    std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
    std::size_t k() const noexcept { return offsets_.size(); }
    std::uint64_t span() const noexcept { return offsets_.back(); }

    /// Offsets joined with commas, e.g. "0,2,6,8".
    std::string offsets_string() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    std::string id_;
    std::vector<std::uint64_t> offsets_;
};

/// The ten densest k-tuplet patterns for k <= 7, ids 1, 2, 3a, 3b, 4, 5a, 5b, 6, 7a, 7b.
const std::vector<Pattern>& builtin_patterns();

std::optional<Pattern> find_builtin(std::string_view id);

/// Built-in pattern by id; InputError for an unknown id.
Pattern builtin_pattern(std::string_view id);

/// Parses a built-in id ("4") or a comma-separated offset list ("0,2,6,8").
/// An offset list equal to a built-in pattern resolves to that pattern;
/// other lists get the id "0-2-6-8". Inadmissible patterns are rejected
/// with an InputError naming the prime whose residues they cover.
Pattern parse_pattern(std::string_view text);

/// parse_pattern, plus "all" for every built-in pattern.
std::vector<Pattern> parse_pattern_selector(std::string_view text);

/// Number of distinct residues the offsets occupy modulo the prime p.
/// InputError if p is not prime.
unsigned residue_count(const Pattern& pattern, std::uint64_t p);

/// The smallest prime p <= k whose residue classes are all covered, if any.
std::optional<std::uint64_t> covering_prime(const Pattern& pattern);

/// True when no prime has all its residue classes covered by the offsets.
bool is_admissible(const Pattern& pattern);

/// The reflected pattern {span - d}, re-sorted.
Pattern mirrored(const Pattern& pattern);

namespace detail {
/// residue_count without the primality check.
unsigned residue_count_unchecked(std::span<const std::uint64_t> offsets, std::uint64_t p);
} // namespace detail

} // namespace ktgaps
