#include "ktgaps/pattern.hpp"

#include <algorithm>
#include <charconv>

#include "ktgaps/error.hpp"
#include "ktgaps/primality.hpp"

namespace ktgaps {

Pattern::Pattern(std::string id, std::vector<std::uint64_t> offsets)
    : id_(std::move(id)), offsets_(std::move(offsets)) {
    if (offsets_.empty()) throw InputError("pattern '" + id_ + "' has no offsets");
    if (offsets_.front() != 0) throw InputError("pattern '" + id_ + "' must start at offset 0");
    for (std::size_t i = 1; i < offsets_.size(); ++i) {
        if (offsets_[i] <= offsets_[i - 1]) {
            throw InputError("pattern '" + id_ + "' offsets must strictly ascend");
        }
    }
}

std::string Pattern::offsets_string() const {
    std::string out;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        if (i != 0) out += ',';
        out += std::to_string(offsets_[i]);
    }
    return out;
}

const std::vector<Pattern>& builtin_patterns() {
    static const std::vector<Pattern> patterns{
        Pattern("1", {0}),
        Pattern("2", {0, 2}),
        Pattern("3a", {0, 2, 6}),
        Pattern("3b", {0, 4, 6}),
        Pattern("4", {0, 2, 6, 8}),
        Pattern("5a", {0, 2, 6, 8, 12}),
        Pattern("5b", {0, 4, 6, 10, 12}),
        Pattern("6", {0, 4, 6, 10, 12, 16}),
        Pattern("7a", {0, 2, 8, 12, 14, 18, 20}),
        Pattern("7b", {0, 2, 6, 8, 12, 18, 20}),
    };
    return patterns;
}

std::optional<Pattern> find_builtin(std::string_view id) {
    for (const auto& p : builtin_patterns()) {
        if (p.id() == id) return p;
    }
    return std::nullopt;
}

Pattern builtin_pattern(std::string_view id) {
    if (auto p = find_builtin(id)) return *p;
    throw InputError("unknown pattern id '" + std::string(id) + "' (expected 1, 2, 3a, 3b, 4, 5a, 5b, 6, 7a or 7b)");
}

Pattern parse_pattern(std::string_view text) {
    // A lone "0" is the offset list of pattern 1; any other single token is an id.
    if (text.find(',') == std::string_view::npos && text != "0") return builtin_pattern(text);

    std::vector<std::uint64_t> offsets;
    std::string id;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view field = text.substr(pos, comma - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        std::uint64_t value = 0;
        auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
            throw InputError("invalid offset '" + std::string(field) + "' in pattern '" + std::string(text) + "'");
        }
        offsets.push_back(value);
        if (!id.empty()) id += '-';
        id += std::to_string(value);
        pos = comma + 1;
    }

    Pattern pattern(id, offsets);
    for (const auto& p : builtin_patterns()) {
        if (std::ranges::equal(p.offsets(), pattern.offsets())) return p;
    }
    if (auto q = covering_prime(pattern)) {
        throw InputError("pattern " + pattern.offsets_string() + " is not admissible: its offsets cover every residue class mod " +
                         std::to_string(*q) + ", so it has only finitely many occurrences");
    }
    return pattern;
}

std::vector<Pattern> parse_pattern_selector(std::string_view text) {
    if (text == "all") return builtin_patterns();
    return {parse_pattern(text)};
}

namespace detail {

unsigned residue_count_unchecked(std::span<const std::uint64_t> offsets, std::uint64_t p) {
    if (offsets.back() < p) return static_cast<unsigned>(offsets.size());
    std::vector<std::uint64_t> residues;
    residues.reserve(offsets.size());
    for (std::uint64_t d : offsets) residues.push_back(d % p);
    std::ranges::sort(residues);
    return static_cast<unsigned>(std::unique(residues.begin(), residues.end()) - residues.begin());
}

} // namespace detail

unsigned residue_count(const Pattern& pattern, std::uint64_t p) {
    if (!is_prime(p)) throw InputError("residue_count needs a prime modulus, got " + std::to_string(p));
    return detail::residue_count_unchecked(pattern.offsets(), p);
}

std::optional<std::uint64_t> covering_prime(const Pattern& pattern) {
    for (std::uint64_t p = 2; p <= pattern.k(); ++p) {
        if (is_prime(p) && detail::residue_count_unchecked(pattern.offsets(), p) == p) return p;
    }
    return std::nullopt;
}

bool is_admissible(const Pattern& pattern) {
    return !covering_prime(pattern).has_value();
}

Pattern mirrored(const Pattern& pattern) {
    std::vector<std::uint64_t> offsets;
    for (std::uint64_t d : pattern.offsets()) offsets.push_back(pattern.span() - d);
    std::ranges::sort(offsets);
    return Pattern(pattern.id() + "-mirror", std::move(offsets));
}

} // namespace ktgaps
