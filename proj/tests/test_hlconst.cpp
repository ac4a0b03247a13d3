#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ktgaps/error.hpp"
#include "ktgaps/hlconst.hpp"
#include "ktgaps/pattern.hpp"

using namespace ktgaps;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const BasePrimes& primes_1e7() {
    static const BasePrimes b = base_primes(kDefaultTruncationBound);
    return b;
}

} // namespace

TEST_CASE("single primes have C = 1") {
    const auto c = hl_constant(builtin_pattern("1"), primes_1e7());
    CHECK(c.C == 1.0);
    CHECK(c.H == 1.0);
    CHECK(c.k == 1);
}

TEST_CASE("published constants") {
    const std::pair<const char*, double> expected[] = {{"2", 0.757392},  {"3a", 0.349864}, {"3b", 0.349864},
                                                       {"4", 0.240895},  {"5a", 0.0986992}, {"5b", 0.0986992},
                                                       {"6", 0.0578081}, {"7a", 0.0185281}, {"7b", 0.0185281}};
    for (const auto& [id, value] : expected) {
        const auto c = hl_constant(builtin_pattern(id), primes_1e7());
        INFO(id);
        CHECK(rel(c.C, value) < 1e-4);
        CHECK(std::abs(c.C * c.H - 1.0) < 1e-12);
        CHECK(c.H >= 1.0);
        CHECK(c.truncation_bound == kDefaultTruncationBound);
        CHECK(c.pattern_id == id);
    }
}

TEST_CASE("mirror patterns are bit-identical") {
    CHECK(hl_constant(builtin_pattern("3a"), primes_1e7()).C == hl_constant(builtin_pattern("3b"), primes_1e7()).C);
    CHECK(hl_constant(builtin_pattern("5a"), primes_1e7()).H == hl_constant(builtin_pattern("5b"), primes_1e7()).H);
    CHECK(hl_constant(builtin_pattern("7a"), primes_1e7()).C == hl_constant(builtin_pattern("7b"), primes_1e7()).C);
}

TEST_CASE("monotone refinement") {
    for (std::uint64_t b : {1'000ull, 10'000ull, 100'000ull, 1'000'000ull}) {
        for (const auto& p : builtin_patterns()) {
            const auto lo = hl_constant(p, b);
            const auto hi = hl_constant(p, 10 * b);
            INFO(p.id() << " at " << b);
            CHECK(rel(hi.C, lo.C) <= lo.est_rel_error);
        }
    }
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(hl_constant(Pattern("x", {0, 2, 4})), InputError);
    CHECK_THROWS_AS(hl_constant(builtin_pattern("2"), 999), InputError);
    CHECK_THROWS_AS(hl_constant(builtin_pattern("2"), (1ull << 32) + 1), InputError);
}

TEST_CASE("custom pattern") {
    // {0,6}: sexy prime pairs have twice the twin constant.
    const auto twin = hl_constant(builtin_pattern("2"), primes_1e7());
    const auto sexy = hl_constant(parse_pattern("0,6"), primes_1e7());
    CHECK(rel(sexy.H, 2 * twin.H) < 1e-12);
}
