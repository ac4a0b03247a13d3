// End-to-end checks, one PASS/FAIL line each.
// The 10^12 spot-check (AC2) runs only with --long or KTGAPS_LONG_TESTS=1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "ktgaps/cli.hpp"
#include "ktgaps/hlconst.hpp"
#include "ktgaps/pattern.hpp"
#include "ktgaps/predictor.hpp"
#include "ktgaps/primality.hpp"
#include "ktgaps/reference.hpp"
#include "ktgaps/scanner.hpp"
#include "oracle.hpp"

using namespace ktgaps;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* name, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %s: %s [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

// Records of AC1 and AC2, reused by AC4.
std::vector<std::pair<Pattern, std::vector<GapRecord>>> produced;

Outcome table_prefixes() {
    Outcome o;
    std::size_t rows = 0;
    for (const auto& p : builtin_patterns()) {
        const auto records = find_maximal_gaps(p, 1'000'000'000).checkpoint.records;
        const auto rep = verify_against_reference(records, p.id(), 1'000'000'000);
        rows += rep.matched;
        if (!rep.ok()) {
            o.pass = false;
            o.detail += p.id() + " missing " + std::to_string(rep.missing.size()) + " extra " +
                        std::to_string(rep.extra.size()) + "; ";
        }
        produced.emplace_back(p, records);
    }
    const auto& twins = produced[1].second;
    const auto& quads = produced[4].second;
    if (twins.back() != GapRecord{"2", 698542487, 698547257, 4770}) {
        o.pass = false;
        o.detail += "pattern 2 prefix does not end at gap 4770; ";
    }
    if (quads.back().p_start != 628246181 || quads.back().gap != 395520) {
        o.pass = false;
        o.detail += "pattern 4 prefix does not end at 628246181; ";
    }
    o.detail += "10 patterns to 10^9, " + std::to_string(rows) + " rows matched";
    return o;
}

Outcome septuplets_to_1e12() {
    const Pattern p = builtin_pattern("7a");
    ScanOptions opts;
    auto last = std::chrono::steady_clock::now();
    opts.on_progress = [&](std::uint64_t done, std::uint64_t limit) {
        const auto now = std::chrono::steady_clock::now();
        if (now - last > std::chrono::seconds(30)) {
            std::fprintf(stderr, "  AC2 progress %.1f%%\n", 100.0 * static_cast<double>(done) / limit);
            last = now;
        }
    };
    const auto records = find_maximal_gaps(p, 1'000'000'000'000, opts).checkpoint.records;
    produced.emplace_back(p, records);
    const auto rep = verify_against_reference(records, "7a", 1'000'000'000'000);
    const GapRecord target{"7a", 994838839439, 996670266659, 1831427220};
    Outcome o;
    o.pass = rep.ok() && !records.empty() && records.back() == target;
    o.detail = std::to_string(rep.matched) + " rows matched, last (" + std::to_string(records.back().p_start) + ", " +
               std::to_string(records.back().p_next) + ", " + std::to_string(records.back().gap) + ")";
    return o;
}

Outcome constants() {
    const BasePrimes primes = base_primes(kDefaultTruncationBound);
    const std::pair<const char*, double> published[] = {
        {"2", 0.757392}, {"3a", 0.349864}, {"4", 0.240895}, {"5a", 0.0986992}, {"6", 0.0578081}, {"7a", 0.0185281}};
    Outcome o;
    const auto c1 = hl_constant(builtin_pattern("1"), primes);
    if (c1.C != 1.0) {
        o.pass = false;
        o.detail += "C_1 != 1; ";
    }
    double worst = 0;
    for (const auto& [id, value] : published) {
        const double rel = std::abs(hl_constant(builtin_pattern(id), primes).C - value) / value;
        worst = std::max(worst, rel);
        if (rel > 1e-4) {
            o.pass = false;
            o.detail += std::string("C for ") + id + " off by " + std::to_string(rel) + "; ";
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst relative deviation %.2e", worst);
    o.detail += buf;
    return o;
}

Outcome bound_conjecture() {
    const BasePrimes primes = base_primes(kDefaultTruncationBound);
    Outcome o;
    std::size_t checked = 0;
    auto check_all = [&](const Pattern& p, const std::vector<GapRecord>& rows, const char* what) {
        const auto c = hl_constant(p, primes);
        for (const auto& r : rows) {
            ++checked;
            if (!check_bound(r, c)) {
                o.pass = false;
                o.detail += std::string(what) + " " + r.pattern_id + " (" + std::to_string(r.p_start) + ") above bound; ";
            }
        }
    };
    for (const auto& [p, rows] : produced) check_all(p, rows, "scanned");
    for (const auto& p : builtin_patterns()) check_all(p, reference_table(p.id()).rows, "table");
    o.detail += std::to_string(checked) + " records below C log^(k+1) p_next";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    for (const auto& p : builtin_patterns()) {
        const auto fast = find_maximal_gaps(p, 1'000'000).checkpoint.records;
        const auto slow = oracle::maximal_gaps(p.id(), p.offsets(), 1'000'000);
        if (fast != slow) {
            o.pass = false;
            o.detail += p.id() + " differs; ";
        }
    }
    o.detail += "10 patterns to 10^6 against trial division";
    return o;
}

std::string cli_csv(const Pattern& p, std::uint64_t limit, unsigned workers, std::uint64_t segment) {
    cli::RunConfig c;
    c.subcommand = cli::Subcommand::scan;
    c.pattern = p.offsets_string();
    c.limit = limit;
    c.workers = workers;
    c.segment_length = segment;
    c.format = cli::OutputFormat::csv;
    std::ostringstream out;
    std::ostringstream err;
    if (cli::run(c, out, err) != 0) throw std::runtime_error(err.str());
    return out.str();
}

// Stops the scan once half the range is done, then resumes through the CLI.
std::string interrupted_csv(const Pattern& p, std::uint64_t limit) {
    const fs::path cp = fs::temp_directory_path() / ("ktgaps_acceptance_" + std::to_string(::getpid()) + ".json");
    std::atomic<bool> stop{false};
    ScanOptions o;
    o.segment_length = 1 << 16;
    o.checkpoint_path = cp;
    o.stop = &stop;
    o.on_progress = [&](std::uint64_t done, std::uint64_t lim) {
        if (done >= lim / 2) stop = true;
    };
    const auto first = find_maximal_gaps(p, limit, o);
    if (first.completed) throw std::runtime_error("scan was not interrupted");

    cli::RunConfig c;
    c.subcommand = cli::Subcommand::scan;
    c.pattern = p.offsets_string();
    c.limit = limit;
    c.checkpoint_path = cp;
    c.resume = true;
    c.format = cli::OutputFormat::csv;
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(c, out, err);
    fs::remove(cp);
    if (code != 0) throw std::runtime_error(err.str());
    return out.str();
}

Outcome determinism() {
    constexpr std::uint64_t limit = 100'000'000;
    Outcome o;
    for (const auto& p : builtin_patterns()) {
        const std::string base = cli_csv(p, limit, 1, std::uint64_t{1} << 22);
        const bool same = cli_csv(p, limit, 4, std::uint64_t{1} << 22) == base &&
                          cli_csv(p, limit, 1, std::uint64_t{1} << 16) == base &&
                          cli_csv(p, limit, 4, std::uint64_t{1} << 16) == base && interrupted_csv(p, limit) == base;
        if (!same) {
            o.pass = false;
            o.detail += p.id() + " differs; ";
        }
    }
    o.detail += "workers {1,4} x segments {2^16,2^22} + resume, 10 patterns to 10^8";
    return o;
}

Outcome transcription_audit() {
    Outcome o;
    std::size_t rows = 0;
    for (const auto& p : builtin_patterns()) {
        for (const auto& r : reference_table(p.id()).rows) {
            ++rows;
            bool good = r.gap == r.p_next - r.p_start;
            for (auto d : p.offsets()) good = good && is_prime(r.p_start + d) && is_prime(r.p_next + d);
            if (!good) {
                o.pass = false;
                o.detail += p.id() + " row (" + std::to_string(r.p_start) + ") fails; ";
            }
        }
    }
    o.detail += std::to_string(rows) + " rows audited";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    bool long_tests = false;
    if (const char* env = std::getenv("KTGAPS_LONG_TESTS"); env && *env && std::string(env) != "0") long_tests = true;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--long") long_tests = true;
    }

    report("AC1", "table prefixes to 10^9", table_prefixes);
    if (long_tests) {
        report("AC2", "pattern 7a to 10^12", septuplets_to_1e12);
    } else {
        std::printf("SKIP AC2: pattern 7a to 10^12 [enable with --long or KTGAPS_LONG_TESTS=1]\n");
    }
    report("AC3", "singular series constants", constants);
    report("AC4", "record gaps below the conjectured bound", bound_conjecture);
    report("AC5", "trial-division oracle equivalence", oracle_equivalence);
    report("AC6", "determinism and resume", determinism);
    report("AC7", "reference table audit", transcription_audit);
    return failures == 0 ? 0 : 1;
}
