#include "ktgaps/cli.hpp"

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktgaps/error.hpp"
#include "ktgaps/hlconst.hpp"
#include "ktgaps/pattern.hpp"
#include "ktgaps/predictor.hpp"
#include "ktgaps/reference.hpp"
#include "ktgaps/scanner.hpp"

namespace ktgaps::cli {
namespace {

using json = nlohmann::ordered_json;

std::string fmt_real(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::uint64_t parse_digits(std::string_view text, std::string_view whole) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
        throw InputError("invalid number '" + std::string(whole) + "'");
    }
    return v;
}

std::uint64_t checked_pow10(std::uint64_t mantissa, std::uint64_t exponent, std::string_view whole) {
    std::uint64_t v = mantissa;
    for (std::uint64_t i = 0; i < exponent; ++i) {
        if (v > std::numeric_limits<std::uint64_t>::max() / 10) throw InputError("number '" + std::string(whole) + "' is too large");
        v *= 10;
    }
    return v;
}

// Writes to the --output file when given, otherwise to the caller's stream.
class Sink {
public:
    Sink(const RunConfig& config, std::ostream& fallback) : out_(&fallback) {
        if (config.output_path) {
            file_ = std::make_unique<std::ofstream>(*config.output_path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw InputError("cannot write output file " + config.output_path->string());
            out_ = file_.get();
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

// Streams records in the chosen format as they arrive.
class RecordWriter {
public:
    RecordWriter(std::ostream& out, OutputFormat format) : out_(out), format_(format) {
        if (format_ == OutputFormat::csv) out_ << kRecordCsvHeader << '\n';
        if (format_ == OutputFormat::text) {
            out_ << std::left << std::setw(8) << "pattern" << std::right << std::setw(22) << "p_start" << std::setw(22)
                 << "p_next" << std::setw(14) << "gap" << '\n';
        }
        if (format_ == OutputFormat::json) out_ << '[';
    }

    void write(const GapRecord& r) {
        switch (format_) {
        case OutputFormat::csv: write_record_csv_row(out_, r); break;
        case OutputFormat::text:
            out_ << std::left << std::setw(8) << r.pattern_id << std::right << std::setw(22) << r.p_start
                 << std::setw(22) << r.p_next << std::setw(14) << r.gap << '\n';
            break;
        case OutputFormat::json: out_ << (count_ == 0 ? "\n  " : ",\n  ") << record_to_json(r); break;
        }
        ++count_;
        out_.flush();
    }

    void finish() {
        if (format_ == OutputFormat::json) out_ << (count_ == 0 ? "]\n" : "\n]\n");
        out_.flush();
    }

private:
    std::ostream& out_;
    OutputFormat format_;
    std::size_t count_ = 0;
};

class Progress {
public:
    Progress(std::ostream& err, std::string id) : err_(err), id_(std::move(id)), last_(clock::now()) {}

    void operator()(std::uint64_t scanned_to, std::uint64_t limit) {
        const auto now = clock::now();
        if (now - last_ < std::chrono::seconds(2)) return;
        last_ = now;
        err_ << "pattern " << id_ << ": scanned to " << scanned_to << " of " << limit << " ("
             << fmt_real(100.0 * static_cast<double>(scanned_to) / static_cast<double>(limit), 3) << "%)\n";
    }

private:
    using clock = std::chrono::steady_clock;
    std::ostream& err_;
    std::string id_;
    clock::time_point last_;
};

ScanOptions scan_options(const RunConfig& config) {
    ScanOptions o;
    o.segment_length = config.segment_length;
    o.workers = config.workers;
    o.checkpoint_path = config.checkpoint_path;
    o.checkpoint_interval = config.checkpoint_interval;
    return o;
}

std::optional<ScanCheckpoint> resume_point(const RunConfig& config) {
    if (!config.resume) return std::nullopt;
    return load_checkpoint(*config.checkpoint_path);
}

int run_scan(const RunConfig& config, const std::vector<Pattern>& patterns, std::ostream& out, std::ostream& err,
             const std::atomic<bool>* stop) {
    Sink sink(config, out);
    RecordWriter writer(sink.stream(), config.format);
    for (const auto& pattern : patterns) {
        auto options = scan_options(config);
        options.stop = stop;
        options.on_record = [&](const GapRecord& r) { writer.write(r); };
        Progress progress(err, pattern.id());
        options.on_progress = std::ref(progress);

        const auto resume = resume_point(config);
        if (resume) {
            for (const auto& r : resume->records) writer.write(r);
        }
        const ScanResult result = find_maximal_gaps(pattern, config.limit, options, resume);
        if (!result.completed) {
            writer.finish();
            err << "interrupted at " << result.checkpoint.scanned_to;
            if (config.checkpoint_path) err << "; resume with --checkpoint " << config.checkpoint_path->string() << " --resume";
            err << '\n';
            return 130;
        }
    }
    writer.finish();
    return 0;
}

int run_verify(const RunConfig& config, const std::vector<Pattern>& patterns, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* stop) {
    std::vector<VerificationReport> reports;
    for (const auto& pattern : patterns) {
        if (!find_builtin(pattern.id())) {
            throw InputError("no reference table for custom pattern " + pattern.offsets_string());
        }
        const ReferenceTable table = reference_table(pattern.id());
        auto options = scan_options(config);
        options.stop = stop;
        Progress progress(err, pattern.id());
        options.on_progress = std::ref(progress);
        const ScanResult result = find_maximal_gaps(pattern, config.limit, options, resume_point(config));
        if (!result.completed) {
            err << "interrupted at " << result.checkpoint.scanned_to << '\n';
            return 130;
        }
        reports.push_back(verify_against_reference(result.checkpoint.records, table, config.limit));
    }

    Sink sink(config, out);
    std::ostream& o = sink.stream();
    bool ok = true;
    auto rows_json = [](const std::vector<GapRecord>& rows) {
        auto arr = json::array();
        for (const auto& r : rows) arr.push_back({{"p_start", r.p_start}, {"p_next", r.p_next}, {"gap", r.gap}});
        return arr;
    };
    if (config.format == OutputFormat::csv) o << "pattern_id,limit,matched,missing,extra,status\n";
    auto arr = json::array();
    for (const auto& r : reports) {
        ok = ok && r.ok();
        const char* status = r.ok() ? "OK" : "MISMATCH";
        switch (config.format) {
        case OutputFormat::csv:
            o << r.pattern_id << ',' << r.limit << ',' << r.matched << ',' << r.missing.size() << ','
              << r.extra.size() << ',' << status << '\n';
            break;
        case OutputFormat::text:
            o << "pattern " << r.pattern_id << ": limit " << r.limit << ", matched " << r.matched << ", missing "
              << r.missing.size() << ", extra " << r.extra.size() << " -> " << status << '\n';
            for (const auto& m : r.missing) o << "  missing " << m.p_start << ' ' << m.p_next << ' ' << m.gap << '\n';
            for (const auto& x : r.extra) o << "  extra   " << x.p_start << ' ' << x.p_next << ' ' << x.gap << '\n';
            break;
        case OutputFormat::json:
            arr.push_back({{"pattern_id", r.pattern_id},
                           {"limit", r.limit},
                           {"matched", r.matched},
                           {"missing", rows_json(r.missing)},
                           {"extra", rows_json(r.extra)},
                           {"ok", r.ok()}});
            break;
        }
    }
    if (config.format == OutputFormat::json) o << arr.dump(2) << '\n';
    return ok ? 0 : 1;
}

int run_constants(const RunConfig& config, const std::vector<Pattern>& patterns, std::ostream& out) {
    const BasePrimes primes = base_primes(config.truncation_bound);
    Sink sink(config, out);
    std::ostream& o = sink.stream();
    auto arr = json::array();
    if (config.format == OutputFormat::csv) o << "pattern_id,k,H,C,truncation_bound,est_rel_error\n";
    if (config.format == OutputFormat::text) {
        o << std::left << std::setw(12) << "pattern" << std::right << std::setw(4) << "k" << std::setw(18) << "H"
          << std::setw(18) << "C" << std::setw(14) << "bound" << std::setw(14) << "est_rel_err" << '\n';
    }
    for (const auto& pattern : patterns) {
        const HLConstant c = hl_constant(pattern, primes);
        switch (config.format) {
        case OutputFormat::csv:
            o << c.pattern_id << ',' << c.k << ',' << fmt_real(c.H, 12) << ',' << fmt_real(c.C, 12) << ','
              << c.truncation_bound << ',' << fmt_real(c.est_rel_error, 3) << '\n';
            break;
        case OutputFormat::text:
            o << std::left << std::setw(12) << c.pattern_id << std::right << std::setw(4) << c.k << std::setw(18)
              << fmt_real(c.H, 12) << std::setw(18) << fmt_real(c.C, 12) << std::setw(14) << c.truncation_bound
              << std::setw(14) << fmt_real(c.est_rel_error, 3) << '\n';
            break;
        case OutputFormat::json:
            arr.push_back({{"pattern_id", c.pattern_id},
                           {"k", c.k},
                           {"H", c.H},
                           {"C", c.C},
                           {"truncation_bound", c.truncation_bound},
                           {"est_rel_error", c.est_rel_error}});
            break;
        }
    }
    if (config.format == OutputFormat::json) o << arr.dump(2) << '\n';
    return 0;
}

int run_predict(const RunConfig& config, const std::vector<Pattern>& patterns, std::ostream& out) {
    const BasePrimes primes = base_primes(config.truncation_bound);
    Sink sink(config, out);
    std::ostream& o = sink.stream();
    auto arr = json::array();

    if (config.records_path) {
        std::ifstream in(*config.records_path);
        if (!in) throw InputError("cannot open record CSV " + config.records_path->string());
        const auto records = read_records_csv(in);
        std::map<std::string, HLConstant> constants;
        for (const auto& p : patterns) constants.emplace(p.id(), hl_constant(p, primes));
        if (config.format == OutputFormat::csv) {
            o << "pattern_id,p_start,p_next,gap,x,a,g_expected,g_bound,gap_over_expected,gap_over_bound,below_bound\n";
        }
        if (config.format == OutputFormat::text) {
            o << std::left << std::setw(8) << "pattern" << std::right << std::setw(22) << "p_start" << std::setw(14)
              << "gap" << std::setw(16) << "g_expected" << std::setw(16) << "g_bound" << std::setw(10) << "gap/exp"
              << std::setw(10) << "gap/bnd" << "  (x = p_next)\n";
        }
        for (const auto& r : records) {
            auto it = constants.find(r.pattern_id);
            if (it == constants.end()) {
                it = constants.emplace(r.pattern_id, hl_constant(parse_pattern(r.pattern_id), primes)).first;
            }
            const GapForecast f = expected_max_gap(it->second, static_cast<double>(r.p_next));
            const double gap = static_cast<double>(r.gap);
            const bool below = check_bound(r, it->second);
            switch (config.format) {
            case OutputFormat::csv:
                o << r.pattern_id << ',' << r.p_start << ',' << r.p_next << ',' << r.gap << ',' << r.p_next << ','
                  << fmt_real(f.a) << ',' << fmt_real(f.g_expected) << ',' << fmt_real(f.g_bound) << ','
                  << fmt_real(gap / f.g_expected, 6) << ',' << fmt_real(gap / f.g_bound, 6) << ','
                  << (below ? "true" : "false") << '\n';
                break;
            case OutputFormat::text:
                o << std::left << std::setw(8) << r.pattern_id << std::right << std::setw(22) << r.p_start
                  << std::setw(14) << r.gap << std::setw(16) << fmt_real(f.g_expected, 8) << std::setw(16)
                  << fmt_real(f.g_bound, 8) << std::setw(10) << fmt_real(gap / f.g_expected, 4) << std::setw(10)
                  << fmt_real(gap / f.g_bound, 4) << (below ? "" : "  ABOVE BOUND") << '\n';
                break;
            case OutputFormat::json:
                arr.push_back({{"pattern_id", r.pattern_id},
                               {"p_start", r.p_start},
                               {"p_next", r.p_next},
                               {"gap", r.gap},
                               {"x", r.p_next},
                               {"a", f.a},
                               {"g_expected", f.g_expected},
                               {"g_bound", f.g_bound},
                               {"gap_over_expected", gap / f.g_expected},
                               {"gap_over_bound", gap / f.g_bound},
                               {"below_bound", below}});
                break;
            }
        }
    } else {
        const double x = static_cast<double>(*config.x);
        if (config.format == OutputFormat::csv) o << "pattern_id,k,x,C,a,b,g_expected,g_bound\n";
        if (config.format == OutputFormat::text) {
            o << std::left << std::setw(12) << "pattern" << std::right << std::setw(4) << "k" << std::setw(14) << "C"
              << std::setw(16) << "a" << std::setw(10) << "b" << std::setw(16) << "g_expected" << std::setw(16)
              << "g_bound" << '\n';
        }
        for (const auto& p : patterns) {
            const GapForecast f = expected_max_gap(hl_constant(p, primes), x);
            const double c = f.a / std::pow(std::log(x), static_cast<double>(f.k));
            switch (config.format) {
            case OutputFormat::csv:
                o << f.pattern_id << ',' << f.k << ',' << *config.x << ',' << fmt_real(c) << ',' << fmt_real(f.a) << ','
                  << fmt_real(f.b) << ',' << fmt_real(f.g_expected) << ',' << fmt_real(f.g_bound) << '\n';
                break;
            case OutputFormat::text:
                o << std::left << std::setw(12) << f.pattern_id << std::right << std::setw(4) << f.k << std::setw(14)
                  << fmt_real(c, 7) << std::setw(16) << fmt_real(f.a, 8) << std::setw(10) << fmt_real(f.b, 4)
                  << std::setw(16) << fmt_real(f.g_expected, 8) << std::setw(16) << fmt_real(f.g_bound, 8) << '\n';
                break;
            case OutputFormat::json:
                arr.push_back({{"pattern_id", f.pattern_id},
                               {"k", f.k},
                               {"x", *config.x},
                               {"C", c},
                               {"a", f.a},
                               {"b", f.b},
                               {"g_expected", f.g_expected},
                               {"g_bound", f.g_bound}});
                break;
            }
        }
    }
    if (config.format == OutputFormat::json) o << arr.dump(2) << '\n';
    return 0;
}

} // namespace

std::uint64_t parse_count(std::string_view text) {
    const std::string_view whole = text;
    if (auto x = text.find_first_of("xX*"); x != std::string_view::npos) {
        const std::uint64_t mantissa = parse_digits(text.substr(0, x), whole);
        const std::string_view rest = text.substr(x + 1);
        if (rest.substr(0, 3) != "10^") throw InputError("invalid number '" + std::string(whole) + "'");
        return checked_pow10(mantissa, parse_digits(rest.substr(3), whole), whole);
    }
    if (text.substr(0, 3) == "10^") return checked_pow10(1, parse_digits(text.substr(3), whole), whole);
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        return checked_pow10(parse_digits(text.substr(0, e), whole), parse_digits(text.substr(e + 1), whole), whole);
    }
    return parse_digits(text, whole);
}

void validate(const RunConfig& config) {
    const bool scans = config.subcommand == Subcommand::scan || config.subcommand == Subcommand::verify;
    if (scans && config.limit < 2) throw InputError("--limit must be at least 2");
    if (config.workers < 1) throw InputError("--workers must be at least 1");
    if (config.segment_length == 0 || config.segment_length % 2 != 0) {
        throw InputError("--segment-length must be a positive multiple of 2");
    }
    if (config.resume && !config.checkpoint_path) throw InputError("--resume needs --checkpoint");
    if (config.checkpoint_path && config.pattern == "all" && scans) {
        throw InputError("--checkpoint needs a single --pattern");
    }
    if (config.subcommand == Subcommand::predict && !config.x && !config.records_path) {
        throw InputError("predict needs --x or a record CSV");
    }
    if (config.x && *config.x < 3) throw InputError("--x must be at least 3");
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& exit_code) {
    RunConfig config;
    std::string pattern;
    std::string limit;
    std::string segment_length = "4194304";
    std::string checkpoint_interval = "10000000000";
    std::string truncation_bound = "10000000";
    std::string x;
    std::string format = "text";
    std::string checkpoint;
    std::string output;
    std::string records;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());

    CLI::App app{"Maximal gaps between prime k-tuplets"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool scanning) {
        sub->add_option("--pattern", pattern, "Built-in id (1 2 3a 3b 4 5a 5b 6 7a 7b), offsets like 0,2,6,8, or all");
        sub->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
        sub->add_option("--output", output, "Write results to this file instead of stdout");
        if (scanning) {
            sub->add_option("--limit", limit, "Largest tuple start to consider (accepts 1e9, 10^9)")->required();
            sub->add_option("--segment-length", segment_length, "Sieve segment length");
            sub->add_option("--workers", workers, "Sieving threads");
            sub->add_option("--checkpoint", checkpoint, "Checkpoint file");
            sub->add_flag("--resume", config.resume, "Continue from --checkpoint");
            sub->add_option("--checkpoint-interval", checkpoint_interval, "Integers scanned between checkpoints");
        }
    };

    auto* scan = app.add_subcommand("scan", "Stream maximal gaps up to --limit");
    add_common(scan, true);
    auto* verify = app.add_subcommand("verify", "Scan and compare with the published tables");
    add_common(verify, true);
    auto* constants = app.add_subcommand("constants", "Print singular series H and density coefficient C");
    add_common(constants, false);
    constants->add_option("--truncation-bound", truncation_bound, "Largest prime in the truncated product");
    auto* predict = app.add_subcommand("predict", "Evaluate the expected record gap and the conjectured bound");
    add_common(predict, false);
    predict->add_option("--x", x, "Evaluation point");
    predict->add_option("--truncation-bound", truncation_bound, "Largest prime in the truncated product");
    predict->add_option("records", records, "Record CSV (pattern_id,p_start,p_next,gap) to evaluate at each p_next");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        exit_code = app.exit(e, out, err);
        return std::nullopt;
    }

    try {
        if (scan->parsed()) config.subcommand = Subcommand::scan;
        if (verify->parsed()) config.subcommand = Subcommand::verify;
        if (constants->parsed()) config.subcommand = Subcommand::constants;
        if (predict->parsed()) config.subcommand = Subcommand::predict;

        if (pattern.empty()) {
            if (config.subcommand == Subcommand::scan || config.subcommand == Subcommand::verify) {
                throw InputError("--pattern is required");
            }
            pattern = "all";
        }
        config.pattern = pattern;
        if (!limit.empty()) config.limit = parse_count(limit);
        config.segment_length = parse_count(segment_length);
        config.checkpoint_interval = parse_count(checkpoint_interval);
        config.truncation_bound = parse_count(truncation_bound);
        if (!x.empty()) config.x = parse_count(x);
        config.workers = workers;
        config.format = format == "csv" ? OutputFormat::csv : format == "json" ? OutputFormat::json : OutputFormat::text;
        if (!checkpoint.empty()) config.checkpoint_path = checkpoint;
        if (!output.empty()) config.output_path = output;
        if (!records.empty()) config.records_path = records;
        validate(config);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        exit_code = 2;
        return std::nullopt;
    }
    exit_code = 0;
    return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
    try {
        validate(config);
        const auto patterns = parse_pattern_selector(config.pattern);
        switch (config.subcommand) {
        case Subcommand::scan: return run_scan(config, patterns, out, err, stop);
        case Subcommand::verify: return run_verify(config, patterns, out, err, stop);
        case Subcommand::constants: return run_constants(config, patterns, out);
        case Subcommand::predict: return run_predict(config, patterns, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace ktgaps::cli
