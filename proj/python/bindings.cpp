#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ktgaps/error.hpp"
#include "ktgaps/hlconst.hpp"
#include "ktgaps/pattern.hpp"
#include "ktgaps/predictor.hpp"
#include "ktgaps/primality.hpp"
#include "ktgaps/reference.hpp"
#include "ktgaps/scanner.hpp"

namespace py = pybind11;
using namespace ktgaps;

namespace {

std::vector<std::uint64_t> offsets_of(const Pattern& p) { return {p.offsets().begin(), p.offsets().end()}; }

std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo) return {};
    const BasePrimes base = base_primes(std::max<std::uint64_t>(2, isqrt(hi - 1) + 1));
    std::vector<std::uint64_t> out;
    for (std::uint64_t a = lo; a < hi; a += std::min<std::uint64_t>(hi - a, kDefaultSegmentLength)) {
        const std::uint64_t b = a + std::min<std::uint64_t>(hi - a, kDefaultSegmentLength);
        sieve_segment(a, b, base).for_each_prime([&](std::uint64_t p) { out.push_back(p); });
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Maximal gaps between prime k-tuplets";

    auto base_error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", base_error.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base_error.ptr());
    py::register_exception<CheckpointError>(m, "CheckpointError", base_error.ptr());

    py::class_<Pattern>(m, "Pattern")
        .def(py::init<std::string, std::vector<std::uint64_t>>(), py::arg("id"), py::arg("offsets"))
        .def_property_readonly("id", &Pattern::id)
        .def_property_readonly("offsets", &offsets_of)
        .def_property_readonly("k", &Pattern::k)
        .def_property_readonly("span", &Pattern::span)
        .def(py::self == py::self)
        .def("__repr__", [](const Pattern& p) { return "Pattern('" + p.id() + "', [" + p.offsets_string() + "])"; });

    py::class_<GapRecord>(m, "GapRecord")
        .def(py::init<std::string, std::uint64_t, std::uint64_t, std::uint64_t>(), py::arg("pattern_id"),
             py::arg("p_start"), py::arg("p_next"), py::arg("gap"))
        .def_readonly("pattern_id", &GapRecord::pattern_id)
        .def_readonly("p_start", &GapRecord::p_start)
        .def_readonly("p_next", &GapRecord::p_next)
        .def_readonly("gap", &GapRecord::gap)
        .def(py::self == py::self)
        .def("__iter__",
             [](const GapRecord& r) { return py::iter(py::make_tuple(r.p_start, r.p_next, r.gap)); })
        .def("__repr__", [](const GapRecord& r) {
            return "GapRecord('" + r.pattern_id + "', " + std::to_string(r.p_start) + ", " +
                   std::to_string(r.p_next) + ", " + std::to_string(r.gap) + ")";
        });

    py::class_<HLConstant>(m, "HLConstant")
        .def_readonly("pattern_id", &HLConstant::pattern_id)
        .def_readonly("k", &HLConstant::k)
        .def_readonly("H", &HLConstant::H)
        .def_readonly("C", &HLConstant::C)
        .def_readonly("truncation_bound", &HLConstant::truncation_bound)
        .def_readonly("est_rel_error", &HLConstant::est_rel_error);

    py::class_<GapForecast>(m, "GapForecast")
        .def_readonly("pattern_id", &GapForecast::pattern_id)
        .def_readonly("k", &GapForecast::k)
        .def_readonly("x", &GapForecast::x)
        .def_readonly("a", &GapForecast::a)
        .def_readonly("b", &GapForecast::b)
        .def_readonly("g_expected", &GapForecast::g_expected)
        .def_readonly("g_bound", &GapForecast::g_bound);

    py::class_<ReferenceTable>(m, "ReferenceTable")
        .def_readonly("pattern_id", &ReferenceTable::pattern_id)
        .def_readonly("source", &ReferenceTable::source)
        .def_readonly("rows", &ReferenceTable::rows);

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("pattern_id", &VerificationReport::pattern_id)
        .def_readonly("limit", &VerificationReport::limit)
        .def_readonly("matched", &VerificationReport::matched)
        .def_readonly("missing", &VerificationReport::missing)
        .def_readonly("extra", &VerificationReport::extra)
        .def_property_readonly("ok", &VerificationReport::ok);

    m.def("builtin_patterns", &builtin_patterns);
    m.def("parse_pattern", &parse_pattern, py::arg("text"));
    m.def("is_admissible", &is_admissible, py::arg("pattern"));
    m.def("residue_count", &residue_count, py::arg("pattern"), py::arg("p"));
    m.def("is_prime", &is_prime, py::arg("n"));
    m.def("primes", &primes_between, py::arg("lo"), py::arg("hi"), py::call_guard<py::gil_scoped_release>(),
          "Primes in [lo, hi).");
    m.def(
        "tuple_starts",
        [](const Pattern& p, std::uint64_t lo, std::uint64_t hi) { return tuple_starts(p, lo, hi); },
        py::arg("pattern"), py::arg("lo"), py::arg("hi"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "find_maximal_gaps",
        [](const Pattern& p, std::uint64_t limit, unsigned workers, std::uint64_t segment_length) {
            ScanOptions o;
            o.workers = workers;
            o.segment_length = segment_length;
            return find_maximal_gaps(p, limit, o).checkpoint.records;
        },
        py::arg("pattern"), py::arg("limit"), py::arg("workers") = 0,
        py::arg("segment_length") = kDefaultSegmentLength, py::call_guard<py::gil_scoped_release>());
    m.def(
        "hl_constant",
        [](const Pattern& p, std::uint64_t bound) { return hl_constant(p, bound); }, py::arg("pattern"),
        py::arg("truncation_bound") = kDefaultTruncationBound, py::call_guard<py::gil_scoped_release>());
    m.def("expected_max_gap", &expected_max_gap, py::arg("constant"), py::arg("x"));
    m.def("check_bound", &check_bound, py::arg("record"), py::arg("constant"));
    m.def(
        "reference_table",
        [](const std::string& id, const std::filesystem::path& dir) { return reference_table(id, dir); },
        py::arg("pattern_id"), py::arg("data_dir"));
    m.def(
        "verify_against_reference",
        [](const std::vector<GapRecord>& computed, const ReferenceTable& table, std::uint64_t limit) {
            return verify_against_reference(computed, table, limit);
        },
        py::arg("computed"), py::arg("table"), py::arg("limit"));
}
