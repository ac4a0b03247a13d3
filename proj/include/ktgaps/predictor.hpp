#pragma once

#include <cstddef>
#include <string>

#include "ktgaps/hlconst.hpp"
#include "ktgaps/records.hpp"

namespace ktgaps {

/// Heuristic size of the largest gap between k-tuples below x.
struct GapForecast {
    std::string pattern_id;
    std::size_t k = 0;
    double x = 0;
    double a = 0;           // average gap C log^k x
    double b = 0;           // 2 / k
    double g_expected = 0;  // a log(x / a) - b a
    double g_bound = 0;     // C log^(k+1) x
};

/// C log^k x; InputError for x < 3.
double average_gap(const HLConstant& constant, double x);

/// C log^(k+1) x; InputError for x < 3.
double gap_bound(const HLConstant& constant, double x);

GapForecast expected_max_gap(const HLConstant& constant, double x);

/// True when record.gap < C log^(k+1)(record.p_next). The bound is taken at
/// the end of the gap. InputError if the record belongs to another pattern.
bool check_bound(const GapRecord& record, const HLConstant& constant);

} // namespace ktgaps
