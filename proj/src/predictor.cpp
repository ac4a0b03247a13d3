#include "ktgaps/predictor.hpp"

#include <cmath>
#include <string>

#include "ktgaps/error.hpp"

namespace ktgaps {
namespace {

void require_x(double x) {
    if (!(x >= 3.0)) throw InputError("forecast needs x >= 3, got " + std::to_string(x));
}

} // namespace

double average_gap(const HLConstant& constant, double x) {
    require_x(x);
    return constant.C * std::pow(std::log(x), static_cast<double>(constant.k));
}

double gap_bound(const HLConstant& constant, double x) {
    require_x(x);
    return constant.C * std::pow(std::log(x), static_cast<double>(constant.k + 1));
}

GapForecast expected_max_gap(const HLConstant& constant, double x) {
    GapForecast f;
    f.pattern_id = constant.pattern_id;
    f.k = constant.k;
    f.x = x;
    f.a = average_gap(constant, x);
    f.b = 2.0 / static_cast<double>(constant.k);
    f.g_expected = f.a * std::log(x / f.a) - f.b * f.a;
    f.g_bound = gap_bound(constant, x);
    return f;
}

bool check_bound(const GapRecord& record, const HLConstant& constant) {
    if (record.pattern_id != constant.pattern_id) {
        throw InputError("record of pattern '" + record.pattern_id + "' checked against the constant of pattern '" +
                         constant.pattern_id + "'");
    }
    return static_cast<double>(record.gap) < gap_bound(constant, static_cast<double>(record.p_next));
}

} // namespace ktgaps
