#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace bifurcation {

/// Exponents beyond this magnitude are treated as saturated.
inline constexpr double kSaturationLog = 700.0;

/// log(sum exp(x_i)); terms equal to -inf contribute nothing.
inline double log_sum_exp(std::initializer_list<double> terms) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double t : terms) peak = std::max(peak, t);
    if (peak == -std::numeric_limits<double>::infinity()) return peak;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

/// log(p) with log(0) = -inf.
inline double safe_log(double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace bifurcation
