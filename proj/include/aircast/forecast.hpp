#pragma once

#include "aircast/date.hpp"

#include <vector>

namespace aircast {

/// Point forecasts in target units, with optional prediction bounds.
struct ForecastResult {
    std::vector<Date> dates;
    std::vector<double> point;
    std::vector<double> lower;  // empty when no interval was requested
    std::vector<double> upper;

    bool has_interval() const { return !lower.empty(); }
};

} // namespace aircast
