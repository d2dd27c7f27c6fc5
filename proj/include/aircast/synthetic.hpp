#pragma once

#include "aircast/date.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace aircast::dataset {

struct SyntheticStationOptions {
    std::string station = "Synthetic";
    Date first_day = make_date(2013, 3, 1);
    Date last_day = make_date(2017, 2, 28);
    std::uint64_t seed = 7;
    /// Probability that any single measurement cell is written as NA.
    double missing_rate = 0.01;
};

/// Writes an hourly file in the multi-site station layout (18 columns, "NA"
/// for missing cells). PM2.5 follows a persistent log-normal process with a
/// winter peak and a diurnal cycle; the other pollutants and the weather
/// columns are correlated with it so that exogenous regressors carry signal.
void write_synthetic_station(std::ostream& out, const SyntheticStationOptions& options);

} // namespace aircast::dataset
