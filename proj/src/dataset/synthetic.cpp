#include "aircast/synthetic.hpp"

#include "aircast/dataset.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace aircast::dataset {

namespace {

constexpr std::array<const char*, 16> kCompass = {"N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE",
                                                  "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW"};

std::string fixed(double value, int digits) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

} // namespace

void write_synthetic_station(std::ostream& out, const SyntheticStationOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    out << "No,year,month,day,hour,PM2.5,PM10,SO2,NO2,CO,O3,TEMP,PRES,DEWP,RAIN,wd,WSPM,station\n";

    auto cell = [&](double value, int digits) {
        return uniform(rng) < options.missing_rate ? std::string("NA") : fixed(value, digits);
    };

    double log_level = std::log(70.0);
    double wind_state = 0.0;
    long long record = 0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (Date day = options.first_day; day <= options.last_day; day += std::chrono::days{1}) {
        const std::chrono::year_month_day ymd{day};
        const double t = static_cast<double>(days_since_epoch(day));
        // Peak around mid-January, trough in summer.
        const double season = std::cos(two_pi * (t - 14.0) / 365.25);
        const double weekly = 0.05 * std::sin(two_pi * t / 7.0);
        const double mean_log = std::log(60.0) + 0.35 * season + weekly;
        log_level = mean_log + 0.6 * (log_level - mean_log) + 0.45 * normal(rng);
        wind_state = 0.7 * wind_state + 0.7 * normal(rng);

        const double temp_day = 13.0 - 15.0 * season + 2.0 * normal(rng);
        const double pres_day = 1012.0 + 10.0 * season + 3.0 * normal(rng);
        const double dewp_day = temp_day - 12.0 + 3.0 * normal(rng);
        // Coarse dust varies day to day, so PM10 only partly explains PM2.5.
        const double coarse_ratio = std::max(1.0, 1.35 + 0.3 * normal(rng));
        const double dust = 20.0 * std::exp(0.8 * normal(rng));
        const double traffic = std::exp(0.3 * normal(rng));

        for (int hour = 0; hour < 24; ++hour) {
            ++record;
            const double diurnal = 0.15 * std::cos(two_pi * (hour - 22.0) / 24.0);
            const double pm25 = std::max(2.0, std::exp(log_level + diurnal + 0.15 * normal(rng)));
            const double pm10 = pm25 * (coarse_ratio + 0.1 * normal(rng)) + dust;
            const double so2 = std::max(1.0, 4.0 + 10.0 * std::max(0.0, season) + 0.05 * pm25 + 2.0 * normal(rng));
            const double no2 = std::max(2.0, 25.0 * traffic + 0.2 * pm25 + 8.0 * normal(rng));
            const double co = std::max(100.0, 300.0 * traffic + 8.0 * pm25 * traffic + 100.0 * normal(rng));
            const double temp = temp_day + 4.0 * std::cos(two_pi * (hour - 15.0) / 24.0);
            const double o3 = std::max(1.0, 30.0 + 2.5 * (temp - 10.0) - 0.1 * pm25 + 10.0 * normal(rng));
            const double rain = uniform(rng) < 0.04 ? 2.0 * uniform(rng) : 0.0;
            const double wspm = std::max(0.0, 1.8 + 0.5 * wind_state - 0.004 * pm25 + 0.4 * normal(rng));
            const auto wd_index = static_cast<std::size_t>(
                std::lround(8.0 + 3.0 * wind_state + 1.5 * normal(rng)) & 15L);

            out << record << ',' << static_cast<int>(ymd.year()) << ',' << static_cast<unsigned>(ymd.month()) << ','
                << static_cast<unsigned>(ymd.day()) << ',' << hour << ',' << cell(pm25, 1) << ','
                << cell(pm10, 1) << ',' << cell(so2, 1) << ',' << cell(no2, 1) << ',' << cell(co, 0) << ','
                << cell(o3, 1) << ',' << cell(temp, 1) << ',' << cell(pres_day, 1) << ','
                << cell(dewp_day, 1) << ',' << cell(rain, 1) << ','
                << (uniform(rng) < options.missing_rate ? "NA" : kCompass[wd_index]) << ','
                << cell(wspm, 1) << ',' << options.station << '\n';
        }
    }
}

} // namespace aircast::dataset
