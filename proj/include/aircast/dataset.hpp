#pragma once

#include "aircast/date.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aircast::dataset {

/// Numeric measurement columns of a station file, in file order. PM2.5 is the target.
inline constexpr std::array<std::string_view, 11> kMeasurementColumns = {
    "PM2.5", "PM10", "SO2", "NO2", "CO", "O3", "TEMP", "PRES", "DEWP", "RAIN", "WSPM"};

/// Daily feature columns in file order (wind direction sits between RAIN and WSPM).
inline constexpr std::array<std::string_view, 11> kFeatureColumns = {
    "PM10", "SO2", "NO2", "CO", "O3", "TEMP", "PRES", "DEWP", "RAIN", "wd", "WSPM"};

inline constexpr std::string_view kTargetColumn = "PM2.5";

struct HourStamp {
    int year = 0;
    int month = 0;
    int day = 0;
    int hour = 0;

    Date date() const { return make_date(year, static_cast<unsigned>(month), static_cast<unsigned>(day)); }
    auto operator<=>(const HourStamp&) const = default;
};

/// Category-to-code mapping for the wind direction column. Codes follow
/// lexicographic order of the category strings, starting at 0.
struct WindEncoding {
    std::vector<std::string> categories;

    int code(std::string_view category) const;
};

/// Hourly records of one station, column-oriented.
struct RawTable {
    std::string station;
    std::vector<long long> record_numbers;
    std::vector<HourStamp> stamps;
    /// One column per entry of kMeasurementColumns; nullopt marks a missing cell.
    std::vector<std::vector<std::optional<double>>> measurements;
    std::vector<std::optional<std::string>> wind_direction;

    /// Populated by encode_wind_direction.
    std::optional<WindEncoding> wind_encoding;
    std::vector<double> wind_codes;

    std::size_t rows() const { return stamps.size(); }
    const std::vector<std::optional<double>>& measurement(std::string_view name) const;
};

/// Daily, gap-free series for one station.
struct DailyDataset {
    std::string station;
    std::vector<Date> dates;
    std::vector<double> target;
    Eigen::MatrixXd features;  // [days x features]
    std::vector<std::string> feature_names;

    std::size_t size() const { return dates.size(); }
    bool empty() const { return dates.empty(); }

    /// Rows [begin, end).
    DailyDataset slice(std::size_t begin, std::size_t end) const;

    /// Throws ValidationError when the invariants do not hold.
    void validate() const;
};

/// Appends b to a; both must share station and feature names.
DailyDataset concatenate(const DailyDataset& a, const DailyDataset& b);

struct SplitBundle {
    DailyDataset train;
    DailyDataset validation;
    DailyDataset test;

    /// train followed by validation: everything before the test period.
    DailyDataset training_block() const { return concatenate(train, validation); }
};

RawTable parse_station_csv(std::istream& source);
RawTable read_station_csv(const std::filesystem::path& path);

RawTable forward_fill(RawTable table);
RawTable encode_wind_direction(RawTable table);
DailyDataset aggregate_daily(const RawTable& table);

/// parse -> fill -> encode -> aggregate.
DailyDataset load_station_daily(const std::filesystem::path& path);

SplitBundle chronological_split(const DailyDataset& data, double train_fraction,
                                double validation_fraction_of_train);

// ---------------------------------------------------------------------------
// Min-max scaling

struct ScalerState {
    std::vector<std::string> labels;
    std::vector<double> min;
    std::vector<double> max;

    std::size_t columns() const { return labels.size(); }
    bool operator==(const ScalerState&) const = default;
};

ScalerState fit_minmax(const Eigen::MatrixXd& data, std::vector<std::string> labels);
ScalerState fit_minmax(std::span<const double> series, std::string label);

/// Degenerate columns (max == min) map to 0 and invert back to min.
Eigen::MatrixXd apply_minmax(const ScalerState& state, const Eigen::MatrixXd& data,
                             std::span<const std::string> labels);
Eigen::MatrixXd invert_minmax(const ScalerState& state, const Eigen::MatrixXd& data,
                              std::span<const std::string> labels);
std::vector<double> apply_minmax(const ScalerState& state, std::span<const double> series,
                                 std::string_view label);
std::vector<double> invert_minmax(const ScalerState& state, std::span<const double> series,
                                  std::string_view label);

// ---------------------------------------------------------------------------
// Daily CSV and sidecar I/O

/// date,PM2.5,<features...>
void write_daily_csv(const DailyDataset& data, std::ostream& out);
DailyDataset read_daily_csv(std::istream& in, std::string station = {});

/// Loads either a raw hourly station file or a daily CSV, deciding by header.
DailyDataset load_any(const std::filesystem::path& path);

/// Single numeric column, optional header line.
std::vector<double> read_series_csv(std::istream& in);

/// Shortest round-trip representation.
std::string format_number(double value);

} // namespace aircast::dataset
