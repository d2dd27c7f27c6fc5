#include "aircast/dataset.hpp"

#include "aircast/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace aircast::dataset {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

// Quoted fields in these files never contain commas, so a plain split suffices.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(unquote(line.substr(start)));
            break;
        }
        fields.push_back(unquote(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::optional<double> parse_real(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto* first = cell.data();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view cell) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        // Accept integral values written as reals, e.g. "2013.0".
        if (auto real = parse_real(cell); real && *real == static_cast<double>(static_cast<long long>(*real))) {
            return static_cast<long long>(*real);
        }
        return std::nullopt;
    }
    return value;
}

bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            return true;
        }
    }
    return false;
}

} // namespace

int WindEncoding::code(std::string_view category) const {
    const auto it = std::lower_bound(categories.begin(), categories.end(), category);
    if (it == categories.end() || *it != category) {
        throw ValidationError("unknown wind direction category '" + std::string(category) + "'");
    }
    return static_cast<int>(it - categories.begin());
}

const std::vector<std::optional<double>>& RawTable::measurement(std::string_view name) const {
    const auto it = std::find(kMeasurementColumns.begin(), kMeasurementColumns.end(), name);
    if (it == kMeasurementColumns.end()) {
        throw SchemaError("no measurement column named '" + std::string(name) + "'");
    }
    return measurements.at(static_cast<std::size_t>(it - kMeasurementColumns.begin()));
}

RawTable parse_station_csv(std::istream& source) {
    std::string line;
    if (!next_line(source, line)) {
        throw EmptyInputError("station file is empty");
    }

    const auto header = split_fields(line);
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        index.emplace(std::string(header[i]), i);
    }
    auto require = [&](std::string_view name) {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw SchemaError("missing required column '" + std::string(name) + "'");
        }
        return it->second;
    };

    const std::size_t col_no = require("No");
    const std::size_t col_year = require("year");
    const std::size_t col_month = require("month");
    const std::size_t col_day = require("day");
    const std::size_t col_hour = require("hour");
    std::vector<std::size_t> col_measure;
    for (const auto name : kMeasurementColumns) {
        col_measure.push_back(require(name));
    }
    const std::size_t col_wd = require("wd");
    const std::size_t col_station = require("station");

    RawTable table;
    table.measurements.resize(kMeasurementColumns.size());

    std::size_t row = 0;
    while (next_line(source, line)) {
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }

        auto integer = [&](std::size_t col, std::string_view name) {
            const auto value = parse_integer(fields[col]);
            if (!value) {
                throw ParseError("row " + std::to_string(row) + ": cannot parse " + std::string(name) + " '" +
                                 std::string(fields[col]) + "'");
            }
            return *value;
        };

        table.record_numbers.push_back(integer(col_no, "No"));
        HourStamp stamp{static_cast<int>(integer(col_year, "year")), static_cast<int>(integer(col_month, "month")),
                        static_cast<int>(integer(col_day, "day")), static_cast<int>(integer(col_hour, "hour"))};
        if (stamp.hour < 0 || stamp.hour > 23) {
            throw ValidationError("row " + std::to_string(row) + ": hour " + std::to_string(stamp.hour) +
                                  " outside [0,23]");
        }
        if (stamp.month < 1 || stamp.month > 12) {
            throw ValidationError("row " + std::to_string(row) + ": month " + std::to_string(stamp.month) +
                                  " outside [1,12]");
        }
        if (!is_valid_date(stamp.year, stamp.month, stamp.day)) {
            throw ValidationError("row " + std::to_string(row) + ": invalid day " + std::to_string(stamp.day));
        }
        if (!table.stamps.empty() && !(table.stamps.back() < stamp)) {
            throw ValidationError("row " + std::to_string(row) + ": timestamps not strictly increasing");
        }
        table.stamps.push_back(stamp);

        for (std::size_t m = 0; m < col_measure.size(); ++m) {
            const auto cell = fields[col_measure[m]];
            if (is_missing(cell)) {
                table.measurements[m].emplace_back(std::nullopt);
                continue;
            }
            const auto value = parse_real(cell);
            if (!value) {
                throw ParseError("row " + std::to_string(row) + ": cannot parse " +
                                 std::string(kMeasurementColumns[m]) + " '" + std::string(cell) + "'");
            }
            table.measurements[m].emplace_back(*value);
        }

        const auto wd = fields[col_wd];
        if (is_missing(wd)) {
            table.wind_direction.emplace_back(std::nullopt);
        } else {
            table.wind_direction.emplace_back(std::string(wd));
        }

        const auto station = fields[col_station];
        if (table.station.empty()) {
            table.station = std::string(station);
        } else if (table.station != station) {
            throw ValidationError("row " + std::to_string(row) + ": station '" + std::string(station) +
                                  "' differs from '" + table.station + "'");
        }
    }

    if (row == 0) {
        throw EmptyInputError("station file has a header but no data rows");
    }
    return table;
}

RawTable read_station_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_station_csv(in);
}

std::string format_number(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buffer, ptr);
}

void write_daily_csv(const DailyDataset& data, std::ostream& out) {
    out << "date," << kTargetColumn;
    for (const auto& name : data.feature_names) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << to_iso(data.dates[i]) << ',' << format_number(data.target[i]);
        for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
            out << ',' << format_number(data.features(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

DailyDataset read_daily_csv(std::istream& in, std::string station) {
    std::string line;
    if (!next_line(in, line)) {
        throw EmptyInputError("daily file is empty");
    }
    const auto header = split_fields(line);
    if (header.size() < 2 || header[0] != "date" || header[1] != kTargetColumn) {
        throw SchemaError("daily file must start with columns date," + std::string(kTargetColumn));
    }

    DailyDataset data;
    data.station = std::move(station);
    for (std::size_t i = 2; i < header.size(); ++i) {
        data.feature_names.emplace_back(header[i]);
    }

    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (next_line(in, line)) {
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": field count mismatch");
        }
        data.dates.push_back(parse_iso(fields[0]));
        std::vector<double> values;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto value = parse_real(fields[i]);
            if (!value) {
                throw ParseError("row " + std::to_string(row) + ": cannot parse '" + std::string(fields[i]) + "'");
            }
            values.push_back(*value);
        }
        data.target.push_back(values[0]);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw EmptyInputError("daily file has a header but no data rows");
    }

    data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j + 1];
        }
    }
    data.validate();
    return data;
}

DailyDataset load_any(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string first;
    std::getline(in, first);
    in.clear();
    in.seekg(0);
    const auto header = split_fields(first);
    if (!header.empty() && header[0] == "date") {
        return read_daily_csv(in, path.stem().string());
    }
    auto table = encode_wind_direction(forward_fill(parse_station_csv(in)));
    return aggregate_daily(table);
}

std::vector<double> read_series_csv(std::istream& in) {
    std::vector<double> series;
    std::string line;
    bool first = true;
    std::size_t row = 0;
    while (next_line(in, line)) {
        ++row;
        const auto fields = split_fields(line);
        const auto cell = fields.back();
        const auto value = parse_real(cell);
        if (!value) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw ParseError("row " + std::to_string(row) + ": cannot parse '" + std::string(cell) + "'");
        }
        first = false;
        series.push_back(*value);
    }
    if (series.empty()) {
        throw EmptyInputError("series file has no values");
    }
    return series;
}

} // namespace aircast::dataset
