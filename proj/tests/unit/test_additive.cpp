#include "aircast/additive.hpp"
#include "aircast/error.hpp"
#include "aircast/json_io.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace aircast;
using namespace aircast::additive;

namespace {

std::vector<Date> days(Date first, std::size_t n) {
    std::vector<Date> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(first + std::chrono::days(static_cast<int>(i)));
    }
    return out;
}

Eigen::MatrixXd none(std::size_t rows) {
    return Eigen::MatrixXd(static_cast<Eigen::Index>(rows), 0);
}

AdditiveConfig plain() {
    AdditiveConfig c;
    c.yearly_order = 0;
    c.weekly_order = 0;
    return c;
}

} // namespace

TEST_CASE("noiseless line is reproduced exactly") {
    const auto dates = days(make_date(2014, 1, 1), 200);
    std::vector<double> y;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        y.push_back(2.0 + 0.5 * static_cast<double>(i));
    }
    const AdditiveFit fit = fit_additive(dates, y, none(200), {}, AdditiveConfig{});
    CHECK(fit.residual_std < 1e-8);
    CHECK(fit.base_slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.offset == doctest::Approx(2.0).epsilon(1e-9));
    const auto future = days(make_date(2014, 1, 1) + std::chrono::days(200), 10);
    const ForecastResult r = predict_additive(fit, future, none(10));
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(r.point[i] == doctest::Approx(2.0 + 0.5 * static_cast<double>(200 + i)).epsilon(1e-9));
    }
}

TEST_CASE("yearly sinusoid is captured") {
    const auto dates = days(make_date(2013, 3, 1), 3 * 365);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y;
    for (Date d : dates) {
        const double t = static_cast<double>(days_since_epoch(d));
        y.push_back(50.0 + 10.0 * std::sin(2.0 * std::numbers::pi * t / kYearDays) + noise(rng));
    }
    const AdditiveFit fit = fit_additive(dates, y, none(y.size()), {}, AdditiveConfig{});
    const ForecastResult r = predict_additive(fit, dates, none(dates.size()));
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - r.point[i]) * (y[i] - r.point[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    CHECK(1.0 - ss_res / ss_tot > 0.95);
}

TEST_CASE("regressor weight is recovered in target units") {
    const auto dates = days(make_date(2015, 1, 1), 300);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd x(300, 2);
    std::vector<double> y;
    for (Eigen::Index i = 0; i < 300; ++i) {
        x(i, 0) = 40.0 + 10.0 * noise(rng);
        x(i, 1) = 7.0;
        y.push_back(10.0 + 3.0 * x(i, 0) + 0.1 * noise(rng));
    }
    const std::vector<std::string> names{"X", "CONST"};
    const AdditiveFit fit = fit_additive(dates, y, x, names, plain());
    CHECK(fit.regressor_coefficients[0] == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(fit.regressor_coefficients[1] == 0.0);
    CHECK(fit.regressor_means[0] == doctest::Approx(x.col(0).mean()));
}

TEST_CASE("changepoint placement") {
    const auto dates = days(make_date(2015, 1, 1), 100);
    const auto cps = place_changepoints(dates, 4, 0.8);
    REQUIRE(cps.size() == 4);
    CHECK(cps[0] == dates[16]);
    CHECK(cps[1] == dates[32]);
    CHECK(cps[2] == dates[48]);
    CHECK(cps[3] == dates[64]);
    CHECK(place_changepoints(dates, 0, 0.8).empty());
    CHECK_THROWS_AS(place_changepoints(dates, 80, 0.8), ConfigError);
    for (Date c : place_changepoints(dates, 25, 0.8)) {
        CHECK(c < dates[80]);
    }

    AdditiveConfig tight = plain();
    tight.n_changepoints = 100;
    std::vector<double> y(100, 1.0);
    CHECK_THROWS_AS(fit_additive(dates, y, none(100), {}, tight), ConfigError);
}

TEST_CASE("fourier basis values and orthogonality") {
    const std::vector<Date> epoch{make_date(1970, 1, 1)};
    const Eigen::MatrixXd b0 = fourier_basis(epoch, kYearDays, 2);
    CHECK(b0.cols() == 4);
    CHECK(b0(0, 0) == 0.0);
    CHECK(b0(0, 1) == 1.0);
    CHECK(b0(0, 3) == 1.0);

    const auto dates = days(make_date(2016, 5, 3), 7 * 20);
    const Eigen::MatrixXd weekly = fourier_basis(dates, kWeekDays, 3);
    const Eigen::MatrixXd gram = weekly.transpose() * weekly;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        for (Eigen::Index j = 0; j < gram.cols(); ++j) {
            if (i == j) {
                CHECK(gram(i, j) == doctest::Approx(70.0));
            } else {
                CHECK(std::abs(gram(i, j)) < 1e-9);
            }
        }
    }
}

TEST_CASE("trend is continuous at changepoints") {
    const auto dates = days(make_date(2014, 1, 1), 400);
    std::vector<double> y;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double t = static_cast<double>(i);
        y.push_back(i < 200 ? t : 200.0 - 0.5 * (t - 200.0));
    }
    AdditiveConfig c = plain();
    c.trend_flexibility = 10.0;
    const AdditiveFit fit = fit_additive(dates, y, none(y.size()), {}, c);
    for (std::size_t j = 0; j < fit.changepoint_times.size(); ++j) {
        const double s = static_cast<double>((fit.changepoint_times[j] - fit.origin).count());
        CHECK(std::abs(trend_at(fit, s - 1e-9) - trend_at(fit, s + 1e-9)) < 1e-6);
    }
    CHECK(fit.residual_std < 5.0);
}

TEST_CASE("prediction is the sum of its components") {
    const auto dates = days(make_date(2014, 1, 1), 500);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 3.0);
    Eigen::MatrixXd x(500, 1);
    std::vector<double> y;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = noise(rng);
        y.push_back(30.0 + 0.02 * static_cast<double>(i) + 2.0 * x(static_cast<Eigen::Index>(i), 0) + noise(rng));
    }
    const std::vector<std::string> names{"X"};
    const std::vector<Holiday> holidays{{"festival", {dates[10], dates[375]}}};
    for (SeasonalityMode mode : {SeasonalityMode::Additive, SeasonalityMode::Multiplicative}) {
        AdditiveConfig c;
        c.mode = mode;
        const AdditiveFit fit = fit_additive(dates, y, x, names, c, holidays);
        const Decomposition d = decompose(fit, dates, x);
        for (std::size_t i = 0; i < dates.size(); ++i) {
            CHECK(d.point[i] == doctest::Approx(d.trend[i] + d.seasonal[i] + d.regressors[i] + d.holidays[i]));
        }
        CHECK(d.holidays[10] == fit.holiday_effects[0]);
        CHECK(d.holidays[11] == 0.0);
    }
}

TEST_CASE("stronger trend penalty shrinks changepoint adjustments") {
    const auto dates = days(make_date(2014, 1, 1), 365);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<double> y;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double t = static_cast<double>(i);
        y.push_back(20.0 + 10.0 * std::sin(t / 40.0) + noise(rng));
    }
    double previous = INFINITY;
    for (double flexibility : {10.0, 1.0, 0.1, 0.01, 0.001}) {
        AdditiveConfig c = plain();
        c.trend_flexibility = flexibility;
        const AdditiveFit fit = fit_additive(dates, y, none(y.size()), {}, c);
        double norm = 0.0;
        for (double delta : fit.changepoint_deltas) {
            norm += delta * delta;
        }
        CHECK(norm <= previous * (1.0 + 1e-9));
        previous = norm;
    }
}

TEST_CASE("interval width and empirical coverage") {
    CHECK(interval_z(0.95) == doctest::Approx(1.959963985).epsilon(1e-9));
    CHECK(interval_z(0.8) == doctest::Approx(1.281551566).epsilon(1e-9));

    AdditiveFit fit;
    fit.origin = make_date(2016, 1, 1);
    fit.offset = 50.0;
    fit.residual_std = 10.0;
    const std::vector<Date> one{make_date(2016, 1, 2)};
    const ForecastResult r = predict_additive(fit, one, none(1));
    CHECK(r.upper[0] - r.point[0] == doctest::Approx(19.59964).epsilon(1e-6));
    CHECK(r.point[0] - r.lower[0] == doctest::Approx(19.59964).epsilon(1e-6));

    std::size_t covered = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, 2.0);
        const auto dates = days(make_date(2014, 1, 1), 420);
        std::vector<double> y;
        for (Date d : dates) {
            const double t = static_cast<double>(days_since_epoch(d));
            y.push_back(20.0 + 3.0 * std::sin(2.0 * std::numbers::pi * t / kWeekDays) + noise(rng));
        }
        const std::span<const Date> train_dates(dates.data(), 360);
        const std::span<const double> train_y(y.data(), 360);
        AdditiveConfig c;
        c.yearly_order = 0;
        const AdditiveFit f = fit_additive(train_dates, train_y, none(360), {}, c);
        const ForecastResult p = predict_additive(f, std::span<const Date>(dates).subspan(360), none(60));
        for (std::size_t i = 0; i < 60; ++i) {
            covered += (y[360 + i] >= p.lower[i] && y[360 + i] <= p.upper[i]) ? 1 : 0;
            ++total;
        }
    }
    CHECK(static_cast<double>(covered) / static_cast<double>(total) >= 0.90);
}

TEST_CASE("hyperparameter grid") {
    const auto grid = hyperparameter_grid();
    CHECK(grid.size() == 144);
    std::set<std::string> labels;
    for (const auto& c : grid) {
        CHECK_NOTHROW(c.validate());
        labels.insert(c.label());
    }
    CHECK(labels.size() == 144);
}

TEST_CASE("config from JSON keeps defaults and validates") {
    AdditiveConfig c = Json::parse(R"({"n_changepoints": 5, "seasonality_mode": "multiplicative"})").get<AdditiveConfig>();
    CHECK(c.n_changepoints == 5);
    CHECK(c.mode == SeasonalityMode::Multiplicative);
    CHECK(c.yearly_order == AdditiveConfig{}.yearly_order);
    CHECK(c.trend_flexibility == AdditiveConfig{}.trend_flexibility);

    const AdditiveConfig back = Json(c).get<AdditiveConfig>();
    CHECK(back.label() == c.label());

    CHECK_THROWS_AS(Json::parse(R"({"changepoint_range": 1.5})").get<AdditiveConfig>(), ConfigError);
    CHECK_THROWS_AS(Json::parse(R"({"seasonality_mode": "sideways"})").get<AdditiveConfig>(), ConfigError);
    CHECK_THROWS_AS(Json::parse("[1, 2]").get<AdditiveConfig>(), ConfigError);
}

TEST_CASE("in-sample prediction matches the reported residual spread") {
    const auto dates = days(make_date(2014, 6, 1), 250);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 4.0);
    std::vector<double> y;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        y.push_back(60.0 + noise(rng));
    }
    const AdditiveFit fit = fit_additive(dates, y, none(250), {}, AdditiveConfig{});
    const ForecastResult r = predict_additive(fit, dates, none(250));
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss += (y[i] - r.point[i]) * (y[i] - r.point[i]);
    }
    CHECK(fit.residual_std == doctest::Approx(std::sqrt(ss / 250.0)).epsilon(1e-12));
}

TEST_CASE("additive errors") {
    const auto dates = days(make_date(2014, 1, 1), 50);
    std::vector<double> y(50, 1.0);
    CHECK_THROWS_AS(fit_additive(dates, std::vector<double>(49, 1.0), none(49), {}, plain()), LengthError);
    y[3] = NAN;
    CHECK_THROWS_AS(fit_additive(dates, y, none(50), {}, plain()), ValidationError);
    y[3] = 1.0;
    const std::vector<std::string> names{"A"};
    CHECK_THROWS_AS(fit_additive(dates, y, Eigen::MatrixXd::Zero(40, 1), names, plain()), FeatureMismatchError);
    AdditiveConfig bad = plain();
    bad.trend_flexibility = 0.0;
    CHECK_THROWS_AS(fit_additive(dates, y, none(50), {}, bad), ConfigError);

    AdditiveConfig few = plain();
    few.n_changepoints = 3;
    const AdditiveFit fit = fit_additive(dates, y, none(50), {}, few);
    CHECK_THROWS_AS(predict_additive(fit, dates, Eigen::MatrixXd::Zero(50, 2)), FeatureMismatchError);
}
