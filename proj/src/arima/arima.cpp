#include "aircast/arima.hpp"

#include "aircast/optimize.hpp"
#include "aircast/parallel.hpp"
#include "aircast/stationarity.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace aircast::arima {

namespace {

double mean_of(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Largest root modulus of z^k - c_1 z^{k-1} - ... - c_k.
double companion_radius(const std::vector<double>& coefficients) {
    const auto k = static_cast<Eigen::Index>(coefficients.size());
    if (k == 0) {
        return 0.0;
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        companion(0, i) = coefficients[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index i = 1; i < k; ++i) {
        companion(i, i - 1) = 1.0;
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t conditioning(const ArimaSpec& spec, std::size_t condition_on) {
    return std::max(spec.p, condition_on);
}

} // namespace

std::string ArimaSpec::label() const {
    return "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

std::size_t parameter_count(const ArimaSpec& spec, std::size_t n_exog) {
    return (spec.include_intercept ? 1 : 0) + spec.p + spec.q + n_exog;
}

std::vector<double> pack(const ArimaCoefficients& c, const ArimaSpec& spec) {
    std::vector<double> params;
    if (spec.include_intercept) {
        params.push_back(c.intercept);
    }
    params.insert(params.end(), c.ar.begin(), c.ar.end());
    params.insert(params.end(), c.ma.begin(), c.ma.end());
    params.insert(params.end(), c.exog.begin(), c.exog.end());
    return params;
}

ArimaCoefficients unpack(std::span<const double> params, const ArimaSpec& spec, std::size_t n_exog) {
    if (params.size() != parameter_count(spec, n_exog)) {
        throw LengthError("parameter vector has " + std::to_string(params.size()) + " entries, expected " +
                          std::to_string(parameter_count(spec, n_exog)));
    }
    ArimaCoefficients c;
    std::size_t at = 0;
    if (spec.include_intercept) {
        c.intercept = params[at++];
    }
    c.ar.assign(params.begin() + static_cast<std::ptrdiff_t>(at), params.begin() + static_cast<std::ptrdiff_t>(at + spec.p));
    at += spec.p;
    c.ma.assign(params.begin() + static_cast<std::ptrdiff_t>(at), params.begin() + static_cast<std::ptrdiff_t>(at + spec.q));
    at += spec.q;
    c.exog.assign(params.begin() + static_cast<std::ptrdiff_t>(at), params.end());
    return c;
}

std::size_t ArimaFit::parameter_count() const {
    return arima::parameter_count(spec, n_exog) + 1;
}

CssEvaluation css_evaluate(std::span<const double> params, std::span<const double> series,
                           const Eigen::MatrixXd& exog, const ArimaSpec& spec, std::size_t condition_on) {
    const std::size_t n = series.size();
    const auto n_exog = static_cast<std::size_t>(exog.cols());
    if (n_exog > 0 && static_cast<std::size_t>(exog.rows()) != n) {
        throw FeatureMismatchError("exogenous rows do not match the series length");
    }
    const ArimaCoefficients c = unpack(params, spec, n_exog);
    const std::size_t start = conditioning(spec, condition_on);
    if (start >= n) {
        throw LengthError("series too short for the conditioning window");
    }

    Eigen::VectorXd regression = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (n_exog > 0) {
        const Eigen::Map<const Eigen::VectorXd> gamma(c.exog.data(), static_cast<Eigen::Index>(n_exog));
        regression = exog * gamma;
    }

    CssEvaluation out;
    out.start = start;
    out.residuals.assign(n - start, 0.0);
    std::vector<double> e(n, 0.0);
    double rss = 0.0;
    bool finite = true;
    for (std::size_t t = start; t < n; ++t) {
        double predicted = c.intercept + regression(static_cast<Eigen::Index>(t));
        for (std::size_t i = 1; i <= spec.p; ++i) {
            predicted += c.ar[i - 1] * series[t - i];
        }
        for (std::size_t j = 1; j <= spec.q && j <= t - start; ++j) {
            predicted += c.ma[j - 1] * e[t - j];
        }
        e[t] = series[t] - predicted;
        if (!std::isfinite(e[t])) {
            finite = false;
            break;
        }
        out.residuals[t - start] = e[t];
        rss += e[t] * e[t];
    }

    const auto count = static_cast<double>(n - start);
    out.rss = rss;
    out.sigma2 = rss / count;
    if (!finite || !std::isfinite(rss)) {
        out.negative_loglik = std::numeric_limits<double>::infinity();
    } else if (out.sigma2 <= 0.0) {
        // Exact fit: the likelihood is unbounded.
        out.negative_loglik = -std::numeric_limits<double>::infinity();
    } else {
        out.negative_loglik = 0.5 * count * (std::log(2.0 * std::numbers::pi * out.sigma2) + 1.0);
    }
    return out;
}

double css_negative_loglik(std::span<const double> params, std::span<const double> series,
                           const Eigen::MatrixXd& exog, const ArimaSpec& spec, std::size_t condition_on) {
    return css_evaluate(params, series, exog, spec, condition_on).negative_loglik;
}

ArimaFit fit_arima(std::span<const double> train, const Eigen::MatrixXd& exog, const ArimaSpec& spec,
                   const FitOptions& options) {
    const std::size_t n = train.size();
    const auto n_exog = static_cast<std::size_t>(exog.cols());
    if (n <= 10 * (spec.p + spec.q + 1)) {
        throw LengthError(spec.label() + " needs more than " + std::to_string(10 * (spec.p + spec.q + 1)) +
                          " observations, got " + std::to_string(n));
    }
    if (n_exog > 0 && static_cast<std::size_t>(exog.rows()) != n) {
        throw FeatureMismatchError("exogenous rows (" + std::to_string(exog.rows()) +
                                   ") do not match the training length (" + std::to_string(n) + ")");
    }

    const std::vector<double> w = stationarity::difference(train, spec.d);
    const Eigen::MatrixXd x = n_exog > 0 ? Eigen::MatrixXd(exog.bottomRows(static_cast<Eigen::Index>(w.size())))
                                         : Eigen::MatrixXd(static_cast<Eigen::Index>(w.size()), 0);

    // Deterministic start.
    ArimaCoefficients start;
    start.intercept = mean_of(w);
    start.ar.assign(spec.p, 0.1);
    start.ma.assign(spec.q, 0.1);
    start.exog.assign(n_exog, 0.0);
    if (n_exog > 0) {
        Eigen::MatrixXd design(x.rows(), x.cols() + 1);
        design << Eigen::VectorXd::Ones(x.rows()), x;
        const Eigen::Map<const Eigen::VectorXd> response(w.data(), static_cast<Eigen::Index>(w.size()));
        const Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(response);
        for (std::size_t j = 0; j < n_exog; ++j) {
            start.exog[j] = beta(static_cast<Eigen::Index>(j + 1));
        }
        // Mean of the series net of the exogenous part.
        start.intercept = beta(0);
    }
    if (!spec.include_intercept) {
        start.intercept = 0.0;
    }

    const double scale = std::max(stddev_of(w), 1e-6);
    ArimaCoefficients step;
    step.intercept = 0.1 * scale;
    step.ar.assign(spec.p, 0.1);
    step.ma.assign(spec.q, 0.1);
    for (std::size_t j = 0; j < n_exog; ++j) {
        std::vector<double> column(static_cast<std::size_t>(x.rows()));
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            column[static_cast<std::size_t>(r)] = x(r, static_cast<Eigen::Index>(j));
        }
        const double sd = stddev_of(column);
        step.exog.push_back(sd > 0.0 ? 0.1 * scale / sd : 0.1);
    }

    const std::size_t condition_on = conditioning(spec, options.condition_on);
    const optimize::Objective objective = [&](std::span<const double> params) {
        return css_negative_loglik(params, w, x, spec, condition_on);
    };
    optimize::NelderMeadOptions nm;
    nm.max_evaluations = options.max_evaluations;
    nm.f_tolerance = options.tolerance;
    const auto result = optimize::nelder_mead(objective, pack(start, spec), pack(step, spec), nm);

    ArimaFit fit;
    fit.spec = spec;
    fit.n_train = n;
    fit.n_exog = n_exog;
    fit.condition_on = condition_on;
    fit.coefficients = unpack(result.x, spec, n_exog);
    fit.evaluations = result.evaluations;
    fit.converged = result.converged;

    const CssEvaluation eval = css_evaluate(result.x, w, x, spec, condition_on);
    fit.sigma2 = eval.sigma2;
    fit.log_likelihood = -eval.negative_loglik;
    fit.aic = 2.0 * static_cast<double>(fit.parameter_count()) - 2.0 * fit.log_likelihood;
    fit.residuals = eval.residuals;

    fit.differenced_tail.assign(w.end() - static_cast<std::ptrdiff_t>(spec.p), w.end());
    fit.residual_tail.assign(spec.q, 0.0);
    for (std::size_t j = 0; j < spec.q && j < fit.residuals.size(); ++j) {
        fit.residual_tail[spec.q - 1 - j] = fit.residuals[fit.residuals.size() - 1 - j];
    }
    std::vector<double> level(train.begin(), train.end());
    for (std::size_t k = 0; k < spec.d; ++k) {
        fit.level_tail.push_back(level.back());
        level = stationarity::difference(level, 1);
    }

    if (companion_radius(fit.coefficients.ar) >= 1.0) {
        fit.warnings.push_back("AR part is not stationary");
    }
    std::vector<double> negated_ma;
    for (const double phi : fit.coefficients.ma) {
        negated_ma.push_back(-phi);
    }
    if (companion_radius(negated_ma) >= 1.0) {
        fit.warnings.push_back("MA part is not invertible");
    }
    if (!std::isfinite(fit.log_likelihood)) {
        fit.warnings.push_back("non-finite log-likelihood at the optimum");
    }

    if (!result.converged) {
        throw ConvergenceError(spec.label() + ": optimiser did not converge within " +
                                   std::to_string(options.max_evaluations) + " evaluations",
                               std::move(fit));
    }
    return fit;
}

AutoArimaResult auto_arima(std::span<const double> train, const Eigen::MatrixXd& exog, std::size_t p_max,
                           std::size_t q_max, std::size_t d, const AutoArimaOptions& options) {
    struct Slot {
        std::optional<ArimaFit> fit;
        std::string error;
    };
    const std::size_t columns = q_max + 1;
    const std::size_t count = (p_max + 1) * columns;
    std::vector<Slot> slots(count);

    FitOptions fit_options = options.fit;
    fit_options.condition_on = std::max(fit_options.condition_on, p_max);

    parallel_for(count, options.workers, [&](std::size_t index) {
        const ArimaSpec spec{index / columns, d, index % columns, options.include_intercept};
        try {
            slots[index].fit = fit_arima(train, exog, spec, fit_options);
        } catch (const Error& e) {
            slots[index].error = e.what();
            spdlog::warn("auto_arima: skipping {}: {}", spec.label(), e.what());
        }
    });

    AutoArimaResult result;
    std::optional<std::size_t> best;
    for (std::size_t index = 0; index < count; ++index) {
        GridCell cell{index / columns, index % columns, std::nullopt, slots[index].error};
        if (slots[index].fit && std::isfinite(slots[index].fit->aic)) {
            cell.aic = slots[index].fit->aic;
        } else if (slots[index].fit && cell.error.empty()) {
            cell.error = "non-finite AIC";
        }
        if (cell.aic) {
            if (!best) {
                best = index;
            } else {
                const GridCell& incumbent = result.cells[*best];
                const bool better =
                    *cell.aic < *incumbent.aic ||
                    (*cell.aic == *incumbent.aic &&
                     (cell.p + cell.q < incumbent.p + incumbent.q ||
                      (cell.p + cell.q == incumbent.p + incumbent.q && cell.p < incumbent.p)));
                if (better) {
                    best = index;
                }
            }
        }
        result.cells.push_back(std::move(cell));
    }
    if (!best) {
        throw ExhaustionError("auto_arima: every (p, q) cell failed");
    }
    result.best = std::move(*slots[*best].fit);
    return result;
}

std::vector<double> forecast_arima(const ArimaFit& fit, std::size_t horizon, const Eigen::MatrixXd& exog_future) {
    const auto& c = fit.coefficients;
    const auto& spec = fit.spec;
    if (static_cast<std::size_t>(exog_future.cols()) != fit.n_exog) {
        throw FeatureMismatchError("forecast needs " + std::to_string(fit.n_exog) + " exogenous columns, got " +
                                   std::to_string(exog_future.cols()));
    }
    if (fit.n_exog > 0 && static_cast<std::size_t>(exog_future.rows()) != horizon) {
        throw FeatureMismatchError("forecast needs " + std::to_string(horizon) + " exogenous rows, got " +
                                   std::to_string(exog_future.rows()));
    }

    std::vector<double> w(fit.differenced_tail);
    std::vector<double> e(fit.residual_tail);
    const std::size_t w_offset = w.size();
    const std::size_t e_offset = e.size();
    for (std::size_t s = 0; s < horizon; ++s) {
        double value = c.intercept;
        for (std::size_t i = 1; i <= spec.p; ++i) {
            value += c.ar[i - 1] * w[w_offset + s - i];
        }
        for (std::size_t j = 1; j <= spec.q; ++j) {
            value += c.ma[j - 1] * e[e_offset + s - j];
        }
        for (std::size_t k = 0; k < fit.n_exog; ++k) {
            value += c.exog[k] * exog_future(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
        }
        w.push_back(value);
        e.push_back(0.0);
    }

    std::vector<double> path(w.begin() + static_cast<std::ptrdiff_t>(w_offset), w.end());
    for (std::size_t k = spec.d; k-- > 0;) {
        double level = fit.level_tail[k];
        for (double& v : path) {
            level += v;
            v = level;
        }
    }
    return path;
}

} // namespace aircast::arima
