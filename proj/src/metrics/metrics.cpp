#include "aircast/metrics.hpp"

#include "aircast/error.hpp"

#include <cmath>
#include <string>

namespace aircast::metrics {

namespace {

constexpr std::size_t kPairwiseThreshold = 10000;

double pairwise(std::span<const double> values) {
    if (values.size() <= 128) {
        double sum = 0.0;
        for (const double v : values) {
            sum += v;
        }
        return sum;
    }
    const auto half = values.size() / 2;
    return pairwise(values.first(half)) + pairwise(values.subspan(half));
}

template <typename F>
double sum_over(const EvalInputs& in, F&& term) {
    std::vector<double> terms(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        terms[i] = term(in.actual[i], in.predicted[i]);
    }
    return stable_sum(terms);
}

} // namespace

EvalInputs::EvalInputs(std::span<const double> actual_values, std::span<const double> predicted_values)
    : actual(actual_values), predicted(predicted_values) {
    if (actual.size() != predicted.size()) {
        throw LengthError("actual and predicted differ in length (" + std::to_string(actual.size()) + " vs " +
                          std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) {
        throw LengthError("metrics need at least one value");
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
            throw ValidationError("non-finite value at index " + std::to_string(i));
        }
    }
}

double stable_sum(std::span<const double> values) {
    if (values.size() > kPairwiseThreshold) {
        return pairwise(values);
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum;
}

double rmse(const EvalInputs& in) {
    const double sse = sum_over(in, [](double x, double y) { return (x - y) * (x - y); });
    return std::sqrt(sse / static_cast<double>(in.size()));
}

double mae(const EvalInputs& in) {
    return sum_over(in, [](double x, double y) { return std::abs(x - y); }) / static_cast<double>(in.size());
}

double mape(const EvalInputs& in, const MapeOptions& options) {
    std::vector<double> terms;
    terms.reserve(in.size());
    std::vector<std::size_t> offending;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (std::abs(in.actual[i]) <= options.epsilon_guard) {
            offending.push_back(i);
            continue;
        }
        terms.push_back(std::abs(in.actual[i] - in.predicted[i]) / std::abs(in.actual[i]));
    }
    if (!offending.empty() && options.policy == ZeroActualPolicy::Error) {
        std::string list;
        for (std::size_t k = 0; k < offending.size() && k < 20; ++k) {
            list += (k ? "," : "") + std::to_string(offending[k]);
        }
        if (offending.size() > 20) {
            list += ",...";
        }
        throw ZeroDenominatorError("mape: actual value near zero at indices " + list);
    }
    if (options.excluded) {
        *options.excluded = offending.size();
    }
    if (terms.empty()) {
        throw ZeroDenominatorError("mape: every actual value was excluded");
    }
    return 100.0 * stable_sum(terms) / static_cast<double>(terms.size());
}

double rrse(const EvalInputs& in) {
    const double mean = stable_sum(in.actual) / static_cast<double>(in.size());
    const double numerator = sum_over(in, [](double x, double y) { return (y - x) * (y - x); });
    const double denominator = sum_over(in, [mean](double x, double) { return (mean - x) * (mean - x); });
    if (denominator <= 0.0) {
        throw DegenerateDenominatorError("rrse: actual values are constant");
    }
    return std::sqrt(numerator / denominator);
}

MetricRow evaluate(const EvalInputs& inputs, const MapeOptions& options) {
    return MetricRow{rmse(inputs), mae(inputs), mape(inputs, options), rrse(inputs)};
}

} // namespace aircast::metrics
