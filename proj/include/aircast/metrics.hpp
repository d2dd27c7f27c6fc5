#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aircast::metrics {

/// Aligned actual (x) and predicted (y) values; both finite, equal length, n >= 1.
struct EvalInputs {
    std::span<const double> actual;
    std::span<const double> predicted;

    EvalInputs(std::span<const double> actual_values, std::span<const double> predicted_values);
    std::size_t size() const { return actual.size(); }
};

struct MetricRow {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;  // percent
    double rrse = 0.0;
};

enum class ZeroActualPolicy {
    Error,    // any |x_i| <= guard raises ZeroDenominatorError
    Exclude,  // drop those indices and report how many were dropped
};

struct MapeOptions {
    double epsilon_guard = 1e-9;
    ZeroActualPolicy policy = ZeroActualPolicy::Error;
    /// Set to the number of excluded indices under ZeroActualPolicy::Exclude.
    std::size_t* excluded = nullptr;
};

double rmse(const EvalInputs& inputs);
double mae(const EvalInputs& inputs);
double mape(const EvalInputs& inputs, const MapeOptions& options = {});
double rrse(const EvalInputs& inputs);

MetricRow evaluate(const EvalInputs& inputs, const MapeOptions& options = {});

/// Pairwise summation above 10^4 elements, plain loop below.
double stable_sum(std::span<const double> values);

} // namespace aircast::metrics
