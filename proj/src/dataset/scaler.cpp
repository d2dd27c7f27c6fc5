#include "aircast/dataset.hpp"

#include "aircast/error.hpp"

#include <algorithm>

namespace aircast::dataset {

namespace {

void check_labels(const ScalerState& state, std::span<const std::string> labels) {
    if (!std::equal(state.labels.begin(), state.labels.end(), labels.begin(), labels.end())) {
        throw StateMismatchError("scaler state labels do not match the data columns");
    }
}

} // namespace

ScalerState fit_minmax(const Eigen::MatrixXd& data, std::vector<std::string> labels) {
    if (static_cast<std::size_t>(data.cols()) != labels.size()) {
        throw StateMismatchError("label count does not match column count");
    }
    if (data.rows() == 0) {
        throw EmptyInputError("cannot fit a scaler on zero rows");
    }
    ScalerState state;
    state.labels = std::move(labels);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        state.min.push_back(data.col(j).minCoeff());
        state.max.push_back(data.col(j).maxCoeff());
    }
    return state;
}

ScalerState fit_minmax(std::span<const double> series, std::string label) {
    const Eigen::Map<const Eigen::VectorXd> column(series.data(), static_cast<Eigen::Index>(series.size()));
    return fit_minmax(Eigen::MatrixXd(column), {std::move(label)});
}

Eigen::MatrixXd apply_minmax(const ScalerState& state, const Eigen::MatrixXd& data,
                             std::span<const std::string> labels) {
    check_labels(state, labels);
    if (static_cast<std::size_t>(data.cols()) != state.columns()) {
        throw StateMismatchError("column count does not match scaler state");
    }
    Eigen::MatrixXd out(data.rows(), data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double lo = state.min[static_cast<std::size_t>(j)];
        const double range = state.max[static_cast<std::size_t>(j)] - lo;
        if (range == 0.0) {
            out.col(j).setZero();
        } else {
            out.col(j) = (data.col(j).array() - lo) / range;
        }
    }
    return out;
}

Eigen::MatrixXd invert_minmax(const ScalerState& state, const Eigen::MatrixXd& data,
                              std::span<const std::string> labels) {
    check_labels(state, labels);
    if (static_cast<std::size_t>(data.cols()) != state.columns()) {
        throw StateMismatchError("column count does not match scaler state");
    }
    Eigen::MatrixXd out(data.rows(), data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double lo = state.min[static_cast<std::size_t>(j)];
        const double range = state.max[static_cast<std::size_t>(j)] - lo;
        out.col(j) = data.col(j).array() * range + lo;
    }
    return out;
}

std::vector<double> apply_minmax(const ScalerState& state, std::span<const double> series, std::string_view label) {
    const std::string name(label);
    const Eigen::Map<const Eigen::VectorXd> column(series.data(), static_cast<Eigen::Index>(series.size()));
    const Eigen::MatrixXd scaled = apply_minmax(state, Eigen::MatrixXd(column), std::span(&name, 1));
    return {scaled.data(), scaled.data() + scaled.size()};
}

std::vector<double> invert_minmax(const ScalerState& state, std::span<const double> series, std::string_view label) {
    const std::string name(label);
    const Eigen::Map<const Eigen::VectorXd> column(series.data(), static_cast<Eigen::Index>(series.size()));
    const Eigen::MatrixXd raw = invert_minmax(state, Eigen::MatrixXd(column), std::span(&name, 1));
    return {raw.data(), raw.data() + raw.size()};
}

} // namespace aircast::dataset
