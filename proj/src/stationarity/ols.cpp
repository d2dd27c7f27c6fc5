#include "aircast/stationarity.hpp"

#include "aircast/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace aircast::stationarity {

std::vector<double> difference(std::span<const double> series, std::size_t order) {
    if (order >= series.size() && order > 0) {
        throw LengthError("cannot difference " + std::to_string(series.size()) + " values " +
                          std::to_string(order) + " times");
    }
    std::vector<double> out(series.begin(), series.end());
    for (std::size_t k = 0; k < order; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

double OlsFit::log_likelihood() const {
    const auto n = static_cast<double>(n_obs);
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
}

double OlsFit::aic() const {
    return -2.0 * log_likelihood() + 2.0 * static_cast<double>(n_params);
}

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    const auto n = design.rows();
    const auto k = design.cols();
    if (n != response.size()) {
        throw LengthError("design has " + std::to_string(n) + " rows but response has " +
                          std::to_string(response.size()));
    }
    if (n <= k) {
        throw LengthError("ols needs more rows than columns");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-11);
    if (qr.rank() < k) {
        throw SingularityError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                               std::to_string(k) + ")");
    }

    OlsFit fit;
    fit.n_obs = static_cast<std::size_t>(n);
    fit.n_params = static_cast<std::size_t>(k);
    fit.coefficients = qr.solve(response);
    fit.residuals = response - design * fit.coefficients;
    fit.rss = fit.residuals.squaredNorm();
    fit.residual_variance = fit.rss / static_cast<double>(n - k);

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd diag_pivoted = r_inv.rowwise().squaredNorm();
    fit.standard_errors.resize(k);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < k; ++i) {
        fit.standard_errors(perm(i)) = std::sqrt(fit.residual_variance * diag_pivoted(i));
    }
    return fit;
}

} // namespace aircast::stationarity
