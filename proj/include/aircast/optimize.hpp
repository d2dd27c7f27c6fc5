#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace aircast::optimize {

struct NelderMeadOptions {
    std::size_t max_evaluations = 20000;
    /// Stop when the simplex's value spread is below
    /// f_tolerance * (|f_best| + 1) and every vertex lies within
    /// x_tolerance steps of the best one.
    double f_tolerance = 1e-11;
    double x_tolerance = 1e-7;
    /// Fresh simplices built around the optimum after convergence.
    std::size_t max_restarts = 3;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free minimisation with dimension-adaptive coefficients
/// (Gao & Han, 2012). The initial simplex is start + step_i * e_i; NaN
/// objective values are treated as +inf.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start, std::vector<double> step,
                             const NelderMeadOptions& options = {});

} // namespace aircast::optimize
