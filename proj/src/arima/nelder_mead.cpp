#include "aircast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace aircast::optimize {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

class Simplex {
public:
    Simplex(const Objective& objective, const std::vector<double>& step, std::size_t budget)
        : objective_(objective), step_(step), budget_(budget) {}

    double evaluate(const std::vector<double>& x) {
        ++evaluations_;
        const double f = objective_(x);
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    }

    bool exhausted() const { return evaluations_ >= budget_; }
    std::size_t evaluations() const { return evaluations_; }

    // One descent from `start`; returns true when the tolerances were met.
    bool descend(Vertex& best, const NelderMeadOptions& options) {
        const std::size_t n = best.x.size();
        const double dim = static_cast<double>(n);
        const double expansion = 1.0 + 2.0 / dim;
        const double contraction = 0.75 - 0.5 / dim;
        const double shrink = 1.0 - 1.0 / dim;

        std::vector<Vertex> simplex;
        simplex.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            Vertex v{best.x, 0.0};
            v.x[i] += step_[i];
            v.f = evaluate(v.x);
            simplex.push_back(std::move(v));
        }

        std::vector<double> centroid(n), trial(n);
        auto along = [&](double coef, const std::vector<double>& worst) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = centroid[i] + coef * (centroid[i] - worst[i]);
            }
            return trial;
        };

        while (!exhausted()) {
            std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

            const double f_best = simplex.front().f;
            const double f_worst = simplex.back().f;
            double spread_x = 0.0;
            for (std::size_t v = 1; v <= n; ++v) {
                for (std::size_t i = 0; i < n; ++i) {
                    spread_x = std::max(spread_x, std::abs(simplex[v].x[i] - simplex[0].x[i]) / step_[i]);
                }
            }
            if (std::isfinite(f_worst) && f_worst - f_best <= options.f_tolerance * (std::abs(f_best) + 1.0) &&
                spread_x <= options.x_tolerance) {
                best = simplex.front();
                return true;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t i = 0; i < n; ++i) {
                    centroid[i] += simplex[v].x[i] / dim;
                }
            }

            Vertex& worst = simplex.back();
            const std::vector<double> reflected = along(1.0, worst.x);
            const double f_reflected = evaluate(reflected);

            if (f_reflected < simplex.front().f) {
                const std::vector<double> expanded = along(expansion, worst.x);
                const double f_expanded = evaluate(expanded);
                if (f_expanded < f_reflected) {
                    worst = {expanded, f_expanded};
                } else {
                    worst = {reflected, f_reflected};
                }
                continue;
            }
            if (f_reflected < simplex[n - 1].f) {
                worst = {reflected, f_reflected};
                continue;
            }

            const bool outside = f_reflected < worst.f;
            const std::vector<double> contracted = along(outside ? contraction : -contraction, worst.x);
            const double f_contracted = evaluate(contracted);
            if (f_contracted < std::min(f_reflected, worst.f)) {
                worst = {contracted, f_contracted};
                continue;
            }
            for (std::size_t v = 1; v <= n; ++v) {
                for (std::size_t i = 0; i < n; ++i) {
                    simplex[v].x[i] = simplex[0].x[i] + shrink * (simplex[v].x[i] - simplex[0].x[i]);
                }
                simplex[v].f = evaluate(simplex[v].x);
            }
        }

        const auto it =
            std::min_element(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (it->f < best.f) {
            best = *it;
        }
        return false;
    }

private:
    const Objective& objective_;
    const std::vector<double>& step_;
    std::size_t budget_;
    std::size_t evaluations_ = 0;
};

} // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start, std::vector<double> step,
                             const NelderMeadOptions& options) {
    NelderMeadResult result;
    if (start.empty()) {
        result.x = std::move(start);
        result.value = objective(result.x);
        result.evaluations = 1;
        result.converged = true;
        return result;
    }
    for (auto& s : step) {
        if (s == 0.0) {
            s = 1e-3;
        }
    }

    Simplex simplex(objective, step, options.max_evaluations);
    Vertex best{std::move(start), 0.0};
    best.f = simplex.evaluate(best.x);

    bool converged = false;
    for (std::size_t round = 0; round <= options.max_restarts; ++round) {
        const double before = best.f;
        converged = simplex.descend(best, options);
        if (!converged) {
            break;
        }
        if (round > 0 && before - best.f <= options.f_tolerance * (std::abs(best.f) + 1.0)) {
            break;
        }
    }

    result.x = std::move(best.x);
    result.value = best.f;
    result.evaluations = simplex.evaluations();
    result.converged = converged;
    return result;
}

} // namespace aircast::optimize
