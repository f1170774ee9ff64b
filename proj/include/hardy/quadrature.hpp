#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hardy::quad {

/// Full Gauss-Legendre rule on [-1, 1] expanded from Boost's half-range tables.
template <unsigned N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussLegendre() {
        using rule = boost::math::quadrature::gauss<double, N>;
        const auto& abscissa = rule::abscissa();
        const auto& weights = rule::weights();
        std::size_t k = 0;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            if (abscissa[i] == 0.0) {
                x[k] = 0.0;
                w[k++] = weights[i];
            } else {
                x[k] = -abscissa[i];
                w[k++] = weights[i];
                x[k] = abscissa[i];
                w[k++] = weights[i];
            }
        }
    }

    static const GaussLegendre& get() {
        static const GaussLegendre rule;
        return rule;
    }

    /// Integral of f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) sum += w[i] * f(mid + half * x[i]);
        return half * sum;
    }
};

/// Adaptive Gauss-Kronrod (G7/K15) on a finite interval.
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 30,
                double* error = nullptr) {
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &err);
    if (error) *error = err;
    return value;
}

/// Breakpoints a = x_0 < ... < x_m = b graded geometrically towards a, so that
/// algebraic endpoint singularities at a are resolved by a fixed per-panel rule.
inline std::vector<double> graded_breaks(double a, double b, double ratio = 0.25, int levels = 40) {
    std::vector<double> breaks;
    breaks.reserve(static_cast<std::size_t>(levels) + 2);
    double width = b - a;
    breaks.push_back(b);
    for (int i = 0; i < levels; ++i) {
        width *= ratio;
        breaks.push_back(a + width);
    }
    breaks.push_back(a);
    std::vector<double> out(breaks.rbegin(), breaks.rend());
    return out;
}

}  // namespace hardy::quad
