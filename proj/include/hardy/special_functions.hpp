#pragma once

// Closed-form constants of the generalized Hardy operator
//     L_{a,alpha} = (-Delta)^{alpha/2} + a |x|^{-alpha}
// together with the ground-state parameterization sigma -> Psi(sigma) and
// the small Gamma/Bessel helpers the quadrature layers build on.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/special_functions/bessel.hpp>

#include "hardy/error.hpp"

namespace hardy {

namespace detail {

struct SignedLogGamma {
    double log_abs;
    int sign;
};

/// log|Gamma(x)| with the sign of Gamma(x); x must not be a non-positive integer.
inline SignedLogGamma log_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("Gamma has a pole at " + std::to_string(x));
    int sign = 1;
    const double value = ::lgamma_r(x, &sign);
    return {value, sign};
}

inline std::string fmt(double v) { return std::to_string(v); }

inline void check_dimension_alpha(int d, double alpha) {
    require(d >= 1, "dimension must be a positive integer");
    require(std::isfinite(alpha) && alpha > 0.0 && alpha < std::min(2.0, static_cast<double>(d)),
            "alpha must lie in (0, min(2, d)); got alpha=" + fmt(alpha) + ", d=" + std::to_string(d));
}

}  // namespace detail

/// Surface area of the unit sphere S^{d-1}, 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(int d) {
    detail::require(d >= 1, "dimension must be a positive integer");
    const double h = 0.5 * d;
    return 2.0 * std::exp(h * std::log(std::numbers::pi) - std::lgamma(h));
}

/// Most negative coupling for which L_{a,alpha} is non-negative:
///     a_* = -2^alpha Gamma((d+alpha)/4)^2 / Gamma((d-alpha)/4)^2.
inline double critical_coupling(int d, double alpha) {
    detail::check_dimension_alpha(d, alpha);
    const double lg = 2.0 * (std::lgamma((d + alpha) / 4.0) - std::lgamma((d - alpha) / 4.0));
    return -std::exp(alpha * std::numbers::ln2 + lg);
}

/// Sharp constant C in || |p|^{alpha/2} f ||_p >= C || |x|^{-alpha/2} f ||_p, valid for 1 < p < 2d/alpha.
inline double lp_hardy_constant(int d, double alpha, double p) {
    detail::check_dimension_alpha(d, alpha);
    detail::require(std::isfinite(p) && p > 1.0, "p must exceed 1");
    detail::require(p < 2.0 * d / alpha, "Hardy inequality requires p < 2d/alpha; got p=" + detail::fmt(p));
    const double q = p / (p - 1.0);  // conjugate exponent
    const double log_value = 0.5 * alpha * std::numbers::ln2
        + std::lgamma((d / q + 0.5 * alpha) / 2.0) + std::lgamma(d / (2.0 * p))
        - std::lgamma((d / p - 0.5 * alpha) / 2.0) - std::lgamma(d / (2.0 * q));
    return std::exp(log_value);
}

/// Psi_{alpha,d}(sigma) on (-alpha, (d-alpha)/2]; continuous, strictly decreasing, Psi(0) = 0.
inline double psi(double sigma, int d, double alpha) {
    detail::check_dimension_alpha(d, alpha);
    const double upper = 0.5 * (d - alpha);
    detail::require(std::isfinite(sigma) && sigma > -alpha && sigma <= upper,
                    "sigma must lie in (-alpha, (d-alpha)/2]; got sigma=" + detail::fmt(sigma));
    if (sigma == 0.0) return 0.0;
    const auto g1 = detail::log_gamma(0.5 * (sigma + alpha));
    const auto g2 = detail::log_gamma(0.5 * (d - sigma));
    const auto g3 = detail::log_gamma(0.5 * (d - sigma - alpha));
    const auto g4 = detail::log_gamma(0.5 * sigma);
    const int sign = -g1.sign * g2.sign * g3.sign * g4.sign;
    return sign * std::exp(alpha * std::numbers::ln2 + g1.log_abs + g2.log_abs - g3.log_abs - g4.log_abs);
}

/// Ground-state exponent delta = Psi^{-1}(a), by bisection on (-alpha + 1e-9, (d-alpha)/2].
inline double delta_from_coupling(double a, int d, double alpha) {
    detail::check_dimension_alpha(d, alpha);
    detail::require(std::isfinite(a), "coupling must be finite");
    const double a_star = critical_coupling(d, alpha);
    detail::require(a >= a_star - 1e-12 * std::abs(a_star),
                    "coupling below the critical value a_*=" + detail::fmt(a_star) + "; no delta exists");
    if (a == 0.0) return 0.0;
    double lo = -alpha + 1e-9;
    double hi = 0.5 * (d - alpha);
    if (a <= psi(hi, d, alpha)) return hi;
    if (a >= psi(lo, d, alpha)) return lo;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (psi(mid, d, alpha) > a) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double flo = std::abs(psi(lo, d, alpha) - a);
    const double fhi = std::abs(psi(hi, d, alpha) - a);
    return flo < fhi ? lo : hi;
}

/// Exclusive lower bound on the Sobolev order of the multiplier theorem,
///     2^{[d/(2c)]} (d/2 (1 + 1/c) + 1) + 1/2.
inline double hormander_threshold(int d, double c) {
    detail::require(d >= 1, "dimension must be a positive integer");
    detail::require(std::isfinite(c) && c > 0.0, "c must be positive");
    const double power = std::floor(d / (2.0 * c));
    return std::exp2(power) * (0.5 * d * (1.0 + 1.0 / c) + 1.0) + 0.5;
}

/// Prefactor of the Riesz kernel |p|^{-alpha}(x,y) = C |x-y|^{alpha-d},
///     C = Gamma((d-alpha)/2) / (pi^{d/2} 2^alpha Gamma(alpha/2)).
inline double riesz_constant(int d, double alpha) {
    detail::require(d >= 1, "dimension must be a positive integer");
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < d, "Riesz kernel needs 0 < alpha < d");
    return std::exp(std::lgamma(0.5 * (d - alpha)) - 0.5 * d * std::log(std::numbers::pi)
                    - alpha * std::numbers::ln2 - std::lgamma(0.5 * alpha));
}

/// The parameter tuple (d, alpha, a, delta, s, p); delta is always derived from a.
struct Parameters {
    int d = 3;
    double alpha = 1.0;
    double a = 0.0;
    double delta = 0.0;
    double s = 1.0;
    double p = 2.0;

    static Parameters make(int d, double alpha, double a, double s = 1.0, double p = 2.0) {
        detail::check_dimension_alpha(d, alpha);
        detail::require(std::isfinite(s) && s > 0.0 && s <= 2.0, "s must lie in (0, 2]; got s=" + detail::fmt(s));
        detail::require(std::isfinite(p) && p > 1.0, "p must lie in (1, inf); got p=" + detail::fmt(p));
        Parameters out;
        out.d = d;
        out.alpha = alpha;
        out.a = a;
        out.s = s;
        out.p = p;
        out.delta = delta_from_coupling(a, d, alpha);
        return out;
    }

    /// delta_+ = 0 for a >= 0 and delta for a < 0.
    double delta_plus() const { return a >= 0.0 ? 0.0 : delta; }

    Parameters with_coupling(double coupling) const { return make(d, alpha, coupling, s, p); }
    Parameters with_p(double exponent) const { return make(d, alpha, a, s, exponent); }
    Parameters with_s(double order) const { return make(d, alpha, a, order, p); }
};

namespace detail {

using BesselPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

/// Hankel asymptotic expansion of J_nu for large z (used for z >= 25, where the
/// truncated series is accurate to rounding).
inline double bessel_j_asymptotic(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0, term = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * z);
        if (std::abs(term) < 1e-17) break;
        // a_k / z^k with alternating signs on the even and odd series
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
    }
    const double omega = z - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(omega) - q * std::sin(omega));
}

}  // namespace detail

/// Bessel function J_nu(z), z >= 0, for the orders the radial transforms need
/// (nu = d/2 - 1 and integer shifts of it).
inline double bessel_j(double nu, double z) {
    if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : HUGE_VAL);
    if (nu == -0.5) return std::sqrt(2.0 / (std::numbers::pi * z)) * std::cos(z);
    if (nu == 0.5) return std::sqrt(2.0 / (std::numbers::pi * z)) * std::sin(z);
    if (z >= 25.0 && std::abs(nu) < 6.0) return detail::bessel_j_asymptotic(nu, z);
    return boost::math::cyl_bessel_j(nu, z, detail::BesselPolicy());
}

/// Radial kernel z^{-nu} J_nu(z) of the d-dimensional Fourier transform, nu = (d-2)/2,
/// continuous at z = 0 with value 1 / (2^nu Gamma(nu + 1)).
inline double radial_fourier_kernel(int d, double z) {
    const double nu = 0.5 * d - 1.0;
    if (z < 1e-4) {
        // two-term series; relative error below 1e-17 for z < 1e-4
        const double lead = std::exp(-nu * std::numbers::ln2 - std::lgamma(nu + 1.0));
        return lead * (1.0 - z * z / (4.0 * (nu + 1.0)));
    }
    switch (d) {
        case 1: return std::sqrt(2.0 / std::numbers::pi) * std::cos(z);
        case 3: return std::sqrt(2.0 / std::numbers::pi) * std::sin(z) / z;
        case 5: return std::sqrt(2.0 / std::numbers::pi) * (std::sin(z) / z - std::cos(z)) / (z * z);
        default: return std::pow(z, -nu) * bessel_j(nu, z);
    }
}

}  // namespace hardy
