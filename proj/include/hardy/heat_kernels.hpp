#pragma once

// Free fractional heat kernel e^{-t|p|^alpha}(x,y), the split Hardy semigroup
// e^{-t(|p|^alpha + V)} on radial profiles, and the envelope functions that
// bound the Hardy heat kernel and the difference of the two kernels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "hardy/error.hpp"
#include "hardy/hankel.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/radial.hpp"
#include "hardy/special_functions.hpp"

namespace hardy {

namespace detail {

/// coeff * k^exponent * exp(-k^alpha)
struct PowerTerm {
    double coeff;
    double exponent;
};

/// Gauss-Legendre 16 over panels with a Gauss-Legendre 8 companion for the error estimate.
/// Panels are halved until the two agree to 1e-13 of the absolute mass (at most 20 times).
template <class F>
double panel_integral(F&& f, std::vector<double> breaks, const char* what) {
    const auto& hi = quad::GaussLegendre<16>::get();
    const auto& lo = quad::GaussLegendre<8>::get();
    double value = 0.0, gap = 0.0;
    for (int level = 0; level <= 20; ++level) {
        value = 0.0;
        gap = 0.0;
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const double a = breaks[i], b = breaks[i + 1];
            if (b <= a) continue;
            double absolute = 0.0;
            const double v16 = hi.integrate(
                [&](double x) {
                    const double y = f(x);
                    absolute += std::abs(y);
                    return y;
                },
                a, b);
            const double v8 = lo.integrate(f, a, b);
            value += v16;
            gap += std::abs(v16 - v8);
            mass += absolute * (b - a) / 16.0;
        }
        if (!std::isfinite(value)) throw NumericalError(std::string(what) + ": non-finite quadrature value");
        if (gap <= 1e-13 * mass || breaks.size() > (1u << 22)) break;
        std::vector<double> finer;
        finer.reserve(2 * breaks.size());
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            finer.push_back(breaks[i]);
            finer.push_back(0.5 * (breaks[i] + breaks[i + 1]));
        }
        finer.push_back(breaks.back());
        breaks = std::move(finer);
    }
    if (gap > 1e-8) {
        throw NumericalError(std::string(what) + ": panel estimates disagree by " + std::to_string(gap) +
                             " after refinement");
    }
    return value;
}

/// Smallest k with k^e exp(-k^alpha) below 1e-20 for every exponent e <= e_max.
inline double heat_cutoff(double alpha, double e_max) {
    double k = std::pow(46.0, 1.0 / alpha);
    for (int i = 0; i < 30; ++i) k = std::pow(46.0 + std::max(0.0, e_max) * std::log(std::max(k, 1.0)), 1.0 / alpha);
    return k;
}

/// Breakpoints on [0, k_max]: graded towards 0 on [0, 1], then panels limited
/// by relative growth and by a phase change of pi/4 at frequency w.
inline std::vector<double> frequency_breaks(double k_max, double w) {
    std::vector<double> breaks = quad::graded_breaks(0.0, std::min(1.0, k_max), 0.25, 30);
    double k = breaks.back();
    const double phase_limit = w > 0.0 ? std::numbers::pi / (4.0 * w) : HUGE_VAL;
    while (k < k_max) {
        k = std::min(k_max, k + std::min(0.5 * std::max(k, 1.0), phase_limit));
        breaks.push_back(k);
    }
    return breaks;
}

/// sum_j c_j int_0^inf k^{e_j} exp(-k^alpha) cos(k w) dk.
inline double cosine_transform(const std::vector<PowerTerm>& terms, double alpha, double w) {
    double e_max = 0.0;
    for (const auto& term : terms) e_max = std::max(e_max, term.exponent);
    auto real_axis = [&](double k) {
        double g = 0.0;
        for (const auto& term : terms) g += term.coeff * std::pow(k, term.exponent);
        return g * std::exp(-std::pow(k, alpha)) * std::cos(k * w);
    };
    if (w <= 2.0) return panel_integral(real_axis, frequency_breaks(heat_cutoff(alpha, e_max), w), "cosine transform");

    // rotate k = s e^{i theta}; exp(-k^alpha) stays bounded while exp(ikw) decays
    const double theta = std::min(0.5 * std::numbers::pi, 0.45 * std::numbers::pi / alpha);
    const std::complex<double> ray = std::polar(1.0, theta);
    const std::complex<double> ray_alpha = std::polar(1.0, alpha * theta);
    const std::complex<double> iw(0.0, w);
    std::vector<std::complex<double>> phase;
    for (const auto& term : terms) phase.push_back(term.coeff * std::polar(1.0, theta * term.exponent));
    auto rotated = [&](double s) {
        std::complex<double> g = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) g += phase[j] * std::pow(s, terms[j].exponent);
        return std::real(g * std::exp(-std::pow(s, alpha) * ray_alpha + iw * s * ray) * ray);
    };
    const double scale = 1.0 / (w * std::sin(theta));
    std::vector<double> breaks = quad::graded_breaks(0.0, scale, 0.25, 40);
    for (int i = 2; i <= 64; ++i) breaks.push_back(i * scale);
    return panel_integral(rotated, breaks, "rotated cosine transform");
}

/// sum_j c_j int_0^inf k^{e_j} exp(-k^alpha) J_0(k rho) dk for rho > 2.
inline double bessel0_transform(const std::vector<PowerTerm>& terms, double alpha, double rho) {
    if (alpha <= 1.0) {
        // J_0 = Re H_0^(1); on k = i s, H_0^(1)(i s rho) = -(2i/pi) K_0(s rho)
        std::vector<std::complex<double>> phase;
        for (const auto& term : terms) phase.push_back(term.coeff * std::polar(1.0, 0.5 * std::numbers::pi * term.exponent));
        const std::complex<double> ray_alpha = std::polar(1.0, 0.5 * std::numbers::pi * alpha);
        auto integrand = [&](double s) {
            std::complex<double> g = 0.0;
            for (std::size_t j = 0; j < terms.size(); ++j) g += phase[j] * std::pow(s, terms[j].exponent);
            g *= std::exp(-std::pow(s, alpha) * ray_alpha);
            return std::real(g) * boost::math::cyl_bessel_k(0, rho * s, BesselPolicy());
        };
        const double scale = 1.0 / rho;
        std::vector<double> breaks = quad::graded_breaks(0.0, scale, 0.25, 40);
        for (int i = 2; i <= 64; ++i) breaks.push_back(i * scale);
        return 2.0 / std::numbers::pi * panel_integral(integrand, breaks, "Bessel K transform");
    }
    // J_0(z) = (2/pi) int_0^{pi/2} cos(z sin psi) dpsi
    const int levels = std::max(4, static_cast<int>(std::ceil(std::log2(rho))) + 6);
    const auto breaks = quad::graded_breaks(0.0, 0.5 * std::numbers::pi, 0.5, levels);
    auto integrand = [&](double psi) { return cosine_transform(terms, alpha, rho * std::sin(psi)); };
    return 2.0 / std::numbers::pi * panel_integral(integrand, breaks, "angular Bessel transform");
}

/// Free kernel at t = 1 as a function of rho = |x - y|.
inline double unit_free_kernel(double rho, int d, double alpha) {
    const double nu = 0.5 * d - 1.0;
    const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d);
    if (rho == 0.0) {
        // int_0^inf k^{d-1} exp(-k^alpha) dk = Gamma(d/alpha)/alpha
        return norm * std::exp(std::lgamma(d / alpha) - std::lgamma(nu + 1.0) - nu * std::numbers::ln2) / alpha;
    }
    double value;
    if (rho <= 2.0) {
        auto integrand = [&](double k) {
            return std::pow(k, d - 1) * std::exp(-std::pow(k, alpha)) * radial_fourier_kernel(d, k * rho);
        };
        value = norm * panel_integral(integrand, frequency_breaks(heat_cutoff(alpha, d - 1.0), rho), "free heat kernel");
    } else {
        // int k^e e^{-k^a} J_mu(k rho) dk = rho^{-1} int [(e+mu-1) k^{e-1} - a k^{e-1+a}] e^{-k^a} J_{mu-1}(k rho) dk
        std::vector<PowerTerm> terms{{1.0, 0.5 * d}};
        double mu = nu;
        const double target = d % 2 == 1 ? -0.5 : 0.0;
        int steps = 0;
        while (mu > target + 1e-12) {
            std::vector<PowerTerm> next;
            for (const auto& term : terms) {
                const double c1 = term.coeff * (term.exponent + mu - 1.0);
                if (c1 != 0.0) next.push_back({c1, term.exponent - 1.0});
                next.push_back({-alpha * term.coeff, term.exponent - 1.0 + alpha});
            }
            terms = std::move(next);
            mu -= 1.0;
            ++steps;
        }
        double integral;
        if (d % 2 == 1) {
            for (auto& term : terms) term.exponent -= 0.5;  // J_{-1/2}(z) = sqrt(2/(pi z)) cos z
            integral = std::sqrt(2.0 / (std::numbers::pi * rho)) * cosine_transform(terms, alpha, rho);
        } else {
            integral = bessel0_transform(terms, alpha, rho);
        }
        value = norm * std::pow(rho, -nu - steps) * integral;
    }
    if (value < 0.0) {
        if (value < -1e-12) throw NumericalError("free heat kernel: negative value " + std::to_string(value));
        value = 0.0;
    }
    return value;
}

}  // namespace detail

/// e^{-t|p|^alpha}(x, y) with r = |x - y|.
inline double free_heat_kernel(double t, double r, int d, double alpha) {
    detail::require(std::isfinite(t) && t > 0.0, "heat kernel needs t > 0");
    detail::require(std::isfinite(r) && r >= 0.0, "heat kernel needs r >= 0");
    detail::require(d >= 1, "dimension must be a positive integer");
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < 2.0, "heat kernel needs 0 < alpha < 2");
    const double length = std::pow(t, 1.0 / alpha);
    return std::pow(length, -d) * detail::unit_free_kernel(r / length, d, alpha);
}

/// Poisson kernel c_d t / (t^2 + r^2)^{(d+1)/2}, the alpha = 1 free kernel.
inline double poisson_kernel(double t, double r, int d) {
    const double c = std::exp(std::lgamma(0.5 * (d + 1)) - 0.5 * (d + 1) * std::log(std::numbers::pi));
    return c * t / std::pow(t * t + r * r, 0.5 * (d + 1));
}

struct KernelSample {
    double t = 1.0;
    double x_norm = 0.0;
    double y_norm = 0.0;
    double xy_distance = 0.0;
    double value = 0.0;
    double envelope_low = 0.0;
    double envelope_high = HUGE_VAL;
};

struct Envelope {
    double value;
    double low;
    double high;
};

/// (1 v t^{1/a}/|x|)^delta (1 v t^{1/a}/|y|)^delta t^{-d/a} (1 ^ t^{1+d/a}/|x-y|^{d+a}),
/// with low/high scaled by the corridor constants.
inline Envelope heat_envelope(double t, double x_norm, double y_norm, double dist, const Parameters& params,
                              double c_low = 0.0, double c_high = HUGE_VAL) {
    detail::require(t > 0.0 && x_norm >= 0.0 && y_norm >= 0.0 && dist >= 0.0, "envelope needs t > 0 and norms >= 0");
    const double d = params.d, alpha = params.alpha, delta = params.delta;
    const double length = std::pow(t, 1.0 / alpha);
    auto weight = [&](double norm) {
        if (delta == 0.0) return 1.0;
        if (norm == 0.0) return delta > 0.0 ? HUGE_VAL : 0.0;
        return std::pow(std::max(1.0, length / norm), delta);
    };
    const double tail = dist == 0.0 ? 1.0 : std::min(1.0, std::pow(t, 1.0 + d / alpha) / std::pow(dist, d + alpha));
    const double value = weight(x_norm) * weight(y_norm) * std::pow(t, -d / alpha) * tail;
    auto scaled = [&](double c) { return (c == 0.0 || value == 0.0) ? 0.0 : c * value; };
    return {value, scaled(c_low), scaled(c_high)};
}

struct LMBounds {
    double L;
    double M;
};

/// L_t^{alpha,delta_+}(x, y) and M_t^alpha(x, y).
inline LMBounds lm_bounds(double t, double x_norm, double y_norm, double dist, const Parameters& params) {
    detail::require(t > 0.0 && x_norm > 0.0 && y_norm > 0.0 && dist >= 0.0, "L/M bounds need t > 0 and |x|, |y| > 0");
    const double d = params.d, alpha = params.alpha, delta = params.delta_plus();
    const double big = std::max(x_norm, y_norm);
    const double small = std::min(x_norm, y_norm);
    const double length = std::pow(t, 1.0 / alpha);
    const double big_alpha = std::pow(big, alpha);
    double L = 0.0, M = 0.0;
    if (big_alpha <= t) L += std::pow(t, -d / alpha) * std::pow(length * length / (x_norm * y_norm), delta);
    if (big_alpha >= t) {
        L += t / std::pow(big, d + alpha) * std::pow(std::max(1.0, length / small), delta);
        if (0.5 * x_norm <= y_norm && y_norm <= 2.0 * x_norm) {
            const double tail = dist == 0.0 ? 1.0 : std::min(1.0, std::pow(t, 1.0 + d / alpha) / std::pow(dist, d + alpha));
            M = std::pow(t, 1.0 - d / alpha) / std::pow(small, alpha) * tail;
        }
    }
    return {L, M};
}

/// Average of F(|x - y|) over the sphere |y| = y_norm, for a fixed x with |x| = x_norm.
template <class F>
double angular_average(int d, double x_norm, double y_norm, F&& f) {
    auto dist = [&](double phi) {
        return std::sqrt(std::max(0.0, x_norm * x_norm + y_norm * y_norm - 2.0 * x_norm * y_norm * std::cos(phi)));
    };
    if (d == 1) return 0.5 * (f(std::abs(x_norm - y_norm)) + f(x_norm + y_norm));
    const double norm = std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1))) / std::sqrt(std::numbers::pi);
    // fixed panels: the integrands here are at worst kinked, and this runs per sample
    const auto& gl = quad::GaussLegendre<16>::get();
    constexpr int panels = 24;
    const double width = std::numbers::pi / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        sum += gl.integrate([&](double phi) { return f(dist(phi)) * std::pow(std::sin(phi), d - 2); }, i * width,
                            (i + 1) * width);
    }
    return norm * sum;
}

/// Potential V(r) = (a + (a_tilde - a) theta(r)) r^{-alpha} with theta in [0, 1]; so
/// a r^{-alpha} <= V <= a_tilde r^{-alpha}. The pure Hardy potential has a_tilde = a.
struct PotentialSpec {
    double a = 0.0;
    double a_tilde = 0.0;
    std::function<double(double)> theta;

    static PotentialSpec hardy(double coupling) { return {coupling, coupling, {}}; }

    static PotentialSpec sandwiched(double lower, double upper, std::function<double(double)> blend) {
        detail::require(upper >= lower, "sandwiched potential needs a_tilde >= a");
        return {lower, upper, std::move(blend)};
    }

    bool is_zero() const { return a == 0.0 && a_tilde == 0.0; }

    double operator()(double r, double alpha) const {
        double coupling = a;
        if (theta && a_tilde != a) coupling += (a_tilde - a) * std::clamp(theta(r), 0.0, 1.0);
        return coupling * std::pow(r, -alpha);
    }
};

/// Exact free step: multiplication by exp(-t |k|^alpha) in Hankel space.
inline RadialFunction free_semigroup_apply(const RadialFunction& f, double t, double alpha) {
    detail::require(std::isfinite(t) && t > 0.0, "semigroup time must be positive");
    return apply_symbol(f, [&](double k) { return std::exp(-t * std::pow(k, alpha)); });
}

/// Strang splitting of e^{-t(|p|^alpha + V)} f with n_steps steps of size t / n_steps.
inline RadialFunction hardy_semigroup_apply(const RadialFunction& f, double t, const Parameters& params, int n_steps,
                                            const PotentialSpec& potential) {
    detail::require_finite(f, "hardy_semigroup_apply");
    detail::require(std::isfinite(t) && t > 0.0, "semigroup time must be positive");
    detail::require(n_steps >= 1, "n_steps must be at least 1");
    detail::require(f.grid.dimension() == params.d, "profile dimension differs from params.d");
    if (potential.a < 0.0) throw UnsupportedError("semigroup stepping needs a non-negative potential (a >= 0)");
    if (potential.is_zero()) return free_semigroup_apply(f, t, params.alpha);

    const double tau = t / n_steps;
    std::vector<double> half(static_cast<std::size_t>(f.size())), full(half.size());
    for (int i = 0; i < f.size(); ++i) {
        const double v = potential(f.grid[i], params.alpha);
        half[i] = std::exp(-0.5 * tau * v);
        full[i] = half[i] * half[i];
    }
    RadialFunction u = f;
    for (int i = 0; i < u.size(); ++i) u.values[i] *= half[i];
    for (int step = 0; step < n_steps; ++step) {
        u = free_semigroup_apply(u, tau, params.alpha);
        const auto& factor = step + 1 == n_steps ? half : full;
        for (int i = 0; i < u.size(); ++i) u.values[i] *= factor[i];
    }
    u.meta["t"] = t;
    u.meta["n_steps"] = n_steps;
    return u;
}

inline RadialFunction hardy_semigroup_apply(const RadialFunction& f, double t, const Parameters& params, int n_steps) {
    return hardy_semigroup_apply(f, t, params, n_steps, PotentialSpec::hardy(params.a));
}

/// Grid used when a caller does not supply one: [10^-2.5, 10^2.5] with 512 nodes.
inline RadialGrid default_grid(int d, int n = 512) {
    return make_grid(std::pow(10.0, -2.5), std::pow(10.0, 2.5), n, d);
}

/// Mass-one Gaussian shell of width six local grid spacings centred at radius y.
inline RadialFunction shell_bump(const RadialGrid& grid, double y_norm) {
    detail::require(y_norm > grid.r_min() && y_norm < grid.r_max(), "y_norm must lie inside the grid");
    const double width = 6.0 * y_norm * std::expm1(grid.log_step());
    auto bump = RadialFunction::sample(grid, [&](double r) {
        const double z = (r - y_norm) / width;
        return std::exp(-0.5 * z * z);
    });
    bump *= 1.0 / lp_norm(bump, 1.0);
    bump.meta["bump_width"] = width;
    bump.meta["y"] = y_norm;
    return bump;
}

/// x -> e^{-t L}(x, y) averaged over |y| = y_norm, by stepping a shell bump.
inline RadialFunction hardy_kernel_column(double t, double y_norm, const Parameters& params, int n_steps,
                                          const RadialGrid& grid, const PotentialSpec& potential) {
    RadialFunction column = hardy_semigroup_apply(shell_bump(grid, y_norm), t, params, n_steps, potential);
    column.meta["bump_width"] = 6.0 * y_norm * std::expm1(grid.log_step());
    column.meta["y"] = y_norm;
    column.meta["t"] = t;
    return column;
}

inline RadialFunction hardy_kernel_column(double t, double y_norm, const Parameters& params, int n_steps,
                                          const RadialGrid& grid) {
    return hardy_kernel_column(t, y_norm, params, n_steps, grid, PotentialSpec::hardy(params.a));
}

inline RadialFunction hardy_kernel_column(double t, double y_norm, const Parameters& params, int n_steps) {
    return hardy_kernel_column(t, y_norm, params, n_steps, default_grid(params.d));
}

/// CSV with header "t,x,y,dist,value,env_low,env_high".
inline void write_kernel_csv(std::ostream& os, const std::vector<KernelSample>& samples) {
    os << "t,x,y,dist,value,env_low,env_high\n" << std::setprecision(17);
    for (const auto& s : samples) {
        os << s.t << ',' << s.x_norm << ',' << s.y_norm << ',' << s.xy_distance << ',' << s.value << ','
           << s.envelope_low << ',' << s.envelope_high << '\n';
    }
}

}  // namespace hardy
