#pragma once

// Littlewood-Paley projections, fractional powers, square functions and the
// Hormander-condition functional for L_{a,alpha}.

#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "hardy/error.hpp"
#include "hardy/hankel.hpp"
#include "hardy/heat_kernels.hpp"
#include "hardy/radial.hpp"
#include "hardy/special_functions.hpp"

namespace hardy {

struct BandRange {
    int j_min = -8;
    int j_max = 8;

    BandRange() = default;
    BandRange(int lo, int hi) : j_min(lo), j_max(hi) {
        detail::require(lo <= hi, "band range needs j_min <= j_max");
    }
    int count() const { return j_max - j_min + 1; }
};

/// One Littlewood-Paley band, N = 2^j.
struct DyadicBand {
    int index_exponent = 0;
    RadialFunction projected;

    double N() const { return std::ldexp(1.0, index_exponent); }
};

/// Quintic smoothstep cutoff: 1 on [0, 1], 0 on [2, inf).
inline double smooth_cutoff(double lambda) {
    if (lambda <= 1.0) return 1.0;
    if (lambda >= 2.0) return 0.0;
    const double x = lambda - 1.0;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

/// Psi_N(lambda) = Phi(lambda / N^alpha) - Phi(lambda / (N/2)^alpha).
inline double sharp_band_symbol(double lambda, double N, double alpha) {
    const double scale = std::pow(N, alpha);
    return smooth_cutoff(lambda / scale) - smooth_cutoff(lambda * std::pow(2.0, alpha) / scale);
}

namespace detail {

inline void require_lp_params(const Parameters& params) {
    if (params.a < 0.0) throw UnsupportedError("Littlewood-Paley operations need a >= 0");
}

inline void require_dyadic(double N) {
    int exponent = 0;
    const double mantissa = std::frexp(N, &exponent);
    require(N > 0.0 && mantissa == 0.5, "N must be a power of two");
}

}  // namespace detail

/// P_N f = e^{-L/N^alpha} f - e^{-L 2^alpha/N^alpha} f.
inline RadialFunction lp_projection(const RadialFunction& f, double N, const Parameters& params, int n_steps = 32) {
    detail::require_lp_params(params);
    detail::require_dyadic(N);
    detail::require_finite(f, "lp_projection");
    const double t1 = std::pow(N, -params.alpha);
    const double t2 = std::pow(2.0, params.alpha) * t1;
    RadialFunction out;
    if (params.a == 0.0) {
        out = apply_symbol(f, [&](double k) {
            const double ka = std::pow(k, params.alpha);
            return std::exp(-t1 * ka) - std::exp(-t2 * ka);
        });
    } else {
        out = hardy_semigroup_apply(f, t1, params, n_steps) - hardy_semigroup_apply(f, t2, params, n_steps);
    }
    out.meta.clear();
    out.meta["N"] = N;
    return out;
}

/// Bands P_N f for N = 2^j, j in range, in increasing j.
inline std::vector<DyadicBand> lp_decompose(const RadialFunction& f, const Parameters& params, const BandRange& range,
                                            int n_steps = 32) {
    std::vector<DyadicBand> bands;
    bands.reserve(static_cast<std::size_t>(range.count()));
    for (int j = range.j_min; j <= range.j_max; ++j) {
        bands.push_back({j, lp_projection(f, std::ldexp(1.0, j), params, n_steps)});
    }
    return bands;
}

/// Psi_N(|p|^alpha) f through the exact multiplier; only defined for a = 0.
inline RadialFunction sharp_projection_free(const RadialFunction& f, double N, const Parameters& params) {
    if (params.a != 0.0) throw UnsupportedError("sharp projections are only available for a = 0");
    detail::require_dyadic(N);
    RadialFunction out =
        apply_symbol(f, [&](double k) { return sharp_band_symbol(std::pow(k, params.alpha), N, params.alpha); });
    out.meta["N"] = N;
    return out;
}

/// e^{-t L} f at each of the increasing times, stepping from one time to the next.
inline std::vector<RadialFunction> semigroup_trajectory(const RadialFunction& f, const std::vector<double>& times,
                                                        const Parameters& params, int steps_per_interval = 2) {
    std::vector<RadialFunction> out;
    out.reserve(times.size());
    RadialFunction u = f;
    double now = 0.0;
    for (double t : times) {
        detail::require(t > now, "trajectory times must be positive and increasing");
        u = hardy_semigroup_apply(u, t - now, params, steps_per_interval);
        out.push_back(u);
        now = t;
    }
    return out;
}

/// L f = |p|^alpha f + a |x|^{-alpha} f.
inline RadialFunction hardy_operator_apply(const RadialFunction& f, const Parameters& params) {
    RadialFunction out = apply_symbol(f, [&](double k) { return std::pow(k, params.alpha); });
    if (params.a != 0.0) {
        for (int i = 0; i < out.size(); ++i) out.values[i] += params.a * std::pow(f.grid[i], -params.alpha) * f[i];
    }
    return out;
}

enum class PowerSign { positive, negative };

struct FractionalPowerOptions {
    int nodes_per_octave = 4;    // log-spaced time nodes
    int steps_per_interval = 2;  // Strang steps between consecutive nodes
    double t_min = 1e-6;
};

namespace detail {

/// L^{-s/2} g = Gamma(s/2)^{-1} int_0^inf e^{-tL} g t^{s/2} dt/t by Simpson's rule in log t.
inline RadialFunction negative_power_semigroup(const RadialFunction& g, double s, const Parameters& params,
                                               const FractionalPowerOptions& options) {
    const double half = 0.5 * s;
    const double t_max = std::pow(g.grid.r_max() / 8.0, params.alpha);
    const double q = std::exp2(1.0 / options.nodes_per_octave);
    int count = static_cast<int>(std::ceil(std::log(t_max / options.t_min) / std::log(q)));
    count += count % 2;  // even number of intervals for Simpson
    std::vector<double> times;
    for (int i = 0; i <= count; ++i) times.push_back(options.t_min * std::pow(q, i));
    const auto u = semigroup_trajectory(g, times, params, options.steps_per_interval);

    const double h = std::log(q);
    RadialFunction sum = RadialFunction::zeros(g.grid);
    for (int i = 0; i <= count; ++i) {
        const double w = (i == 0 || i == count) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double weight = w * h / 3.0 * std::pow(times[i], half);
        for (int r = 0; r < sum.size(); ++r) sum.values[r] += weight * u[i][r];
    }
    // [0, t_min]: e^{-tL} g ~ g. Past t_max the profile at radius r still grows like t until
    // t ~ r^alpha (heavy kernel tails), then decays like t^{-(d - 2 delta)/alpha}.
    const double cap = std::pow(options.t_min, half) / half;
    const double decay = (params.d - 2.0 * params.delta) / params.alpha;
    if (decay <= half) throw NumericalError("negative power: time integral does not converge at infinity");
    const double T = times.back();
    for (int r = 0; r < sum.size(); ++r) {
        const double cross = std::max(T, std::pow(g.grid[r], params.alpha));
        const double grow = (std::pow(cross, 1.0 + half) - std::pow(T, 1.0 + half)) / (1.0 + half);
        const double tail = (grow + std::pow(cross, 1.0 + half) / (decay - half)) / T;
        sum.values[r] += cap * g[r] + tail * u.back()[r];
    }
    sum *= 1.0 / std::tgamma(half);
    return sum;
}

}  // namespace detail

/// L^{+-s/2} f. For a = 0 the exact multiplier |k|^{+-alpha s/2}; for a > 0 the negative power by
/// the Gamma integral over the split semigroup, and the positive power as L^{-(2-s)/2}(L f).
inline RadialFunction fractional_power_apply(const RadialFunction& f, double s, PowerSign sign, const Parameters& params,
                                             const FractionalPowerOptions& options = {}) {
    detail::require(std::isfinite(s) && s > 0.0 && s <= 2.0, "fractional power needs s in (0, 2]");
    detail::require_finite(f, "fractional_power_apply");
    detail::require_lp_params(params);
    const double exponent = (sign == PowerSign::positive ? 0.5 : -0.5) * params.alpha * s;
    if (params.a == 0.0) return apply_symbol(f, [&](double k) { return std::pow(k, exponent); });
    if (sign == PowerSign::negative) return detail::negative_power_semigroup(f, s, params, options);
    RadialFunction lf = hardy_operator_apply(f, params);
    if (s == 2.0) return lf;
    return detail::negative_power_semigroup(lf, 2.0 - s, params, options);
}

/// (sum_N |N^{alpha s/2} P_N f|^2)^{1/2} over the band range. meta["tail"] is the larger L^2 norm
/// of the two extreme weighted bands relative to the L^2 norm of the square function.
inline RadialFunction square_function(const RadialFunction& f, double s, const Parameters& params,
                                      const BandRange& range = {}, int n_steps = 32) {
    detail::require(std::isfinite(s) && s > 0.0 && s < 2.0, "square function needs s in (0, 2)");
    detail::require_lp_params(params);
    const auto bands = lp_decompose(f, params, range, n_steps);
    RadialFunction out = RadialFunction::zeros(f.grid);
    double edge = 0.0;
    for (const auto& band : bands) {
        const double weight = std::pow(band.N(), 0.5 * params.alpha * s);
        for (int i = 0; i < out.size(); ++i) out.values[i] += std::pow(weight * band.projected[i], 2);
        if (band.index_exponent == range.j_min || band.index_exponent == range.j_max) {
            edge = std::max(edge, weight * lp_norm(band.projected, 2.0));
        }
    }
    for (double& v : out.values) v = std::sqrt(v);
    const double total = lp_norm(out, 2.0);
    out.meta["tail"] = total > 0.0 ? edge / total : 0.0;
    return out;
}

/// Write bands as CSV "j,r,value".
inline void write_bands_csv(std::ostream& os, const std::vector<DyadicBand>& bands) {
    os << "j,r,value\n" << std::setprecision(17);
    for (const auto& band : bands) {
        for (int i = 0; i < band.projected.size(); ++i) {
            os << band.index_exponent << ',' << band.projected.grid[i] << ',' << band.projected[i] << '\n';
        }
    }
}

/// Smooth bump supported in [lo, hi]: exp(-1/((x - lo)(hi - x))) scaled to peak 1.
struct BumpSpec {
    double lo = 0.5;
    double hi = 2.0;

    double operator()(double x) const {
        if (x <= lo || x >= hi) return 0.0;
        const double mid = 0.5 * (lo + hi);
        const double peak = std::exp(-1.0 / ((mid - lo) * (hi - mid)));
        return std::exp(-1.0 / ((x - lo) * (hi - x))) / peak;
    }
};

struct HormanderOptions {
    int grid_points = 4096;  // uniform points on [-half_width, half_width]
    double half_width = 8.0;
    int t_points = 81;       // log-spaced dilations in [2^-20, 2^20]
    double log2_t_range = 20.0;
};

/// ||g||_{H^s} with (1 + 4 pi^2 xi^2)^{s/2}, for samples of g on a uniform periodic grid of step dx.
inline double sobolev_norm(const std::vector<std::complex<double>>& samples, double dx, double s) {
    const int n = static_cast<int>(samples.size());
    std::vector<std::complex<double>> input(samples), spectrum(samples.size());
    static std::mutex planner;  // FFTW planning is not thread safe
    fftw_plan plan;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(input.data()),
                                reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }
    const double length = n * dx;
    double total = 0.0, high = 0.0, plain = 0.0;
    for (int m = 0; m < n; ++m) {
        const int freq = m <= n / 2 ? m : m - n;
        const double xi = freq / length;
        const double power = std::norm(spectrum[m] * dx);
        total += std::pow(1.0 + 4.0 * std::numbers::pi * std::numbers::pi * xi * xi, s) * power;
        plain += power;
        if (std::abs(freq) > 3 * n / 8) high += power;
    }
    if (plain > 0.0 && high > 1e-3 * plain) {
        throw NumericalError("Hormander norm: function is undersampled on the H^s grid");
    }
    return std::sqrt(total / length);
}

/// sup over log-spaced t of ||phi(.) F(t .)||_{H^s}, with the per-t norms.
struct HormanderResult {
    double sup = 0.0;
    std::vector<double> t;
    std::vector<double> norms;
};

inline HormanderResult hormander_condition_norm(const std::function<std::complex<double>(double)>& F, double s,
                                                const BumpSpec& phi = {}, const HormanderOptions& options = {}) {
    detail::require(std::isfinite(s) && s > 0.0, "Hormander norm needs s > 0");
    detail::require(options.grid_points >= 64 && options.t_points >= 2, "Hormander grid too small");
    const int n = options.grid_points;
    const double dx = 2.0 * options.half_width / n;
    HormanderResult result;
    std::vector<std::complex<double>> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < options.t_points; ++i) {
        const double t = std::exp2(-options.log2_t_range + 2.0 * options.log2_t_range * i / (options.t_points - 1));
        for (int j = 0; j < n; ++j) {
            const double x = -options.half_width + j * dx;
            const double weight = phi(x);
            samples[j] = weight == 0.0 ? std::complex<double>(0.0) : weight * F(t * x);
        }
        const double norm = sobolev_norm(samples, dx, s);
        result.t.push_back(t);
        result.norms.push_back(norm);
        result.sup = std::max(result.sup, norm);
    }
    return result;
}

}  // namespace hardy
