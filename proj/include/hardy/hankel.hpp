#pragma once

// Radial (Fourier-Bessel) transform on log grids.
//
//   forward:  F(k) = (2 pi)^{d/2} int_0^inf f(r) (kr)^{-nu} J_nu(kr) r^{d-1} dr,   nu = (d-2)/2
//   inverse:  f(r) = (2 pi)^{-d}  [same integral with the roles of r and k exchanged]
//
// which is the d-dimensional transform F(k) = int f(|x|) e^{-i k.x} dx of a radial
// profile. The symbol of -Delta is |k|^2. A transform maps a grid [r_min, r_max] onto
// its reciprocal grid [1/r_max, 1/r_min]; being linear in the samples, it is assembled
// once per grid as a dense matrix and cached.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "hardy/quadrature.hpp"
#include "hardy/radial.hpp"

namespace hardy {

enum class Direction { forward, inverse };

/// Dense quadrature matrix of the forward transform from `source` to `source.reciprocal()`.
class HankelPlan {
public:
    explicit HankelPlan(const RadialGrid& source) : source_(source), target_(source.reciprocal()) { assemble(); }

    const RadialGrid& source() const { return source_; }
    const RadialGrid& target() const { return target_; }

    /// out = scale * M in
    void apply(std::span<const double> in, std::span<double> out, double scale = 1.0) const {
        const std::size_t n = static_cast<std::size_t>(source_.size());
        for (std::size_t j = 0; j < n; ++j) {
            const double* row = matrix_.data() + j * n;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += row[i] * in[i];
            out[j] = scale * acc;
        }
    }

private:
    static constexpr int kStencil = 6;  // local Lagrange interpolation order in log r

    void assemble() {
        const int n = source_.size();
        const int d = source_.dimension();
        const double h = source_.log_step();
        const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * d);
        const double max_phase = std::numbers::pi / 4.0;
        const auto& gl = quad::GaussLegendre<4>::get();
        const auto& gl8 = quad::GaussLegendre<8>::get();
        matrix_.assign(static_cast<std::size_t>(n) * n, 0.0);

        // monomial coefficients of the Lagrange basis on nodes 0..w-1 in y = x - (w-1)/2, for w = 2, 4, 6
        std::array<std::array<std::array<double, kStencil>, kStencil>, kStencil / 2> basis{};
        for (int half = 1; half <= kStencil / 2; ++half) {
            const int w = 2 * half;
            for (int a = 0; a < w; ++a) {
                std::array<double, kStencil> poly{};
                poly[0] = 1.0;
                double denom = 1.0;
                int degree = 0;
                for (int b = 0; b < w; ++b) {
                    if (b == a) continue;
                    const double root = b - 0.5 * (w - 1);
                    for (int i = ++degree; i > 0; --i) poly[i] = poly[i - 1] - root * poly[i];
                    poly[0] *= -root;
                    denom *= (a - b);
                }
                for (int i = 0; i < w; ++i) basis[half - 1][a][i] = poly[i] / denom;
            }
        }

        const double r0 = source_[0];
        const double r1 = source_[1];
        std::vector<double> rd(static_cast<std::size_t>(n));  // r^d at the nodes
        for (int m = 0; m < n; ++m) rd[m] = std::pow(source_[m], d);

        for (int j = 0; j < n; ++j) {
            const double k = target_[j];
            double* row = matrix_.data() + static_cast<std::size_t>(j) * n;

            // cap [0, r_min]: f extended as f0 + (f1 - f0)(r^2 - r0^2)/(r1^2 - r0^2)
            double cap0 = 0.0, cap1 = 0.0;
            for (std::size_t g = 0; g < gl8.x.size(); ++g) {
                const double r = 0.5 * r0 * (gl8.x[g] + 1.0);
                const double base = 0.5 * r0 * gl8.w[g] * norm * radial_fourier_kernel(d, k * r) * std::pow(r, d - 1);
                const double lin = (r * r - r0 * r0) / (r1 * r1 - r0 * r0);
                cap0 += base * (1.0 - lin);
                cap1 += base * lin;
            }
            row[0] += cap0;
            row[1] += cap1;

            for (int m = 0; m + 1 < n; ++m) {
                // centred stencils only; they shrink towards the grid ends, where one-sided
                // high-order stencils make the transform round trip expansive
                const int half = std::min({kStencil / 2, m + 1, n - 1 - m});
                const int width = 2 * half;
                const int s = m - half + 1;
                const double ra = source_[m];
                const int q = std::max(1, static_cast<int>(std::ceil(k * (source_[m + 1] - ra) / max_phase)));
                const double du = h / q;
                std::array<double, kStencil> moment{};
                std::array<double, 4> e0{};
                for (std::size_t g = 0; g < gl.x.size(); ++g) e0[g] = std::exp(0.5 * (gl.x[g] + 1.0) * du);
                const double step = std::exp(du);
                const double offset = m - s - 0.5 * (width - 1);
                double base = 1.0;  // exp(sub * du)
                for (int sub = 0; sub < q; ++sub, base *= step) {
                    for (std::size_t g = 0; g < gl.x.size(); ++g) {
                        const double e = base * e0[g];  // r / r_m
                        double rpow = e;
                        for (int i = 1; i < d; ++i) rpow *= e;
                        const double weight = gl.w[g] * radial_fourier_kernel(d, k * ra * e) * rpow;
                        const double y = offset + (sub + 0.5 * (gl.x[g] + 1.0)) / q;
                        double power = weight;
                        for (int i = 0; i < width; ++i, power *= y) moment[i] += power;
                    }
                }
                const double scale = 0.5 * du * norm * rd[m];
                for (int a = 0; a < width; ++a) {
                    double v = 0.0;
                    for (int i = 0; i < width; ++i) v += basis[half - 1][a][i] * moment[i];
                    row[s + a] += scale * v;
                }
            }
        }
    }

    RadialGrid source_;
    RadialGrid target_;
    std::vector<double> matrix_;
};

/// Shared, cached plan for a grid; safe to call from several threads.
inline std::shared_ptr<const HankelPlan> hankel_plan(const RadialGrid& grid) {
    using Key = std::tuple<double, double, int, int>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const HankelPlan>> cache;
    const Key key{grid.r_min(), grid.r_max(), grid.size(), grid.dimension()};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto plan = std::make_shared<const HankelPlan>(grid);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(plan)).first->second;
}

/// Radial Fourier transform of f; the result lives on f.grid.reciprocal().
/// Sets meta["decay_warning"] = 1 when |f(r_max)| exceeds 1e-8 max|f|.
inline RadialFunction hankel_transform(const RadialFunction& f, Direction direction = Direction::forward) {
    detail::require_finite(f, "hankel_transform");
    const auto plan = hankel_plan(f.grid);
    const int d = f.grid.dimension();
    const double scale = direction == Direction::forward ? 1.0 : std::pow(2.0 * std::numbers::pi, -d);
    RadialFunction out = RadialFunction::zeros(plan->target());
    plan->apply(f.values, out.values, scale);
    const double peak = f.max_abs();
    out.meta["decay_warning"] = (peak > 0.0 && std::abs(f.values.back()) > 1e-8 * peak) ? 1.0 : 0.0;
    return out;
}

/// Fourier multiplier m(|k|) applied to a radial profile: inverse(m * forward(f)).
template <class Symbol>
RadialFunction apply_symbol(const RadialFunction& f, Symbol&& symbol) {
    RadialFunction spectrum = hankel_transform(f, Direction::forward);
    for (int j = 0; j < spectrum.size(); ++j) spectrum.values[j] *= symbol(spectrum.grid[j]);
    RadialFunction out = hankel_transform(spectrum, Direction::inverse);
    out.meta.clear();
    return out;
}

}  // namespace hardy
