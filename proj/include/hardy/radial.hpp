#pragma once

// Log-spaced radial grids and sampled radial profiles f(|x|) on R^d.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/special_functions.hpp"

namespace hardy {

class RadialGrid {
public:
    RadialGrid() = default;

    RadialGrid(double r_min, double r_max, int n, int d) : r_min_(r_min), r_max_(r_max), n_(n), d_(d) {
        detail::require(std::isfinite(r_min) && std::isfinite(r_max) && r_min > 0.0 && r_min < r_max,
                        "grid needs 0 < r_min < r_max");
        detail::require(n >= 16, "grid needs at least 16 points");
        detail::require(d >= 1, "dimension must be a positive integer");
        log_step_ = std::log(r_max / r_min) / (n - 1);
        auto nodes = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
        const double u0 = std::log(r_min);
        for (int i = 0; i < n; ++i) (*nodes)[i] = std::exp(u0 + i * log_step_);
        nodes->front() = r_min;
        nodes->back() = r_max;
        nodes_ = std::move(nodes);
    }

    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    int size() const { return n_; }
    int dimension() const { return d_; }
    double log_step() const { return log_step_; }
    std::span<const double> nodes() const { return {nodes_->data(), nodes_->size()}; }
    double operator[](std::size_t i) const { return (*nodes_)[i]; }

    /// Grid of the reciprocal variable: [1/r_max, 1/r_min] with the same point count.
    RadialGrid reciprocal() const { return RadialGrid(1.0 / r_max_, 1.0 / r_min_, n_, d_); }

    /// Same node set (to rounding) and dimension.
    bool same_as(const RadialGrid& other) const {
        auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); };
        return n_ == other.n_ && d_ == other.d_ && close(r_min_, other.r_min_) && close(r_max_, other.r_max_);
    }

    /// Index i with nodes[i] <= r < nodes[i+1], clamped to [0, n-2].
    int interval_of(double r) const {
        const double u = std::log(r / r_min_) / log_step_;
        return std::clamp(static_cast<int>(std::floor(u)), 0, n_ - 2);
    }

private:
    double r_min_ = 1.0;
    double r_max_ = 2.0;
    int n_ = 0;
    int d_ = 1;
    double log_step_ = 0.0;
    std::shared_ptr<const std::vector<double>> nodes_;
};

inline RadialGrid make_grid(double r_min, double r_max, int n, int d) { return RadialGrid(r_min, r_max, n, d); }

/// Samples of a radial profile on a grid. Metadata carries diagnostics such as
/// transform decay warnings, band tails, or kernel-column bump widths.
struct RadialFunction {
    RadialGrid grid;
    std::vector<double> values;
    std::map<std::string, double> meta;

    RadialFunction() = default;
    RadialFunction(RadialGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        detail::require(static_cast<int>(values.size()) == grid.size(), "values must align with grid nodes");
    }

    template <class F>
    static RadialFunction sample(const RadialGrid& g, F&& f) {
        std::vector<double> v(static_cast<std::size_t>(g.size()));
        for (int i = 0; i < g.size(); ++i) v[i] = f(g[i]);
        return RadialFunction(g, std::move(v));
    }

    static RadialFunction zeros(const RadialGrid& g) {
        return RadialFunction(g, std::vector<double>(static_cast<std::size_t>(g.size()), 0.0));
    }

    int size() const { return grid.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    RadialFunction& operator+=(const RadialFunction& o) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    RadialFunction& operator-=(const RadialFunction& o) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    RadialFunction& operator*=(double c) {
        for (double& v : values) v *= c;
        return *this;
    }
    friend RadialFunction operator+(RadialFunction a, const RadialFunction& b) { return a += b; }
    friend RadialFunction operator-(RadialFunction a, const RadialFunction& b) { return a -= b; }
    friend RadialFunction operator*(double c, RadialFunction a) { return a *= c; }
};

namespace detail {

inline void require_finite(const RadialFunction& f, const char* what) {
    if (!f.all_finite()) throw DomainError(std::string(what) + ": profile contains non-finite values");
}

/// Fritsch-Carlson monotone cubic slopes for samples y over uniform abscissae of step h.
inline std::vector<double> pchip_slopes(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    std::vector<double> delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / h;
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            m[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);  // harmonic mean keeps monotonicity
        }
    }
    return m;
}

inline double hermite(double y0, double y1, double m0, double m1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

}  // namespace detail

/// Monotone cubic interpolant of a profile in the log-radius variable. Strictly positive
/// profiles are interpolated in log|f| so power laws are reproduced exactly.
class RadialInterpolant {
public:
    explicit RadialInterpolant(const RadialFunction& f) : grid_(f.grid) {
        positive_ = std::all_of(f.values.begin(), f.values.end(), [](double v) { return v > 0.0; });
        y_ = f.values;
        if (positive_) {
            for (double& v : y_) v = std::log(v);
        }
        slopes_ = detail::pchip_slopes(y_, grid_.log_step());
    }

    /// Value at r; constant extension below r_min, zero above r_max.
    double operator()(double r) const {
        if (r <= grid_.r_min()) return value(0, 0.0);
        if (r > grid_.r_max() * (1.0 + 1e-14)) return 0.0;
        const double u = std::log(r / grid_.r_min()) / grid_.log_step();
        const int i = std::clamp(static_cast<int>(std::floor(u)), 0, grid_.size() - 2);
        return value(i, std::clamp(u - i, 0.0, 1.0));
    }

private:
    double value(int i, double t) const {
        if (i == 0 && t == 0.0) return positive_ ? std::exp(y_[0]) : y_[0];
        const double v = detail::hermite(y_[i], y_[i + 1], slopes_[i], slopes_[i + 1], grid_.log_step(), t);
        return positive_ ? std::exp(v) : v;
    }

    RadialGrid grid_;
    bool positive_ = false;
    std::vector<double> y_;
    std::vector<double> slopes_;
};

/// (omega_{d-1} int |f(r)|^p r^{p w} r^{d-1} dr)^{1/p} by the trapezoid rule in log r,
/// plus the cap [0, r_min] with f frozen at f(r_min) whenever p w + d > 0.
inline double lp_norm(const RadialFunction& f, double p, double weight_exponent = 0.0) {
    detail::require(std::isfinite(p) && p >= 1.0, "lp_norm needs p in [1, inf)");
    detail::require_finite(f, "lp_norm");
    const auto& g = f.grid;
    const int d = g.dimension();
    const double e = p * weight_exponent + d;  // power of r in |f|^p r^{pw} r^{d-1} dr, times r for du
    const double h = g.log_step();
    const double scale = f.max_abs();
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double term = std::pow(std::abs(f[i]) / scale, p) * std::pow(g[i], e);
        sum += (i == 0 || i == g.size() - 1) ? 0.5 * term : term;
    }
    sum *= h;
    if (e > 0.0) sum += std::pow(std::abs(f[0]) / scale, p) * std::pow(g.r_min(), e) / e;
    return scale * std::pow(sphere_area(d) * sum, 1.0 / p);
}

/// Samples of r -> f(lambda r) on the same grid.
inline RadialFunction dilate(const RadialFunction& f, double lambda) {
    detail::require(std::isfinite(lambda) && lambda > 0.0, "dilation factor must be positive");
    if (lambda == 1.0) return f;
    const RadialInterpolant interp(f);
    auto out = RadialFunction::sample(f.grid, [&](double r) { return interp(lambda * r); });
    return out;
}

/// Serialize as CSV with header "r,value".
inline void write_csv(std::ostream& os, const RadialFunction& f) {
    os << "r,value\n" << std::setprecision(17);
    for (int i = 0; i < f.size(); ++i) os << f.grid[i] << ',' << f[i] << '\n';
}

/// Parse a "r,value" CSV whose nodes form a log-spaced grid in dimension d.
inline RadialFunction read_csv(std::istream& is, int d) {
    std::string line;
    std::getline(is, line);
    if (line.rfind("r,value", 0) != 0) throw DomainError("radial CSV must start with header 'r,value'");
    std::vector<double> r, v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b)) throw DomainError("malformed radial CSV row: " + line);
        r.push_back(std::stod(a));
        v.push_back(std::stod(b));
    }
    detail::require(r.size() >= 16, "radial CSV needs at least 16 rows");
    RadialGrid g(r.front(), r.back(), static_cast<int>(r.size()), d);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(g[i] - r[i]) > 1e-9 * r[i]) throw DomainError("radial CSV nodes are not log-spaced");
    }
    return RadialFunction(g, std::move(v));
}

}  // namespace hardy
