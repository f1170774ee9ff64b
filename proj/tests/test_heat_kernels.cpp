#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "hardy/heat_kernels.hpp"

using namespace hardy;

namespace {

constexpr double pi = std::numbers::pi;

double poisson(double t, double r, int d) {
    // Gamma((d+1)/2) / pi^{(d+1)/2}
    const double c = d == 1 ? 1.0 / pi : d == 2 ? 0.5 / pi : 1.0 / (pi * pi);
    return c * t / std::pow(t * t + r * r, 0.5 * (d + 1));
}

double mass(int d, double alpha) {
    auto integrand = [&](double r) { return free_heat_kernel(1.0, r, d, alpha) * std::pow(r, d - 1); };
    boost::math::quadrature::tanh_sinh<double> inner;
    boost::math::quadrature::exp_sinh<double> outer;
    const double area = 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
    return area * (inner.integrate(integrand, 0.0, 1.0) + outer.integrate(integrand, 1.0, HUGE_VAL));
}

}  // namespace

TEST(FreeKernel, MatchesPoissonClosedForm) {
    for (int d : {1, 2, 3}) {
        for (double t : {0.1, 1.0, 10.0}) {
            for (double ratio : {0.0, 0.01, 0.3, 1.0, 2.0, 2.5, 5.0, 12.0, 30.0, 50.0}) {
                const double r = ratio * t;
                const double want = poisson(t, r, d);
                EXPECT_NEAR(free_heat_kernel(t, r, d, 1.0) / want, 1.0, 1e-6) << d << " " << t << " " << r;
            }
        }
    }
}

TEST(FreeKernel, GaussianLimitShape) {
    // alpha close to 2 approaches (4 pi t)^{-d/2} e^{-r^2/4t} near the centre
    const double a = 1.999;
    for (double r : {0.0, 0.5, 1.0}) {
        EXPECT_NEAR(free_heat_kernel(1.0, r, 3, a) / (std::pow(4.0 * pi, -1.5) * std::exp(-0.25 * r * r)), 1.0, 2e-2);
    }
}

TEST(FreeKernel, UnitMass) {
    EXPECT_NEAR(mass(2, 0.5), 1.0, 1e-5);
    EXPECT_NEAR(mass(3, 1.5), 1.0, 1e-5);
}

TEST(FreeKernel, ScalingCovariance) {
    // K(t, r) = t^{-d/alpha} K(1, r t^{-1/alpha})
    for (auto [d, alpha] : {std::pair{3, 1.0}, {2, 0.5}, {3, 1.5}}) {
        for (double t : {0.05, 3.0}) {
            for (double r : {0.0, 0.2, 1.7, 9.0}) {
                const double lhs = free_heat_kernel(t, r, d, alpha);
                const double rhs = std::pow(t, -d / alpha) * free_heat_kernel(1.0, r * std::pow(t, -1.0 / alpha), d, alpha);
                EXPECT_NEAR(lhs / rhs, 1.0, 1e-8);
            }
        }
    }
}

TEST(FreeKernel, PolynomialTail) {
    // K(1, r) r^{d+alpha} tends to alpha 2^{alpha-1} Gamma((d+alpha)/2) sin(pi alpha/2) Gamma(alpha/2) / pi^{d/2+1}
    const int d = 3;
    const double alpha = 1.5;
    const double c = alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) * std::sin(0.5 * pi * alpha) *
                     std::tgamma(0.5 * alpha) / std::pow(pi, 0.5 * d + 1.0);
    EXPECT_NEAR(free_heat_kernel(1.0, 1e4, d, alpha) * std::pow(1e4, d + alpha) / c, 1.0, 1e-3);
}

TEST(FreeKernel, RejectsBadInput) {
    EXPECT_THROW(free_heat_kernel(0.0, 1.0, 3, 1.0), DomainError);
    EXPECT_THROW(free_heat_kernel(1.0, -1.0, 3, 1.0), DomainError);
    EXPECT_THROW(free_heat_kernel(1.0, 1.0, 3, 2.0), DomainError);
}

TEST(Envelope, OnDiagonalConstantWithoutCoupling) {
    const auto params = Parameters::make(3, 1.0, 0.0);
    const double c = free_heat_kernel(1.0, 0.0, 3, 1.0);
    for (double t : {0.1, 1.0, 10.0}) {
        for (double x : {0.3, 2.0}) {
            const auto env = heat_envelope(t, x, x, 0.0, params);
            EXPECT_NEAR(free_heat_kernel(t, 0.0, 3, 1.0) / env.value, c, 1e-10 * c);
        }
    }
}

TEST(Envelope, WeightsAndTail) {
    const auto params = Parameters::make(3, 1.0, 1.0);
    const double delta = params.delta;
    const auto env = heat_envelope(1.0, 0.25, 2.0, 3.0, params, 0.5, 2.0);
    const double want = std::pow(4.0, delta) * 1.0 * std::min(1.0, 1.0 / std::pow(3.0, 4));
    EXPECT_NEAR(env.value, want, 1e-14);
    EXPECT_NEAR(env.low, 0.5 * want, 1e-14);
    EXPECT_NEAR(env.high, 2.0 * want, 1e-14);
    EXPECT_THROW(heat_envelope(-1.0, 1.0, 1.0, 0.0, params), DomainError);
}

TEST(Semigroup, FreeFlowOfGaussian) {
    // alpha = 1 applied twice for t/2 equals one step of t
    const auto params = Parameters::make(3, 1.0, 0.0);
    const auto g = default_grid(3, 384);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
    const auto once = hardy_semigroup_apply(f, 1.0, params, 4);
    const auto twice = free_semigroup_apply(free_semigroup_apply(f, 0.5, 1.0), 0.5, 1.0);
    for (int i = 0; i < g.size(); i += 11) EXPECT_NEAR(once[i], twice[i], 1e-8);
}

TEST(Semigroup, ComparisonInCoupling) {
    // larger potentials give smaller kernels: e^{-t(|p|^a + V)} <= e^{-t L_a} for V >= a |x|^{-alpha}
    const auto g = default_grid(3, 384);
    const auto p0 = Parameters::make(3, 1.0, 0.0);
    const auto c0 = hardy_kernel_column(1.0, 1.0, p0, 32, g);
    const auto c1 = hardy_kernel_column(1.0, 1.0, p0.with_coupling(1.0), 32, g);
    const auto c2 = hardy_kernel_column(1.0, 1.0, p0.with_coupling(2.0), 32, g);
    const auto sandwich = hardy_kernel_column(1.0, 1.0, p0.with_coupling(1.0), 32, g,
                                              PotentialSpec::sandwiched(1.0, 2.0, [](double r) { return r < 1.0 ? 1.0 : 0.0; }));
    const double floor = 1e-10 * c0.max_abs();
    for (int i = 0; i < g.size(); ++i) {
        if (g[i] > 30.0) break;
        EXPECT_LE(c1[i], c0[i] + floor) << g[i];
        EXPECT_LE(c2[i], c1[i] + floor) << g[i];
        EXPECT_LE(sandwich[i], c1[i] + floor) << g[i];
        EXPECT_GE(sandwich[i], c2[i] - floor) << g[i];
    }
}

TEST(Semigroup, ColumnMatchesAngularAverageOfFreeKernel) {
    const auto params = Parameters::make(3, 1.0, 0.0);
    const auto g = default_grid(3, 512);
    const double y = 2.0;
    const auto column = hardy_kernel_column(1.0, y, params, 1, g);
    // the column is smeared over the Gaussian shell; integrate the same shell against the oracle
    const double width = column.meta.at("bump_width");
    auto shell = [&](double rho) { return std::exp(-0.5 * std::pow((rho - y) / width, 2)) * rho * rho; };
    const int n = 801;
    const double lo = y - 8.0 * width, step = 16.0 * width / (n - 1);
    double mass = 0.0;
    for (int k = 0; k < n; ++k) mass += shell(lo + k * step);
    for (int i = 0; i < g.size(); i += 23) {
        const double x = g[i];
        if (x < 0.05 || x > 20.0) continue;
        double want = 0.0;
        for (int k = 0; k < n; ++k) {
            const double rho = lo + k * step;
            want += shell(rho) * angular_average(3, x, rho, [](double r) { return poisson(1.0, r, 3); });
        }
        EXPECT_NEAR(column[i] / (want / mass), 1.0, 1e-3) << x;
    }
}

TEST(Semigroup, DilationCovariance) {
    // e^{-tL}[f(lambda .)](r) = (e^{-lambda^alpha t L} f)(lambda r)
    const auto params = Parameters::make(3, 1.0, 1.0);
    const auto g = default_grid(3, 512);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
    const double lambda = 2.0;
    const auto lhs = hardy_semigroup_apply(dilate(f, lambda), 0.5, params, 64);
    const RadialInterpolant rhs(hardy_semigroup_apply(f, lambda * 0.5, params, 64));
    for (int i = 0; i < g.size(); i += 19) {
        const double r = g[i];
        if (r < 0.01 || r > 10.0) continue;
        EXPECT_NEAR(lhs[i], rhs(lambda * r), 2e-3 * lhs.max_abs()) << r;
    }
}

TEST(Semigroup, NegativeCouplingUnsupported) {
    const auto g = default_grid(3, 64);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
    EXPECT_THROW(hardy_semigroup_apply(f, 1.0, Parameters::make(3, 1.0, -0.1), 4), UnsupportedError);
}

TEST(LMBounds, PositiveAndSymmetric) {
    const auto params = Parameters::make(3, 1.0, 1.0);
    const auto a = lm_bounds(1.0, 0.5, 3.0, 2.5, params);
    const auto b = lm_bounds(1.0, 3.0, 0.5, 2.5, params);
    EXPECT_GT(a.L + a.M, 0.0);
    EXPECT_NEAR(a.L, b.L, 1e-14 * std::max(1.0, a.L));
    EXPECT_NEAR(a.M, b.M, 1e-14 * std::max(1.0, a.M));
}

TEST(KernelCsv, Header) {
    std::ostringstream os;
    write_kernel_csv(os, {KernelSample{1.0, 0.0, 0.0, 0.0, 0.1, 0.0, HUGE_VAL}});
    EXPECT_EQ(os.str().substr(0, 32), "t,x,y,dist,value,env_low,env_hig");
}
