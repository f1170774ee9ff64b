#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "hardy/hankel.hpp"
#include "hardy/radial.hpp"

using namespace hardy;

namespace {

constexpr double pi = std::numbers::pi;

RadialFunction gaussian(const RadialGrid& g, double width = 1.0) {
    return RadialFunction::sample(g, [width](double r) { return std::exp(-r * r / (width * width)); });
}

}  // namespace

TEST(Grid, ReciprocalAndLookup) {
    const auto g = make_grid(1e-3, 1e3, 121, 3);
    EXPECT_DOUBLE_EQ(g.r_min(), 1e-3);
    EXPECT_DOUBLE_EQ(g.r_max(), 1e3);
    EXPECT_NEAR(g[60], 1.0, 1e-12);
    const auto rg = g.reciprocal();
    EXPECT_DOUBLE_EQ(rg.r_min(), 1e-3);
    EXPECT_EQ(rg.size(), 121);
    EXPECT_THROW(make_grid(1.0, 0.5, 64, 3), DomainError);
    EXPECT_THROW(make_grid(1e-3, 1.0, 4, 3), DomainError);
}

TEST(Norms, GaussianClosedForms) {
    // ||e^{-r^2}||_p^p on R^d = (pi/p)^{d/2}
    for (int d : {1, 2, 3}) {
        const auto g = make_grid(1e-4, 20.0, 800, d);
        const auto f = gaussian(g);
        for (double p : {1.0, 2.0, 3.0}) {
            EXPECT_NEAR(lp_norm(f, p), std::pow(pi / p, 0.5 * d / p), 1e-8) << d << " " << p;
        }
    }
    // weighted: || |x|^{-1/2} e^{-r^2} ||_2^2 = 4 pi int r e^{-2r^2} dr = pi in d = 3
    const auto g = make_grid(1e-5, 20.0, 1000, 3);
    EXPECT_NEAR(std::pow(lp_norm(gaussian(g), 2.0, -0.5), 2), pi, 1e-7);
}

TEST(Norms, DilationScaling) {
    const auto g = make_grid(1e-5, 100.0, 1024, 3);
    const auto f = gaussian(g);
    for (double lambda : {0.5, 2.0}) {
        // ||f(lambda .)||_p = lambda^{-d/p} ||f||_p
        EXPECT_NEAR(lp_norm(dilate(f, lambda), 2.0) / lp_norm(f, 2.0), std::pow(lambda, -1.5), 1e-6);
    }
}

TEST(Interpolant, ReproducesSmoothProfile) {
    const auto g = make_grid(1e-3, 10.0, 400, 3);
    const auto f = gaussian(g);
    const RadialInterpolant interp(f);
    for (double r : {2e-3, 0.37, 1.0, 2.5, 5.0}) EXPECT_NEAR(interp(r), std::exp(-r * r), 1e-6);
}

TEST(Csv, RoundTrip) {
    const auto g = make_grid(1e-2, 10.0, 64, 3);
    const auto f = gaussian(g);
    std::stringstream ss;
    write_csv(ss, f);
    EXPECT_EQ(ss.str().substr(0, 8), "r,value\n");
    const auto back = read_csv(ss, 3);
    ASSERT_EQ(back.size(), f.size());
    for (int i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
    std::stringstream bad("x,y\n1,2\n");
    EXPECT_THROW(read_csv(bad, 3), DomainError);
}

TEST(Hankel, GaussianTransform) {
    // F[e^{-r^2}](k) = pi^{d/2} e^{-k^2/4}
    for (int d : {1, 2, 3, 4}) {
        const auto g = make_grid(1e-4, 30.0, 512, d);
        const auto F = hankel_transform(gaussian(g));
        double worst = 0.0;
        for (int j = 0; j < F.size(); ++j) {
            const double k = F.grid[j];
            worst = std::max(worst, std::abs(F[j] - std::pow(pi, 0.5 * d) * std::exp(-0.25 * k * k)));
        }
        EXPECT_LT(worst, 1e-6 * std::pow(pi, 0.5 * d)) << d;
    }
}

TEST(Hankel, RoundTripAndPlancherel) {
    const int d = 3;
    const auto g = make_grid(1e-4, 30.0, 512, d);
    const auto f = gaussian(g, 1.3);
    const auto F = hankel_transform(f);
    const auto back = hankel_transform(F, Direction::inverse);
    double worst = 0.0;
    for (int i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(back[i] - f[i]));
    EXPECT_LT(worst, 1e-6);
    // ||F||_2 = (2 pi)^{d/2} ||f||_2
    EXPECT_NEAR(lp_norm(F, 2.0) / lp_norm(f, 2.0), std::pow(2.0 * pi, 1.5), 1e-5 * std::pow(2.0 * pi, 1.5));
}

TEST(Hankel, DecayWarning) {
    const auto g = make_grid(1e-3, 2.0, 128, 3);
    EXPECT_EQ(hankel_transform(gaussian(g)).meta.at("decay_warning"), 1.0);
    const auto wide = make_grid(1e-3, 20.0, 256, 3);
    EXPECT_EQ(hankel_transform(gaussian(wide)).meta.at("decay_warning"), 0.0);
}

TEST(Hankel, GaussianHeatSymbol) {
    // e^{t Delta} e^{-r^2} = (1 + 4t)^{-d/2} e^{-r^2/(1 + 4t)}
    const auto g = make_grid(1e-4, 30.0, 512, 3);
    const double t = 0.7;
    const auto u = apply_symbol(gaussian(g), [t](double k) { return std::exp(-t * k * k); });
    for (int i = 0; i < g.size(); i += 17) {
        const double r = g[i];
        EXPECT_NEAR(u[i], std::pow(1.0 + 4.0 * t, -1.5) * std::exp(-r * r / (1.0 + 4.0 * t)), 1e-7) << r;
    }
}
