#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "hardy/special_functions.hpp"

using namespace hardy;

namespace {

constexpr double pi = std::numbers::pi;

// Gamma-ratio forms written out with tgamma, independent of the lgamma route in the library
double a_star_oracle(int d, double alpha) {
    const double r = std::tgamma((d + alpha) / 4.0) / std::tgamma((d - alpha) / 4.0);
    return -std::pow(2.0, alpha) * r * r;
}

double psi_oracle(double sigma, int d, double alpha) {
    return -std::pow(2.0, alpha) * std::tgamma((sigma + alpha) / 2.0) * std::tgamma((d - sigma) / 2.0) /
           (std::tgamma((d - sigma - alpha) / 2.0) * std::tgamma(sigma / 2.0));
}

}  // namespace

TEST(Constants, ClosedFormsInThreeDimensions) {
    EXPECT_NEAR(critical_coupling(3, 1.0) / (-2.0 / pi), 1.0, 1e-12);
    EXPECT_NEAR(lp_hardy_constant(3, 1.0, 2.0) / std::sqrt(2.0 / pi), 1.0, 1e-12);
    EXPECT_NEAR(riesz_constant(3, 1.0) * 2.0 * pi * pi, 1.0, 1e-12);
}

TEST(Constants, L2HardyConstantSquaredIsMinusCriticalCoupling) {
    for (int d : {2, 3, 4}) {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const double c = lp_hardy_constant(d, alpha, 2.0);
            EXPECT_NEAR(c * c / -critical_coupling(d, alpha), 1.0, 1e-12) << d << " " << alpha;
            EXPECT_NEAR(critical_coupling(d, alpha) / a_star_oracle(d, alpha), 1.0, 1e-12);
        }
    }
}

TEST(Constants, ApproachesClassicalHardyConstant) {
    // alpha -> 2 recovers (d-2)^2/4
    EXPECT_NEAR(-critical_coupling(5, 2.0 - 1e-9), 9.0 / 4.0, 1e-7);
}

TEST(Constants, RejectsBadArguments) {
    EXPECT_THROW(critical_coupling(3, 2.5), DomainError);
    EXPECT_THROW(critical_coupling(1, 1.0), DomainError);
    EXPECT_THROW(lp_hardy_constant(3, 1.0, 6.0), DomainError);
    EXPECT_THROW(lp_hardy_constant(3, 1.0, 1.0), DomainError);
}

TEST(Psi, EndpointsAndOracle) {
    for (int d : {2, 3, 5}) {
        for (double alpha : {0.5, 1.0, 1.5}) {
            EXPECT_EQ(psi(0.0, d, alpha), 0.0);
            const double top = 0.5 * (d - alpha);
            EXPECT_NEAR(psi(top, d, alpha), critical_coupling(d, alpha), 1e-10 * std::abs(critical_coupling(d, alpha)));
            for (double sigma : {-0.4 * alpha, 0.3 * top, 0.9 * top}) {
                EXPECT_NEAR(psi(sigma, d, alpha) / psi_oracle(sigma, d, alpha), 1.0, 1e-12);
            }
        }
    }
}

TEST(Psi, StrictlyDecreasing) {
    for (int d : {2, 3}) {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const double lo = -alpha + 1e-3, hi = 0.5 * (d - alpha);
            double prev = psi(lo, d, alpha);
            for (int i = 1; i < 200; ++i) {
                const double v = psi(std::min(hi, lo + (hi - lo) * i / 199.0), d, alpha);
                EXPECT_LT(v, prev);
                prev = v;
            }
        }
    }
}

TEST(Psi, DeltaRoundTrip) {
    for (int d : {2, 3, 4}) {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const double a_star = critical_coupling(d, alpha);
            for (double a : {0.9 * a_star, 0.3 * a_star, 0.5, 2.0, 10.0}) {
                const double delta = delta_from_coupling(a, d, alpha);
                EXPECT_NEAR(psi(delta, d, alpha), a, 1e-10 * std::max(1.0, std::abs(a)));
            }
        }
    }
    EXPECT_THROW(delta_from_coupling(-1.0, 3, 1.0), DomainError);
    EXPECT_NEAR(delta_from_coupling(critical_coupling(3, 1.0), 3, 1.0), 1.0, 1e-9);
}

TEST(Hormander, ThresholdSpotValues) {
    EXPECT_EQ(hormander_threshold(1, 0.5), 5.5);
    EXPECT_EQ(hormander_threshold(3, 1.0), 8.5);
}

TEST(Parameters, DeltaFollowsCoupling) {
    const auto p = Parameters::make(3, 1.0, 1.0);
    EXPECT_NEAR(psi(p.delta, 3, 1.0), 1.0, 1e-10);
    EXPECT_LT(p.delta, 0.0);
    EXPECT_EQ(p.delta_plus(), 0.0);
    EXPECT_GT(p.with_coupling(-0.5).delta_plus(), 0.0);
}

TEST(Bessel, AgreesWithBoost) {
    for (double nu : {-0.5, 0.0, 0.5, 1.5}) {
        for (double z : {1e-3, 0.7, 5.0, 40.0, 400.0}) {
            EXPECT_NEAR(bessel_j(nu, z), boost::math::cyl_bessel_j(nu, z), 1e-10) << nu << " " << z;
        }
    }
}

TEST(Bessel, RadialKernelElementaryForms) {
    // z^{-nu} J_nu(z); d = 3 gives sqrt(2/pi) sin(z)/z, d = 1 gives sqrt(2/pi) cos(z)
    const double c = std::sqrt(2.0 / pi);
    for (double z : {0.0, 1e-4, 0.5, 3.0, 50.0}) {
        EXPECT_NEAR(radial_fourier_kernel(3, z), c * (z == 0.0 ? 1.0 : std::sin(z) / z), 1e-12);
        EXPECT_NEAR(radial_fourier_kernel(1, z), c * std::cos(z), 1e-12);
    }
    for (double z : {1e-5, 0.3, 7.0, 30.0}) {
        EXPECT_NEAR(radial_fourier_kernel(2, z), boost::math::cyl_bessel_j(0.0, z), 1e-10);
        EXPECT_NEAR(radial_fourier_kernel(4, z), boost::math::cyl_bessel_j(1.0, z) / z, 1e-10);
    }
}
