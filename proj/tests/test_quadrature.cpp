#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablekernel/errors.hpp"
#include "stablekernel/quadrature.hpp"

namespace sk = stablekernel;
using std::numbers::pi;

TEST(Quadrature, GaussRuleIsExactForPolynomials) {
    for (int n : {4, 8, 16, 32}) {
        const auto& rule = sk::quad::gauss_legendre(n);
        ASSERT_EQ(static_cast<int>(rule.x.size()), n);
        const int deg = 2 * n - 1;
        const double v = sk::quad::panel([&](double x) { return std::pow(x, deg - 1); }, 0.0, 2.0, rule);
        EXPECT_NEAR(v, std::pow(2.0, deg) / deg, 1e-12 * std::pow(2.0, deg));
    }
    EXPECT_THROW(sk::quad::gauss_legendre(7), std::invalid_argument);
}

TEST(Quadrature, FiniteHandlesEndpointSingularities) {
    // int_0^1 x^{-1/2} = 2 and int_1^3 (3-x)^{-0.9} = 2^{0.1}/0.1
    EXPECT_NEAR(sk::quad::finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0), 2.0, 1e-10);
    EXPECT_NEAR(sk::quad::finite([](double x) { return std::pow(3.0 - x, -0.9); }, 1.0, 3.0), std::pow(2.0, 0.1) / 0.1, 1e-6);
    EXPECT_EQ(sk::quad::finite([](double) { return 1.0; }, 2.0, 1.0), 0.0);
}

TEST(Quadrature, FiniteOnIntervalsAwayFromOrigin) {
    EXPECT_NEAR(sk::quad::finite([](double x) { return std::log(x); }, 1e6, 1e6 + 1.0),
                (1e6 + 1) * std::log(1e6 + 1) - 1e6 * std::log(1e6) - 1.0, 1e-8);
}

TEST(Quadrature, SemiInfinite) {
    EXPECT_NEAR(sk::quad::semi_infinite([](double x) { return std::exp(-x); }, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(sk::quad::semi_infinite([](double x) { return std::pow(x, -2.5); }, 1.0), 1.0 / 1.5, 1e-10);
}

TEST(Quadrature, PowerTailMatchesClosedForms) {
    // kappa = 0: int_R^inf r^{-1-beta} dr = R^{-beta}/beta
    EXPECT_NEAR(std::real(sk::quad::power_tail(0.0, 0.5, 4.0)), 1.0, 1e-14);
    // int_1^inf e^{i r} r^{-2} dr = cos 1 + sin 1 - int... checked against E_2 via a slow panel sum
    const double R = 1.0, kappa = 1.0, beta = 1.0;
    std::complex<double> ref = 0.0;
    const auto& rule = sk::quad::gauss_legendre(16);
    for (double a = R; a < 2e4; a += 0.25)
        ref += sk::quad::panel([&](double r) { return std::exp(std::complex<double>(0.0, kappa * r)) * std::pow(r, -1.0 - beta); },
                               a, a + 0.25, rule);
    const std::complex<double> got = sk::quad::power_tail(kappa, beta, R);
    EXPECT_NEAR(got.real(), ref.real(), 2e-8);
    EXPECT_NEAR(got.imag(), ref.imag(), 2e-8);
}
