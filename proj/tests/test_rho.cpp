#include <gtest/gtest.h>

#include <cmath>

#include "stablekernel/errors.hpp"
#include "stablekernel/presets.hpp"
#include "stablekernel/rho.hpp"

namespace sk = stablekernel;

TEST(Rho, TrivialValues) {
    for (double alpha : {0.75, 1.0, 1.5})
        for (int d : {1, 2}) EXPECT_DOUBLE_EQ(sk::eval_rho({0.0, 0.0}, 1.0, 0.0, alpha, d), 1.0);
    for (double t : {0.1, 0.5, 2.0}) EXPECT_NEAR(sk::eval_rho({1.5, 0.0}, t, 0.0, 1.5, 1), std::pow(t, -1.0 / 1.5), 1e-14);
}

TEST(Rho, SpaceIntegralClosedForm) {
    // 2 int_0^inf (1+x)^{-2.5} dx = 4/3, and the normalized integral does not depend on t
    const auto spec = sk::constant_model(1.5);
    const double c = sk::rho_constant(spec, {sk::RhoInequality::space_integral, {1.5, 0.0}, {}}, {});
    EXPECT_NEAR(c, 4.0 / 3.0, 1e-9);
}

TEST(Rho, BetaFunction) {
    EXPECT_NEAR(sk::beta_function(0.5, 0.5), M_PI, 1e-13);
    EXPECT_NEAR(sk::beta_function(2.0, 3.0), 1.0 / 12.0, 1e-15);
}

TEST(Rho, SpaceTimeConvolutionRejectsNonPositiveExponent) {
    const auto spec = sk::constant_model(1.5);
    EXPECT_THROW(sk::rho_constant(spec, {sk::RhoInequality::space_time_convolution, {0.0, 0.0}, {1.0, 0.0}}, {}),
                 sk::DomainError);
    EXPECT_THROW(sk::rho_constant(spec, {sk::RhoInequality::space_integral, {1.5, 1.0}, {}}, {}), sk::DomainError);
}

TEST(Rho, ConvolutionConstantsMatchAdaptiveOracle) {
    // frozen from an adaptive double-exponential evaluation of the same left sides
    const auto spec = sk::constant_model(1.0);
    const auto tuples = sk::default_rho_tuples(spec);
    ASSERT_EQ(tuples.size(), 9u);
    const double frozen[] = {1.07789, 2.13623, 2.77913, 0.695154, 0.941474, 1.05171};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(sk::rho_constant(spec, tuples[3 + i], {}), frozen[i], 2e-4 * frozen[i]) << i;
}

TEST(Rho, ShippedTuplesAreRefinementStable) {
    for (const auto& r : sk::verify_rho_inequalities(sk::constant_model(0.75), sk::default_rho_tuples(sk::constant_model(0.75)))) {
        EXPECT_EQ(r.status, sk::CheckStatus::pass) << r.id;
        EXPECT_TRUE(std::isfinite(r.constant("constant")));
    }
}
