#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablekernel/errors.hpp"
#include "stablekernel/density.hpp"
#include "stablekernel/nonlocal.hpp"
#include "stablekernel/parametrix.hpp"
#include "stablekernel/presets.hpp"

namespace sk = stablekernel;
using std::numbers::pi;

namespace {

const sk::SpaceTimeGrid& grid() {
    static const sk::SpaceTimeGrid g = sk::make_grid(1, 14.0 * pi, 1024, {0.5, 1.0});
    return g;
}

Eigen::VectorXd sample(double (*f)(double)) {
    Eigen::VectorXd v(grid().n_x);
    for (int j = 0; j < grid().n_x; ++j) v[j] = f(grid().coord(j));
    return v;
}

}  // namespace

TEST(Nonlocal, ConstantOperandGivesZero) {
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(grid().n_x, 3.0);
    for (const auto& name : {"constant", "sinusoidal", "even-cosine"}) {
        const auto s = sk::make_preset(name);
        EXPECT_NEAR(sk::apply_frozen_operator(s, {0.3, 0.0}, one, grid(), {0.0, 0.0}), 0.0, 1e-10) << name;
    }
}

TEST(Nonlocal, CosineIsAnEigenfunction) {
    const Eigen::VectorXd c = sample([](double x) { return std::cos(x); });
    EXPECT_NEAR(sk::apply_frozen_operator(sk::constant_model(1.0), {0.0, 0.0}, c, grid(), {0.0, 0.0}), -pi, 1e-4);
}

TEST(Nonlocal, Linearity) {
    const auto s = sk::sinusoidal_model(1.5);
    const Eigen::VectorXd f = sample([](double x) { return std::exp(-x * x); });
    const Eigen::VectorXd g = sample([](double x) { return std::sin(2.0 * x) / (1.0 + x * x); });
    const sk::Point x{grid().coord(530), 0.0}, y{0.2, 0.0};
    const double lhs = sk::apply_frozen_operator(s, y, 2.0 * f - 0.5 * g, grid(), x);
    const double rhs = 2.0 * sk::apply_frozen_operator(s, y, f, grid(), x) - 0.5 * sk::apply_frozen_operator(s, y, g, grid(), x);
    EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(Nonlocal, FullGeneratorEqualsFrozenForXIndependentKernel) {
    const auto s = sk::constant_model(0.75);
    const Eigen::VectorXd f = sample([](double x) { return std::exp(-x * x); });
    for (int j : {400, 512, 700}) {
        const sk::Point x{grid().coord(j), 0.0};
        EXPECT_NEAR(sk::apply_full_generator(s, f, grid(), x), sk::apply_frozen_operator(s, {1.7, 0.0}, f, grid(), x), 1e-9);
    }
}

TEST(Nonlocal, DriftActsOnRamp) {
    // locally linear operand: the generator difference with and without drift is b times the slope
    const auto s0 = sk::constant_model(1.5);
    const auto s1 = sk::with_constant_drift(s0, 0.3);
    const double w = 2.0 / 7.0;  // periodic on the 14 pi box
    const Eigen::VectorXd f = sample([](double x) { return std::sin(2.0 / 7.0 * x); });
    for (int j : {512, 600}) {
        const sk::Point x{grid().coord(j), 0.0};
        const double diff = sk::apply_full_generator(s1, f, grid(), x) - sk::apply_full_generator(s0, f, grid(), x);
        EXPECT_NEAR(diff, 0.3 * w * std::cos(w * x[0]), 1e-9);
    }
}

TEST(Nonlocal, FVanishesOnDiagonalAndForConstantKernels) {
    const auto s = sk::sinusoidal_model(1.5);
    const sk::Point y = grid().point(512);
    const auto q = sk::build_q(s, grid(), {y});
    EXPECT_NEAR(sk::compute_F(s, q.column(0), grid(), y, y), 0.0, 1e-12);
    EXPECT_NE(sk::compute_F(s, q.column(0), grid(), grid().point(540), y), 0.0);
    const auto c = sk::constant_model(1.5);
    const auto qc = sk::build_q(c, grid(), {y});
    EXPECT_NEAR(sk::compute_F(c, qc.column(0), grid(), grid().point(300), y), 0.0, 1e-12);
}

TEST(Nonlocal, SpectralConsistency) {
    const auto s = sk::constant_model(1.5);
    const auto f = sk::invert_density(s, {0.0, 0.0}, grid());
    EXPECT_LE(sk::spectral_consistency(s, {0.0, 0.0}, f.column(1), grid()), 1e-5);
}

TEST(Nonlocal, IncrementIntegral) {
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(grid().n_x, 1.0);
    // f = 1 on the box and 0 outside: only jumps leaving the box count, 2 (L/2)^{-alpha} / alpha from the centre
    const double half = 0.5 * grid().extent;
    EXPECT_NEAR(sk::increment_integral(sk::constant_model(1.5), {0.0, 0.0}, one, grid(), 512),
                2.0 * std::pow(half, -1.5) / 1.5, 1e-8);
    for (double alpha : {0.75, 1.5}) {
        const auto rep = sk::check_increment_integral(sk::constant_model(alpha), {0.0, 0.0},
                                                      sk::make_grid(1, 64.0, 4096, {0.25, 0.5, 1.0}));
        for (double t : {0.25, 0.5, 1.0}) EXPECT_TRUE(std::isfinite(sk::increment_ratio(rep, t))) << alpha << " " << t;
    }
}
