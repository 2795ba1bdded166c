#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablekernel/errors.hpp"
#include "stablekernel/presets.hpp"
#include "stablekernel/symbol.hpp"

namespace sk = stablekernel;
using std::numbers::pi;

namespace {
// psi(u) = 2 |u|^alpha int_0^inf (1 - cos h) h^{-1-alpha} dh for n = 1, d = 1
double stable_symbol(double alpha, double u) {
    const double c = alpha == 1.0 ? pi / 2.0 : -std::tgamma(-alpha) * std::cos(pi * alpha / 2.0);
    return 2.0 * c * std::pow(std::abs(u), alpha);
}
}  // namespace

TEST(Symbol, VanishesAtZero) {
    for (const auto& name : {"constant", "sinusoidal", "even-cosine", "step-holder"})
        EXPECT_EQ(std::abs(sk::eval_symbol(sk::make_preset(name), {0.3, 0.0}, {0.0, 0.0})), 0.0) << name;
}

TEST(Symbol, CauchyValueIsPi) {
    const auto v = sk::eval_symbol(sk::constant_model(1.0), {0.0, 0.0}, {1.0, 0.0});
    EXPECT_NEAR(v.real(), pi, 1e-6);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(Symbol, StableClosedForm) {
    for (double alpha : {0.75, 1.25, 1.5})
        for (double u : {0.5, 1.0, 7.0}) {
            const auto v = sk::eval_symbol(sk::constant_model(alpha), {0.0, 0.0}, {u, 0.0});
            EXPECT_NEAR(v.real(), stable_symbol(alpha, u), 1e-6 * stable_symbol(alpha, u)) << alpha << " " << u;
        }
}

TEST(Symbol, Homogeneity) {
    const auto s = sk::constant_model(0.75);
    const double r = sk::eval_symbol(s, {0.0, 0.0}, {2.0, 0.0}).real() / sk::eval_symbol(s, {0.0, 0.0}, {1.0, 0.0}).real();
    EXPECT_NEAR(r, std::pow(2.0, 0.75), 1e-6);
}

TEST(Symbol, TwoDimensionalIsotropic) {
    // d = 2, n = 1: psi depends on |u| only
    const auto s = sk::constant_model(1.5, 2);
    const auto a = sk::eval_symbol(s, {0.0, 0.0}, {1.0, 0.0});
    const auto b = sk::eval_symbol(s, {0.0, 0.0}, {std::sqrt(0.5), std::sqrt(0.5)});
    EXPECT_NEAR(a.real(), b.real(), 1e-7 * a.real());
}

TEST(Symbol, TabulatedLatticeAndCoercivity) {
    const sk::FrequencyLattice lat{1, 256, 14.0 * pi};
    const auto sym = sk::tabulate_symbol(sk::constant_model(1.0), {0.0, 0.0}, lat);
    EXPECT_LT(sk::conjugate_symmetry_defect(sym), 1e-12);
    const auto rep = sk::check_coercivity(sym, sk::constant_model(1.0));
    EXPECT_EQ(rep.status, sk::CheckStatus::pass);
    EXPECT_NEAR(rep.constant("inf_ratio"), pi, 1e-4);
}

TEST(Symbol, CoercivityDominatesScaledConstantKernel) {
    const sk::FrequencyLattice lat{1, 128, 14.0 * pi};
    const auto spec = sk::sinusoidal_model(1.5);
    const auto sym = sk::tabulate_symbol(spec, {0.7, 0.0}, lat);
    const auto ref = sk::tabulate_symbol(sk::constant_model(1.5), {0.0, 0.0}, lat);
    const double got = sk::check_coercivity(sym, spec).constant("inf_ratio");
    const double base = sk::check_coercivity(ref, sk::constant_model(1.5)).constant("inf_ratio");
    EXPECT_GE(got, spec.kappa0 / spec.kappa1 * base * (1.0 - 1e-9));
}
