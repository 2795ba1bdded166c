#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "stablekernel/errors.hpp"
#include "stablekernel/density.hpp"
#include "stablekernel/presets.hpp"

namespace sk = stablekernel;
using std::numbers::pi;

namespace {

double cauchy(double x) { return 1.0 / (pi * pi + x * x); }
double cauchy_derivative(double x) { return -2.0 * x / ((pi * pi + x * x) * (pi * pi + x * x)); }

const sk::DensityField& cauchy_field() {
    static const sk::DensityField f =
        sk::invert_density(sk::constant_model(1.0), {0.0, 0.0}, sk::make_grid(1, 2048.0, 65536, {0.25, 0.5, 1.0}));
    return f;
}

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "stablekernel_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Density, CauchyValueAtOrigin) {
    const auto& f = cauchy_field();
    EXPECT_NEAR(f.values[2](f.grid.n_x / 2, 0), 1.0 / (pi * pi), 1e-5);
}

TEST(Density, CauchyProfileAndGradient) {
    const auto& f = cauchy_field();
    const auto grad = sk::density_gradient(f);
    ASSERT_EQ(grad.size(), 1u);
    for (double x : {-20.0, -3.0, -0.5, 0.0, 1.0, 4.5, 37.0}) {
        const int j = sk::nearest_index(f.grid, x);
        const double c = f.grid.coord(j);
        EXPECT_NEAR(f.values[2](j, 0), cauchy(c), 1e-5) << c;
        EXPECT_NEAR(grad[0].values[2](j, 0), cauchy_derivative(c), 1e-5) << c;
    }
}

TEST(Density, LatticeMassIsOne) {
    for (const auto& name : {"constant", "sinusoidal", "step-holder"}) {
        const auto f = sk::invert_density(sk::make_preset(name), {0.4, 0.0}, sk::make_grid(1, 64.0, 2048, {0.25, 1.0}));
        for (double m : f.mass_deficit) EXPECT_LE(std::abs(m), 1e-6) << name;
        for (const auto& v : f.values) EXPECT_NEAR(v.col(0).sum() * f.grid.dx(), 1.0, 1e-6) << name;
    }
}

TEST(Density, EvenKernelHasZeroGradientAtOrigin) {
    const auto f = sk::invert_density(sk::constant_model(1.5), {0.0, 0.0}, sk::make_grid(1, 64.0, 1024, {0.5, 1.0}));
    const auto g = sk::density_gradient(f);
    for (std::size_t ti = 0; ti < 2; ++ti) EXPECT_NEAR(g[0].values[ti](512, 0), 0.0, 1e-8);
}

TEST(Density, ScalingLaw) {
    const auto f = sk::invert_density(sk::constant_model(1.5), {0.0, 0.0}, sk::make_grid(1, 1024.0, 32768, {0.25, 0.5, 1.0}));
    EXPECT_LE(sk::scaling_residual(f, 1.5, 0.25), 1e-6);
    EXPECT_LE(sk::scaling_residual(f, 1.5, 0.5), 1e-6);
}

TEST(Density, Semigroup) {
    const auto f = sk::invert_density(sk::constant_model(0.75), {0.0, 0.0}, sk::make_grid(1, 64.0, 4096, {0.25, 0.5}));
    EXPECT_LE(sk::semigroup_residual(f, 0.25, 0.25), 1e-10);
}

TEST(Density, CauchyRatioWindow) {
    // the Cauchy form puts f_t(x) / (t (t + |x|)^{-2}) in [1/pi^2, 1 + 1/pi^2]; aliasing lifts the far interior
    const auto rep = sk::check_density_bounds(cauchy_field(), sk::constant_model(1.0));
    EXPECT_EQ(rep.status, sk::CheckStatus::pass);
    EXPECT_GE(rep.constant("inf_ratio"), 1.0 / (2.0 * pi * pi));
    EXPECT_LE(rep.constant("sup_ratio"), 2.0);
}

TEST(Density, RatiosInvariantUnderRescaling) {
    const double a = 2.0, alpha = 1.5;
    const auto s = sk::sinusoidal_model(alpha);
    const auto r = sk::rescale(s, a);
    const std::vector<double> times{0.25, 0.5, 1.0};
    std::vector<double> scaled;
    for (double t : times) scaled.push_back(std::pow(a, alpha) * t);
    const auto b0 = sk::check_density_bounds(sk::invert_density(s, {0.5, 0.0}, sk::make_grid(1, 64.0, 2048, times)), s);
    const auto b1 = sk::check_density_bounds(sk::invert_density(r, {1.0, 0.0}, sk::make_grid(1, 128.0, 2048, scaled)), r);
    EXPECT_NEAR(b1.constant("sup_ratio") / b0.constant("sup_ratio"), 1.0, 0.02);
    EXPECT_NEAR(b1.constant("inf_ratio") / b0.constant("inf_ratio"), 1.0, 0.02);
}

TEST(Density, HolderInBasePointIsStable) {
    const auto rep = sk::check_holder_in_y(sk::sinusoidal_model(1.5), {0.0, 0.0}, {0.5, 0.0},
                                           sk::make_grid(1, 64.0, 2048, {0.25, 0.5, 1.0}));
    EXPECT_TRUE(std::isfinite(rep.constant("sup_ratio")));
    EXPECT_EQ(rep.status, sk::CheckStatus::pass);
    EXPECT_THROW(sk::check_holder_in_y(sk::sinusoidal_model(1.5), {0.5, 0.0}, {0.5, 0.0}, sk::make_grid(1, 64.0, 512, {1.0})),
                 sk::DomainError);
}

TEST(Density, XIndependentKernelHasNoBasePointDependence) {
    const auto g = sk::make_grid(1, 64.0, 1024, {0.5});
    const auto a = sk::invert_density(sk::constant_model(1.5), {0.0, 0.0}, g);
    const auto b = sk::invert_density(sk::constant_model(1.5), {2.5, 0.0}, g);
    EXPECT_EQ((a.values[0] - b.values[0]).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Density, BinaryRoundTripAndCsvLineCount) {
    const auto f = sk::invert_density(sk::constant_model(1.5), {0.0, 0.0}, sk::make_grid(1, 64.0, 1024, {0.5, 1.0}));
    const auto bin = temp_path("field.bin");
    sk::write_field_binary(f, bin.string());
    const auto back = sk::read_field_binary(bin.string());
    ASSERT_EQ(back.values.size(), f.values.size());
    EXPECT_EQ((back.values[1] - f.values[1]).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(back.grid.n_x, 1024);

    const auto csv = temp_path("field.csv");
    sk::write_field_csv(f, csv.string());
    std::ifstream in(csv);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1 + 1024 * 2);
    EXPECT_THROW(sk::write_field_csv(f, "/nonexistent-dir/x.csv"), sk::IoError);
}
