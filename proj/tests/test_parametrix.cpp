#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablekernel/errors.hpp"
#include "stablekernel/parametrix.hpp"
#include "stablekernel/presets.hpp"

namespace sk = stablekernel;
using std::numbers::pi;

namespace {

const sk::ParametrixRun& sinusoidal_run() {
    static const sk::ParametrixRun run = [] {
        const auto s = sk::sinusoidal_model(1.5);
        sk::ParametrixOptions o;
        o.n_max = 12;
        return sk::run_parametrix(s, sk::default_parametrix_grid(s, 64, 40), o);
    }();
    return run;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Parametrix, XIndependentKernelCollapses) {
    const auto s = sk::constant_model(1.5);
    const auto run = sk::run_parametrix(s, sk::default_parametrix_grid(s, 64, 20));
    for (std::size_t j = 0; j < run.p.values.size(); ++j) {
        EXPECT_EQ(max_abs(run.F.values[j]), 0.0);
        EXPECT_EQ(max_abs(run.phi.values[j]), 0.0);
        EXPECT_EQ(max_abs(run.p.values[j] - run.q.values[j]), 0.0);
    }
    // q(t, x, y) = f_t(y - x) does not depend on the frozen point
    const auto& q = run.q.values.back();
    EXPECT_NEAR(q(10, 20), q(30, 40), 1e-15);
}

TEST(Parametrix, CauchyQAtOrigin) {
    const auto q = sk::build_q(sk::constant_model(1.0), sk::make_grid(1, 2048.0, 4096, {1.0}), {{0.0, 0.0}});
    EXPECT_NEAR(q.values[0](2048, 0), 1.0 / (pi * pi), 1e-5);
}

TEST(Parametrix, QMassOverStartPoints) {
    const auto& run = sinusoidal_run();
    const double dx = run.grid.dx();
    for (const auto& q : run.q.values)
        for (int y = 0; y < q.cols(); y += 7) EXPECT_NEAR(q.col(y).sum() * dx, 1.0, 1e-6);
}

TEST(Parametrix, ConvolutionOfZeroIsZero) {
    const std::vector<double> mesh{0.0, 0.25, 0.5, 1.0};
    sk::TimeSeries zero(4, Eigen::MatrixXd::Zero(8, 8)), other(4, Eigen::MatrixXd::Random(8, 8));
    for (const auto& v : sk::space_time_convolve(zero, other, mesh, 0.1).values) EXPECT_EQ(max_abs(v), 0.0);
}

TEST(Parametrix, ConvolutionMatchesClosedFormAndSelfConverges) {
    // phi1 = t g(x - z), phi2 = t^2 h(z - y): the result is t^4 / 12 times the lattice convolution of g and h
    const int n = 16;
    const double cell = 0.25;
    Eigen::MatrixXd G(n, n), H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = std::min(std::abs(i - j), n - std::abs(i - j));
            G(i, j) = std::exp(-0.3 * d * d);
            H(i, j) = 1.0 / (1.0 + d * d);
        }
    const Eigen::MatrixXd spatial = G * H * cell;
    auto solve = [&](int J) {
        std::vector<double> mesh;
        sk::TimeSeries a, b;
        for (int k = 0; k <= J; ++k) {
            const double t = static_cast<double>(k) / J;
            mesh.push_back(t);
            a.push_back(t * G);
            b.push_back(t * t * H);
        }
        return sk::space_time_convolve(a, b, mesh, cell).values.back();
    };
    const Eigen::MatrixXd coarse = solve(128), fine = solve(256);
    const Eigen::MatrixXd exact = spatial / 12.0;
    EXPECT_LE(max_abs(fine - exact) / max_abs(exact), 1e-4);
    EXPECT_LE(max_abs(fine - coarse) / max_abs(fine), 1e-4);
}

TEST(Parametrix, SeriesContractsAndMassIsConserved) {
    const auto& run = sinusoidal_run();
    ASSERT_GE(run.convergence_log.size(), 3u);
    EXPECT_LT(run.convergence_log[2].ratio, 1.0);
    for (double m : run.p.mass_deficit) EXPECT_LE(std::abs(m), 5e-4);
}

TEST(Parametrix, PositiveOnInterior) {
    const auto& run = sinusoidal_run();
    const auto& g = run.grid;
    for (double t : run.resolved_times()) {
        const auto& p = run.p.values[g.time_index(t)];
        for (int x = 0; x < g.n_x; ++x)
            for (int y = 0; y < g.n_x; ++y)
                if (g.interior(static_cast<std::size_t>(x)) && g.interior(static_cast<std::size_t>(y))) {
                    ASSERT_GT(p(x, y), 0.0) << t;
                }
    }
}

TEST(Parametrix, ChapmanKolmogorov) {
    const auto c = sk::constant_model(1.5);
    const auto frozen = sk::run_parametrix(c, sk::default_parametrix_grid(c, 64, 40));
    EXPECT_LE(sk::chapman_kolmogorov_residual(frozen, 0.25, 0.25), 2e-4);
    EXPECT_LE(sk::chapman_kolmogorov_residual(sinusoidal_run(), 0.25, 0.5), 1e-3);
}

TEST(Parametrix, EnvelopesAndBounds) {
    const auto& run = sinusoidal_run();
    const auto phi = sk::check_phi_envelope(run);
    EXPECT_TRUE(std::isfinite(phi.constant("sup_ratio")));
    const auto b = sk::check_heat_kernel_bounds(run.p, run.spec, run.resolved_times());
    EXPECT_GT(b.constant("inf_ratio"), 0.0);
    EXPECT_TRUE(std::isfinite(b.constant("sup_ratio")));
}

TEST(Parametrix, EnvelopeGrowsAtMostLinearlyInVariation) {
    std::vector<double> c;
    for (double c1 : {0.1, 0.2, 0.4}) {
        const auto s = sk::sinusoidal_model(1.5, 1, 1.0, c1);
        c.push_back(sk::check_phi_envelope(sk::run_parametrix(s, sk::default_parametrix_grid(s, 64, 20))).constant("sup_ratio"));
    }
    // Phi is linear in the variation up to the F (x) F term; the constant per unit variation stays bounded
    EXPECT_LE((c[1] / 0.2) / (c[0] / 0.1), 1.25);
    EXPECT_LE((c[2] / 0.4) / (c[0] / 0.1), 1.25);
}

TEST(Parametrix, RatiosInvariantUnderRescaling) {
    const double a = 2.0, alpha = 1.5;
    const auto s = sk::sinusoidal_model(alpha);
    const auto g = sk::default_parametrix_grid(s, 64, 20);
    std::vector<double> scaled;
    for (double t : g.time_nodes) scaled.push_back(std::pow(a, alpha) * t);
    const auto r = sk::rescale(s, a);
    const auto gr = sk::make_grid(1, a * g.extent, g.n_x, scaled, g.grading);
    const auto p0 = sk::run_parametrix(s, g), p1 = sk::run_parametrix(r, gr);
    const auto b0 = sk::check_heat_kernel_bounds(p0.p, s, {0.5, 1.0});
    std::vector<double> t1{std::pow(a, alpha) * 0.5, std::pow(a, alpha)};
    const auto b1 = sk::check_heat_kernel_bounds(p1.p, r, t1);
    EXPECT_NEAR(b1.constant("sup_ratio") / b0.constant("sup_ratio"), 1.0, 0.02);
    EXPECT_NEAR(b1.constant("inf_ratio") / b0.constant("inf_ratio"), 1.0, 0.02);
}

TEST(Parametrix, RejectsUnsupportedInput) {
    EXPECT_THROW(sk::run_parametrix(sk::constant_model(1.5, 2), sk::make_grid(2, 16.0, 16, {1.0})), sk::ConfigError);
    const auto s = sk::constant_model(1.5);
    sk::ParametrixOptions o;
    o.n_max = 0;
    EXPECT_THROW(sk::run_parametrix(s, sk::default_parametrix_grid(s, 32, 10), o), sk::ConfigError);
    EXPECT_THROW(sk::make_parametrix_run(s, sk::default_parametrix_grid(s, 32, 10), {{0.1234, 0.0}}), sk::ConfigError);
}
