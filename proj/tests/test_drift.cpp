#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <memory>

#include "stablekernel/errors.hpp"
#include "stablekernel/drift.hpp"
#include "stablekernel/presets.hpp"
#include "stablekernel/spectral.hpp"

namespace sk = stablekernel;

namespace {

std::shared_ptr<sk::ParametrixRun> run_for(const sk::ModelSpec& s, int n = 64, int n_t = 40) {
    sk::ParametrixOptions o;
    o.n_max = 12;
    return std::make_shared<sk::ParametrixRun>(sk::run_parametrix(s, sk::default_parametrix_grid(s, n, n_t), o));
}

sk::DriftSeriesState drift_for(const sk::ModelSpec& s, int n = 64, int n_t = 40) {
    auto st = sk::make_drift_state(run_for(s, n, n_t));
    sk::build_drift_series(st);
    return st;
}

}  // namespace

TEST(Drift, ZeroDriftLeavesP) {
    const auto st = drift_for(sk::sinusoidal_model(1.5), 64, 20);
    ASSERT_EQ(st.terms.size(), 1u);
    for (std::size_t j = 0; j < st.l.values.size(); ++j) EXPECT_EQ((st.l.values[j] - st.p().values[j]).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(sk::duhamel_residual(st), 1e-10);
    const auto lb = sk::check_l_bounds(st);
    const auto pb = sk::check_heat_kernel_bounds(st.p(), st.run->spec, st.run->resolved_times());
    EXPECT_DOUBLE_EQ(lb.constant("sup_ratio"), pb.constant("sup_ratio"));
    EXPECT_DOUBLE_EQ(lb.constant("inf_ratio"), pb.constant("inf_ratio"));
}

TEST(Drift, FirstTermIsOddInDrift) {
    const auto up = drift_for(sk::make_preset("sinusoidal-drift", {{"drift", 0.3}}), 32, 20);
    const auto down = drift_for(sk::make_preset("sinusoidal-drift", {{"drift", -0.3}}), 32, 20);
    for (std::size_t j = 0; j < up.terms[1].values.size(); ++j)
        EXPECT_EQ((up.terms[1].values[j] + down.terms[1].values[j]).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Drift, TermsDecayForConstantKernel) {
    const auto st = drift_for(sk::with_constant_drift(sk::constant_model(1.5), 0.3), 64, 40);
    ASSERT_GE(st.gamma_log.size(), 2u);
    EXPECT_LT(st.gamma_log[1].sup_norm / st.gamma_log[0].sup_norm, 1.0);
}

TEST(Drift, MatchesMatrixExponentialOfTheLatticeGenerator) {
    const auto s = sk::make_preset("sinusoidal-drift");
    const auto st = drift_for(s, 64, 40);
    const auto& g = st.l.grid;
    const int n = g.n_x;
    Eigen::MatrixXd D(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[j] = 1.0;
        D.col(j) = sk::spectral::derivative(std::span<const double>(e.data(), n), g.extent, 1);
    }
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = s.drift_at({g.coord(i), 0.0})[0];
    const Eigen::MatrixXd L = sk::lattice_generator(s, g) + b.asDiagonal() * D;
    for (double t : {0.25, 0.5, 1.0}) {
        const Eigen::MatrixXd E = (t * L).exp() / g.dx();
        const auto& l = st.l.values[g.time_index(t)];
        EXPECT_LE((E - l).cwiseAbs().maxCoeff() / E.cwiseAbs().maxCoeff(), 1e-3) << t;
    }
}

TEST(Drift, DuhamelResidualAndRefinement) {
    const auto s = sk::make_preset("sinusoidal-drift");
    const double coarse = sk::duhamel_residual(drift_for(s, 64, 40));
    const double fine = sk::duhamel_residual(drift_for(s, 64, 80));
    EXPECT_LE(coarse, 1e-3);
    EXPECT_LE(fine, 0.65 * coarse);
}

TEST(Drift, GammaShapeAndMass) {
    const auto st = drift_for(sk::make_preset("sinusoidal-drift"), 64, 40);
    EXPECT_LE(st.gamma_fit_residual, 0.5);
    const auto rep = sk::check_l_bounds(st);
    EXPECT_LE(rep.constant("mass_deficit"), 5e-3);
    EXPECT_GT(rep.constant("inf_ratio"), 0.0);
}

TEST(Drift, RejectsUnsupportedRuns) {
    EXPECT_THROW(sk::make_drift_state(run_for(sk::constant_model(0.75), 32, 10)), sk::ConfigError);
    const auto s = sk::make_preset("sinusoidal-drift");
    auto partial = std::make_shared<sk::ParametrixRun>(
        sk::make_parametrix_run(s, sk::default_parametrix_grid(s, 32, 10), {{0.0, 0.0}}));
    sk::build_p(*partial);
    EXPECT_THROW(sk::make_drift_state(partial), sk::ConfigError);
}
