#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "stablekernel/errors.hpp"
#include "stablekernel/density.hpp"
#include "stablekernel/montecarlo.hpp"
#include "stablekernel/presets.hpp"

namespace sk = stablekernel;

TEST(MonteCarlo, SameSeedSameSamples) {
    const auto cfg = sk::make_sim_config(sk::sinusoidal_model(1.5), 500, 42);
    const auto a = sk::simulate_paths(cfg, {0.0, 0.0}, 0.5);
    const auto b = sk::simulate_paths(cfg, {0.0, 0.0}, 0.5);
    ASSERT_EQ(a.terminal.size(), 500u);
    for (std::size_t i = 0; i < a.terminal.size(); ++i) EXPECT_EQ(a.terminal[i], b.terminal[i]);
    auto other = cfg;
    other.seed = 43;
    EXPECT_NE(sk::simulate_paths(other, {0.0, 0.0}, 0.5).terminal[0], a.terminal[0]);
}

TEST(MonteCarlo, ConstantKernelAcceptsEveryCandidate) {
    const auto s = sk::simulate_paths(sk::make_sim_config(sk::constant_model(1.5), 2000, 7), {0.0, 0.0}, 1.0);
    EXPECT_GT(s.candidate_jumps, 0u);
    EXPECT_EQ(s.accepted_jumps, s.candidate_jumps);
}

TEST(MonteCarlo, DefaultEpsilonRule) {
    const auto spec = sk::constant_model(1.5);
    const double eps = sk::default_epsilon_cut(spec);
    // kappa1 S_d eps^{3-alpha} / (3-alpha) = 1e-3 with S_1 = 2
    EXPECT_NEAR(spec.kappa1 * 2.0 * std::pow(eps, 1.5) / 1.5, 1e-3, 1e-12);
    EXPECT_NEAR(sk::dominating_intensity(spec, eps), 2.0 * std::pow(eps, -1.5) / 1.5, 1e-9);
    const auto cfg = sk::make_sim_config(spec, 10, 1);
    EXPECT_LE(cfg.dt * sk::dominating_intensity(spec, cfg.epsilon_cut), 0.5 + 1e-12);
}

TEST(MonteCarlo, PureLevyAgreesWithFftDensity) {
    const auto spec = sk::constant_model(0.75);
    const auto samples = sk::simulate_paths(sk::make_sim_config(spec, 20000, 11), {0.0, 0.0}, 1.0);
    const auto f = sk::invert_density(spec, {0.0, 0.0}, sk::make_grid(1, 1024.0, 65536, {1.0}));
    const auto a = sk::density_agreement(samples, f, 5e-3);
    EXPECT_NEAR(a.threshold, 1.63 / std::sqrt(20000.0) + 5e-3, 1e-15);
    EXPECT_TRUE(a.pass) << a.ks;
    EXPECT_TRUE(sk::characteristic_function_check(samples, spec).pass);
}

TEST(MonteCarlo, ThresholdHalvesWithFourTimesFewerPaths) {
    const auto spec = sk::constant_model(1.5);
    const auto f = sk::invert_density(spec, {0.0, 0.0}, sk::make_grid(1, 256.0, 8192, {1.0}));
    const auto big = sk::density_agreement(sk::simulate_paths(sk::make_sim_config(spec, 8000, 3), {0.0, 0.0}, 1.0), f, 0.0);
    const auto small = sk::density_agreement(sk::simulate_paths(sk::make_sim_config(spec, 2000, 3), {0.0, 0.0}, 1.0), f, 0.0);
    EXPECT_NEAR(small.threshold / big.threshold, 2.0, 1e-12);
    EXPECT_EQ(big.pass, small.pass);
}

TEST(MonteCarlo, DriftShiftsTheCharacteristicFunction) {
    const auto spec = sk::with_constant_drift(sk::constant_model(1.5), 0.3);
    const auto samples = sk::simulate_paths(sk::make_sim_config(spec, 20000, 5), {0.0, 0.0}, 1.0);
    EXPECT_TRUE(sk::characteristic_function_check(samples, spec).pass);
}

TEST(MonteCarlo, ExitProbabilities) {
    const auto cfg = sk::make_sim_config(sk::constant_model(1.5), 4000, 9);
    const double t = 0.5, tau = std::pow(t, 1.0 / 1.5);
    const auto far = sk::estimate_exit_probability(cfg, {0.0, 0.0}, 100.0 * tau, t);
    EXPECT_LE(far.p_hat, 0.01);
    EXPECT_GT(far.ci_halfwidth, 0.0);  // Wilson interval stays open at p_hat = 0
    std::vector<sk::ExitTimeEstimate> sweep;
    for (double k : {2.0, 4.0, 8.0}) sweep.push_back(sk::estimate_exit_probability(cfg, {0.0, 0.0}, k * tau, t));
    for (std::size_t i = 1; i < sweep.size(); ++i)
        EXPECT_LE(sweep[i].p_hat, sweep[i - 1].p_hat + sweep[i].ci_halfwidth + sweep[i - 1].ci_halfwidth);
    const double C = sk::fit_exit_envelope(sweep, 1.5);
    for (const auto& e : sweep) EXPECT_LE(e.p_hat, e.bound_value * (1.0 + 1e-12));
    EXPECT_GT(C, 0.0);
}

TEST(MonteCarlo, ConfigErrors) {
    auto cfg = sk::make_sim_config(sk::constant_model(1.5), 100, 1);
    EXPECT_THROW(sk::estimate_exit_probability(cfg, {0.0, 0.0}, 1.0, 5.0 * cfg.dt), sk::ConfigError);
    auto bad = cfg;
    bad.n_paths = 0;
    EXPECT_THROW(sk::validate_sim_config(bad), sk::ConfigError);
    bad = cfg;
    bad.dt = 10.0;
    EXPECT_THROW(sk::validate_sim_config(bad), sk::ConfigError);
    EXPECT_THROW(sk::small_jump_mode_from_string("nope"), sk::ConfigError);
    EXPECT_EQ(sk::small_jump_mode_from_string(sk::to_string(sk::SmallJumpMode::drift_compensate)),
              sk::SmallJumpMode::drift_compensate);
}

TEST(MonteCarlo, SamplesCsv) {
    const auto s = sk::simulate_paths(sk::make_sim_config(sk::constant_model(1.5), 25, 1), {0.0, 0.0}, 0.1);
    const auto path = std::filesystem::temp_directory_path() / "stablekernel_samples.csv";
    sk::write_samples_csv(s, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "path_id,x");
    int n = 0;
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 25);
}
