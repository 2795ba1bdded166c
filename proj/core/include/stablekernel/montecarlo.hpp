#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "stablekernel/density.hpp"
#include "stablekernel/model.hpp"

namespace stablekernel {

enum class SmallJumpMode { drift_compensate, gaussian_substitute };
const char* to_string(SmallJumpMode m);
SmallJumpMode small_jump_mode_from_string(const std::string& s);

struct SimConfig {
    ModelSpec spec;
    double epsilon_cut = 0.0;
    double dt = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    SmallJumpMode small_jump_mode = SmallJumpMode::gaussian_substitute;
};

/// kappa1 |S^{d-1}| eps^{-alpha} / alpha, the rate of candidate jumps above eps.
double dominating_intensity(const ModelSpec& spec, double epsilon_cut);
/// eps solving kappa1 |S^{d-1}| eps^{3-alpha} / (3 - alpha) = 1e-3, capped at 0.5.
double default_epsilon_cut(const ModelSpec& spec);
/// Default config: eps from default_epsilon_cut, dt = min(0.5 / lambda_max, 0.01).
SimConfig make_sim_config(const ModelSpec& spec, std::size_t n_paths, std::uint64_t seed);
/// Throws ConfigError unless eps in (0, 1), dt > 0, dt lambda_max <= 0.5 and n_paths > 0.
void validate_sim_config(const SimConfig& cfg);

struct SampleSet {
    int dim = 1;
    Point x0{0.0, 0.0};
    double horizon = 0.0;
    std::vector<Point> terminal;
    std::size_t candidate_jumps = 0;
    std::size_t accepted_jumps = 0;
};

/// Terminal points of n_paths independent paths. Large jumps are thinned from the dominating
/// kernel; small jumps are replaced by their compensated mean (and a Gaussian with the
/// truncated second moment in gaussian_substitute mode). Throws ModelViolation when
/// n(x, h) exceeds kappa1.
SampleSet simulate_paths(const SimConfig& cfg, const Point& x0, double horizon);

/// Path id and terminal coordinates, one row per path.
void write_samples_csv(const SampleSet& samples, const std::string& path);

struct ExitTimeEstimate {
    double r = 0.0;
    double t = 0.0;
    Point x0{0.0, 0.0};
    double p_hat = 0.0;
    double ci_halfwidth = 0.0;  ///< 95% Wilson score half-width
    double bound_value = 0.0;   ///< C t r^{-alpha} once an envelope has been fitted
};

/// P(tau_{B_r(x0)} <= t), with exits detected when the state after an Euler step or a jump
/// leaves the ball (no bridge correction, so the estimate is biased low). Throws ConfigError
/// unless t >= 10 dt.
ExitTimeEstimate estimate_exit_probability(const SimConfig& cfg, const Point& x0, double r, double t);
/// C = max p_hat r^alpha / t over the sweep; fills bound_value and returns C.
double fit_exit_envelope(std::vector<ExitTimeEstimate>& sweep, double alpha);

struct AgreementReport {
    std::size_t n = 0;
    double ks = 0.0;
    double threshold = 0.0;  ///< 1.63 / sqrt(n) + allowance
    double allowance = 0.0;
    double chi2 = 0.0;
    int chi2_dof = 0;
    bool pass = false;
};

/// Kolmogorov-Smirnov distance between the samples (wrapped onto the lattice torus) and the
/// lattice CDF of the field at the sample horizon: row x0 of a per-slice field, or the frozen
/// density shifted by x0. Also a chi-square over 40 equiprobable bins. d = 1.
AgreementReport density_agreement(const SampleSet& samples, const DensityField& field, double allowance = 1e-2);

struct CharacteristicCheck {
    std::vector<double> u;
    std::vector<std::complex<double>> empirical;
    std::vector<std::complex<double>> expected;
    std::vector<double> z_score;  ///< max of the real and imaginary parts in standard errors
    bool pass = false;
};

/// E exp(i u (X_T - x0)) against exp(-T psi(u) + i u b T) for x-independent kernels with
/// constant drift; passes iff every frequency is within 3 standard errors. d = 1.
CharacteristicCheck characteristic_function_check(const SampleSet& samples, const ModelSpec& spec,
                                                  std::vector<double> u = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});

}  // namespace stablekernel
