#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stablekernel/density.hpp"
#include "stablekernel/parametrix.hpp"
#include "stablekernel/report.hpp"

namespace stablekernel {

struct GammaLogEntry {
    int n = 0;
    double sup_norm = 0.0;       ///< sup over positive times of |l_n|
    double gradient_norm = 0.0;  ///< sup over positive times of |d_z l_n|
    double predicted = 0.0;      ///< C c'^n / Gamma(1 + n (1 - 1/alpha)) with the fitted C, c'
    double log_residual = 0.0;
};

/// Drift-corrected kernel l = sum_n l_n on top of a full-slice parametrix run (alpha > 1).
struct DriftSeriesState {
    std::shared_ptr<const ParametrixRun> run;
    DensityField gradient;  ///< d_z p(s, z, y), differentiated along rows
    std::vector<DensityField> terms;  ///< l_0 = p, l_1, ...
    DensityField l;
    std::vector<GammaLogEntry> gamma_log;
    double fit_log_c = 0.0;
    double fit_log_ratio = 0.0;
    double gamma_fit_residual = 0.0;  ///< max |log residual| over n >= 1
    int n_max = 12;
    double tail_tol = 1e-6;  ///< relative to sup |p|

    const DensityField& p() const { return run->p; }
};

/// Throws ConfigError unless alpha > 1, p has been built and the slice covers every lattice point.
DriftSeriesState make_drift_state(std::shared_ptr<const ParametrixRun> run);

/// l_n = p (x) (b d_z l_{n-1}), summed until sup |l_n| <= tail_tol sup |p|. Throws ConvergenceError
/// (with the gamma log) when n_max terms do not get there. Also fills l's y-mass deficit.
DensityField build_drift_series(DriftSeriesState& state, int n_max = 12, double tail_tol = 1e-6);

/// sup over interior (x, y) and positive times of |l - p - l (x) (b d_z p)| t^{1/alpha}, with l
/// used as a mesh-sampled kernel.
double duhamel_residual(const DriftSeriesState& state);

/// check_heat_kernel_bounds applied to l at the run's resolved times; adds the constant
/// "mass_deficit" (worst over positive times).
BoundReport check_l_bounds(const DriftSeriesState& state);

/// gamma_log as a JSON array of {n, sup_norm, gradient_norm, predicted, log_residual}.
std::string gamma_log_json(const std::vector<GammaLogEntry>& log);

}  // namespace stablekernel
