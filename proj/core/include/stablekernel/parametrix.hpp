#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "stablekernel/density.hpp"
#include "stablekernel/grid.hpp"
#include "stablekernel/model.hpp"
#include "stablekernel/report.hpp"

namespace stablekernel {

/// Values over the time mesh including t = 0; entry j is an N x (slice count) matrix.
using TimeSeries = std::vector<Eigen::MatrixXd>;

/// Discrete space-time kernel: for each mesh index j the N x N(j+1) matrix whose k-th block
/// maps phi(t_k, ., y) to its contribution at t_j, so that
/// (K (x) phi)(t_j) = dx * blocks[j] * [phi(t_0); ...; phi(t_j)].
struct MomentStack {
    std::vector<double> mesh;  ///< 0 = t_0 < ... < t_J
    int n = 0;
    double cell = 0.0;
    std::vector<Eigen::MatrixXd> blocks;

    TimeSeries apply(const TimeSeries& phi) const;
    std::size_t bytes() const;
};

/// Time mesh with t_0 = 0 for a grid whose nodes are the positive mesh points.
std::vector<double> mesh_with_origin(const SpaceTimeGrid& grid);

/// Weights of int_0^{t_j} a(t_j - s) b(s) ds for a, b piecewise linear on the mesh:
/// w[j][m][k] multiplies a(t_m) b(t_k). Exact (Simpson on merged breakpoints).
std::vector<std::vector<std::vector<double>>> product_weights(const std::vector<double>& mesh);

/// Kernel known only at the mesh nodes (piecewise linear in time), e.g. p or l.
MomentStack mesh_moments(const TimeSeries& kernel, const std::vector<double>& mesh, double cell);
/// Adds the mesh moments of `kernel` to an existing stack on the same mesh.
void accumulate_mesh_moments(MomentStack& stack, const TimeSeries& kernel);

/// phi1 (x) phi2 with phi1 given on the mesh. The error estimate is the sup change when phi2 is
/// sampled on every second mesh node and linearly interpolated back.
struct ConvolutionResult {
    TimeSeries values;
    double error_estimate = 0.0;
};
ConvolutionResult space_time_convolve(const TimeSeries& phi1, const TimeSeries& phi2, const std::vector<double>& mesh,
                                      double cell, bool estimate_error = false);

struct ConvergenceEntry {
    int n = 0;
    double sup_norm = 0.0;
    double ratio = 0.0;
    double tail_estimate = 0.0;
};

struct ParametrixOptions {
    int n_max = 8;
    double tail_tol = 1e-6;     ///< geometric tail bound relative to sup |F|
    bool keep_moments = false;  ///< retain the q and F moment stacks after use
};

struct ParametrixCache;

/// The Levi construction on the periodic lattice of `grid` (d = 1).
struct ParametrixRun {
    ModelSpec spec;
    SpaceTimeGrid grid;
    std::vector<Point> y_slice;
    std::vector<int> y_index;
    int n_max = 8;
    double tail_tol = 1e-6;

    DensityField q;
    DensityField F;
    std::vector<DensityField> terms;  ///< F^{(x)n}, n = 1..
    DensityField phi;
    DensityField q_phi;  ///< q (x) Phi; vanishes at t = 0, so use zero_origin_series
    DensityField p;
    std::vector<ConvergenceEntry> convergence_log;

    std::shared_ptr<ParametrixCache> cache;

    bool full_slice() const { return static_cast<int>(y_index.size()) == grid.n_x; }
    /// Time series of a field with its t = 0 value prepended.
    TimeSeries series(const DensityField& field) const;
    TimeSeries zero_origin_series(const DensityField& field) const;
    /// Minimal Re psi at the Nyquist frequency over the lattice base points.
    double nyquist_rate() const;
    /// Positive nodes with t * nyquist_rate >= 12.
    std::vector<double> resolved_times() const;
};

/// Set up a run; an empty y_slice selects every lattice point. Base points must be lattice
/// points. Symbols are tabulated once per lattice point (or per profile for separable kernels).
ParametrixRun make_parametrix_run(const ModelSpec& spec, const SpaceTimeGrid& grid, std::vector<Point> y_slice = {},
                                  const ParametrixOptions& opt = {});

/// q(t,x,y) = f_t^y(y - x) on the lattice for the run's y_slice.
DensityField build_q(ParametrixRun& run);
/// Same as a free function: one column per y in y_slice.
DensityField build_q(const ModelSpec& spec, const SpaceTimeGrid& grid, const std::vector<Point>& y_slice);
/// F(t,x,y) = (A - A^y) q(t,.,y)(x), spectrally.
DensityField build_F(ParametrixRun& run);
/// Phi = sum_n F^{(x)n}; throws ConvergenceError when the tail has not met tail_tol by n_max.
DensityField build_phi(ParametrixRun& run);
/// p = q + q (x) Phi, with the y-mass deficit per time node.
DensityField build_p(ParametrixRun& run);
/// All of the above.
ParametrixRun run_parametrix(const ModelSpec& spec, const SpaceTimeGrid& grid, const ParametrixOptions& opt = {});

/// Exact-in-time moments of q or F as a kernel in (t - s, x, z).
enum class SpectralKernel { q, F };
MomentStack spectral_moments(const ParametrixRun& run, SpectralKernel which);

/// sup over interior (x, y) of |dx sum_z p(s,x,z) p(t,z,y) - p(s+t,x,y)| (s+t)^{1/alpha}.
double chapman_kolmogorov_residual(const ParametrixRun& run, double s, double t);
double chapman_kolmogorov_residual(const DensityField& p, double alpha, double s, double t);

/// Ratios of p to (t/|x-y|^{1+alpha}) ^ t^{-1/alpha} over interior (x, y) at the given times
/// (constants sup_ratio, inf_ratio, near_diagonal_inf) and, for alpha > 1, of |grad_x p| to
/// t^{-1/alpha} rho_alpha^0 (grad_sup_ratio). |x - y| is the torus distance.
BoundReport check_heat_kernel_bounds(const DensityField& field, const ModelSpec& spec, const std::vector<double>& times,
                                     const std::string& id = "heat-kernel-two-sided");
/// The same on the run grid and its refinement at the coarse run's resolved times.
BoundReport check_heat_kernel_bounds_refined(const ModelSpec& spec, const SpaceTimeGrid& grid,
                                             const ParametrixOptions& opt = {}, double threshold = 0.05);

/// sup |Phi| / (rho_{theta}^0 + rho_0^{theta})(t, x - y), theta = theta_hat.
BoundReport check_phi_envelope(const ParametrixRun& run, const std::vector<double>& times = {});
/// sup |q (x) Phi| / (rho_{alpha+theta}^0 + rho_alpha^{theta})(t, x - y).
BoundReport check_q_phi_envelope(const ParametrixRun& run, const std::vector<double>& times = {});
/// Both envelopes on the grid and its refinement.
std::vector<BoundReport> check_envelopes_refined(const ModelSpec& spec, const SpaceTimeGrid& grid,
                                                 const ParametrixOptions& opt = {}, double threshold = 0.05);

/// Lattice generator (A f)(x_j) = (1/N) sum_k -psi^{x_j}(u_k) e^{i u_k x_j} c_k[f] as a matrix.
Eigen::MatrixXd lattice_generator(const ModelSpec& spec, const SpaceTimeGrid& grid);

/// convergence_log as a JSON array of {n, sup_norm, ratio, tail_estimate}.
std::string convergence_log_json(const std::vector<ConvergenceEntry>& log);

/// Default grid of the parametrix pipeline: L = 14 pi, N = 256, T = 1, graded mesh with
/// g = max(2, alpha/theta_hat) over n_t steps merged with {T/4, T/2, 3T/4}.
SpaceTimeGrid default_parametrix_grid(const ModelSpec& spec, int n_x = 256, int n_t = 40, double horizon = 1.0);

}  // namespace stablekernel
