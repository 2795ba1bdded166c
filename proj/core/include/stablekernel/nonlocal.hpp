#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stablekernel/density.hpp"
#include "stablekernel/grid.hpp"
#include "stablekernel/model.hpp"
#include "stablekernel/report.hpp"

namespace stablekernel {

/// Discretisation of the singular integral defining the generator (d=1).
struct OperatorQuadrature {
    double inner_radius = 0.0;     ///< near-field radius delta; 0 selects 4 dx
    int near_order = 6;            ///< Taylor terms used inside delta
    int far_nodes = 8;             ///< Gauss nodes per lattice cell outside delta
    int interpolation_order = 8;   ///< local Lagrange order for off-lattice operand values
    bool reverse_offsets = false;  ///< integrate the far-field increments at -h instead of h
};

/// A kernel h -> k(h) with the far-field description used for the tail beyond L/2.
struct KernelSlice {
    std::function<double(double)> eval;
    std::vector<TailMode> tail_plus;   ///< modes of k(r), r > tail_radius
    std::vector<TailMode> tail_minus;  ///< modes of k(-r)
    double tail_radius = 0.0;
    std::vector<double> radial_breaks;
};

/// n(x, .) as a KernelSlice; throws ConfigError if the kernel has no tail model.
KernelSlice frozen_slice(const ModelSpec& spec, const Point& x);
/// n(x, .) - n(y, .), cancelling exactly when x == y.
KernelSlice difference_slice(const ModelSpec& spec, const Point& x, const Point& y);

/// Lattice function with the spectral data the stencil needs.
struct Operand {
    Eigen::VectorXd values;
    std::vector<Eigen::VectorXd> derivatives;  ///< orders 1..near_order
    Eigen::VectorXcd coefficients;
    double extent = 0.0;
};
Operand prepare_operand(const Eigen::VectorXd& values, double extent, int max_order = 6);

/// Linear functional f -> int [f(x+h) - f(x) - chi h f'(x)] k(h) |h|^{-1-alpha} dh on the lattice,
/// written as weights on lattice offsets, derivative coefficients and a Fourier multiplier for |h| > L/2.
class OperatorStencil {
public:
    OperatorStencil(const KernelSlice& k, double alpha, const SpaceTimeGrid& grid, const OperatorQuadrature& q = {});
    double apply(const Operand& f, int i) const;
    Eigen::VectorXd apply_all(const Operand& f) const;

    const std::vector<double>& offset_weights() const { return weights_; }
    double inner_radius() const { return delta_; }

private:
    Eigen::VectorXd tail_all(const Operand& f) const;

    int n_ = 0;
    double dx_ = 0.0, delta_ = 0.0;
    std::vector<double> weights_;  ///< indexed by lattice offset mod n
    std::vector<double> derivative_coef_;
    double value_coef_ = 0.0;
    std::vector<std::complex<double>> tail_multiplier_;
};

/// A^y f(x); x must be an interior lattice point.
double apply_frozen_operator(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& operand,
                             const SpaceTimeGrid& grid, const Point& x, const OperatorQuadrature& q = {});
/// A f(x) with the kernel at the live point x, plus b(x) f'(x) when alpha > 1.
double apply_full_generator(const ModelSpec& spec, const Eigen::VectorXd& operand, const SpaceTimeGrid& grid,
                            const Point& x, const OperatorQuadrature& q = {});
/// F(t,x,y) = (A - A^y) q(t,.,y)(x) in one pass with the kernel n(x,.) - n(y,.).
double compute_F(const ModelSpec& spec, const Eigen::VectorXd& q_slice, const SpaceTimeGrid& grid, const Point& x,
                 const Point& y, const OperatorQuadrature& q = {});

/// A^y f on every lattice point and the spectral reference -psi^y * f; returns the sup difference
/// over the interior.
double spectral_consistency(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& operand,
                            const SpaceTimeGrid& grid, const OperatorQuadrature& q = {});

/// int |f_t(x+h) - f_t(x) - chi h grad f_t(x)| n(y,h)|h|^{-1-alpha} dh at sampled interior x.
double increment_integral(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& f, const SpaceTimeGrid& grid,
                          int index, const OperatorQuadrature& q = {});

/// Ratio of the increment integral to rho_0^0(t,x) (alpha != 1) or (1 + ln 1/t) rho_0^0(t,x)
/// (alpha = 1), sup over sampled x per time node; measured on the grid and its refinement.
/// Per-time ratios are reported as constants "ratio@t=<t>". Times above 1 are rejected.
BoundReport check_increment_integral(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid,
                                     double threshold = 0.05, const OperatorQuadrature& q = {});
double increment_ratio(const BoundReport& report, double t);

}  // namespace stablekernel
