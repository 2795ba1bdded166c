#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "stablekernel/grid.hpp"
#include "stablekernel/model.hpp"
#include "stablekernel/report.hpp"
#include "stablekernel/symbol.hpp"

namespace stablekernel {

enum class FieldKind { frozen_density, q, F, Phi, p, l, gradient };
const char* to_string(FieldKind k);

/// Values on a SpaceTimeGrid: one matrix per time node, rows indexed by lattice point and
/// columns by slice. A frozen density has a single column; parametrix fields have one column
/// per base point of the y slice (`per_slice`).
struct DensityField {
    SpaceTimeGrid grid;
    FieldKind kind = FieldKind::frozen_density;
    std::vector<Point> base_points;
    bool per_slice = false;
    std::vector<Eigen::MatrixXd> values;
    std::vector<double> mass_deficit;  ///< 1 - lattice mass, per time node (worst slice)
    std::vector<double> alias_bound;   ///< wrap-around mass estimate, per time node
    double min_value = 0.0;
    int axis = -1;  ///< gradient component, -1 otherwise

    const Eigen::MatrixXd& at(std::size_t time_index) const { return values.at(time_index); }
    Eigen::VectorXd column(std::size_t time_index, std::size_t slice = 0) const { return values.at(time_index).col(slice); }
};

constexpr double ringing_tolerance = 1e-8;
constexpr double mass_tolerance = 1e-6;

/// f_t^y on the lattice by inverse FFT of exp(-t psi^y). Throws ConfigError if the grid does
/// not resolve both scales.
DensityField invert_density(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid,
                            const SymbolOptions& opt = {});
/// Same from a precomputed symbol table (must match the grid's frequency lattice).
DensityField invert_density(const FrozenSymbol& sym, const ModelSpec& spec, const SpaceTimeGrid& grid);

/// Spectral gradient, one field per axis.
std::vector<DensityField> density_gradient(const DensityField& field);

/// sup and inf over the interior of f_t(x) / [t (t^{1/alpha} + |x|)^{-d-alpha}].
BoundReport check_density_bounds(const DensityField& field, const ModelSpec& spec);
/// The same measured on grid and grid.refined(); passes iff finite, positive and stable.
BoundReport check_density_bounds_refined(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid,
                                         double threshold = 0.05);

/// sup |grad f_t| (t^{1/alpha} + |x|)^{d+alpha} / t^{1 - 1/alpha} over the interior.
BoundReport check_gradient_bound(const std::vector<DensityField>& gradient, const ModelSpec& spec);

/// sup |f_t^y - f_t^{y'}| / [(|y-y'|^theta ^ 1)(rho_alpha^0 + rho_{alpha-gamma}^gamma)(t,x)], measured
/// on grid and grid.refined(). gamma NaN selects theta_hat/2.
BoundReport check_holder_in_y(const ModelSpec& spec, const Point& y, const Point& y2, const SpaceTimeGrid& grid,
                              double gamma = std::numeric_limits<double>::quiet_NaN(), double threshold = 0.05);

/// sup over the interior of |f_s * f_t - f_{s+t}|; s, t and s+t must be time nodes.
double semigroup_residual(const DensityField& field, double s, double t);

/// sup over sampled interior x of |f_t(x) - t^{-d/alpha} f_1(t^{-1/alpha} x)|; t and 1 must be nodes (d=1).
double scaling_residual(const DensityField& field, double alpha, double t, std::size_t max_points = 400);

/// Empirical constant of |f_t(x) - f_t(x')| <= C ((t^{-1/alpha}|x-x'|) ^ 1)(rho_alpha^0(t,x) + rho_alpha^0(t,x')).
BoundReport continuity_constant(const DensityField& field, const ModelSpec& spec);

/// Export: CSV columns (t, x, value) for one slice in d=1, (t, x1, x2, value) in d=2, and
/// (t, x, y, value) for per-slice fields.
void write_field_csv(const DensityField& field, const std::string& path);
/// Binary: "STKD", u32 version, u32 dim, u32 n_x, f64 L, u32 n_t, then n_t rows of f64
/// [t, values...] with values ordered point-major, slice-minor.
void write_field_binary(const DensityField& field, const std::string& path);
/// Reads a binary field back; kind is reported as frozen_density unless it has several slices.
DensityField read_field_binary(const std::string& path);

}  // namespace stablekernel
