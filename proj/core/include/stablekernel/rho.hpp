#pragma once

#include <vector>

#include "stablekernel/model.hpp"
#include "stablekernel/report.hpp"

namespace stablekernel {

/// The weight rho_gamma^beta(t,x) = t^{gamma/alpha} (|x|^beta ^ 1) (t^{1/alpha} + |x|)^{-d-alpha}.
struct RhoWeight {
    double gamma = 0.0;
    double beta = 0.0;
};

/// Closed-form evaluation; throws DomainError for t <= 0.
double eval_rho(const RhoWeight& w, double t, const Point& x, const ModelSpec& spec);
double eval_rho(const RhoWeight& w, double t, double abs_x, double alpha, int dim);

/// Which convolution inequality an exponent tuple exercises.
enum class RhoInequality { space_integral, space_convolution, space_time_convolution };

struct RhoTuple {
    RhoInequality kind = RhoInequality::space_integral;
    RhoWeight w1;
    RhoWeight w2;  ///< unused for space_integral
};

/// Sample grid for the empirical constants; `refine` doubles the density of every axis.
struct RhoGrid {
    int n_t = 6;
    double t_min = 1e-3;
    int n_x = 8;
    double x_min = 1e-3;
    double x_max = 10.0;
    int n_s = 6;
    RhoGrid refined() const;
};

/// Empirical constant of one tuple on one grid: max over the grid of LHS / RHS-without-constant.
double rho_constant(const ModelSpec& spec, const RhoTuple& tuple, const RhoGrid& grid);

/// Default tuples covering each inequality within its exponent ranges.
std::vector<RhoTuple> default_rho_tuples(const ModelSpec& spec);

/// One report per tuple: constant on the grid and its relative change on the refined grid.
std::vector<BoundReport> verify_rho_inequalities(const ModelSpec& spec,
                                                 const std::vector<RhoTuple>& tuples,
                                                 const RhoGrid& grid = {},
                                                 double stability_tol = 0.05);

/// Beta function B(a, b).
double beta_function(double a, double b);

}  // namespace stablekernel
