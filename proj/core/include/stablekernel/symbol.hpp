#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "stablekernel/model.hpp"
#include "stablekernel/report.hpp"

namespace stablekernel {

using cplx = std::complex<double>;

/// Tolerances of the symbol quadrature.
struct SymbolOptions {
    double rel_budget = 1e-8;     ///< absolute error budget is rel_budget * (1 + |u|^alpha)
    int angular_nodes = 24;       ///< d=2: Gauss nodes per angular piece
    bool throw_on_budget = true;  ///< raise QuadratureError when the estimate exceeds the budget
};

struct SymbolValue {
    cplx value;
    double error_estimate = 0.0;
};

/// psi^y(u) = -int (e^{iu.h} - 1 - chi_alpha(h) iu.h) n(y,h) |h|^{-d-alpha} dh.
cplx eval_symbol(const ModelSpec& spec, const Point& y, const Point& u, const SymbolOptions& opt = {});
SymbolValue eval_symbol_detailed(const ModelSpec& spec, const Point& y, const Point& u,
                                 const SymbolOptions& opt = {});

/// Symbol of a bare kernel (no drift); the kernel is frozen at y.
SymbolValue kernel_symbol(const JumpKernel& kernel, double alpha, int dim, const Point& y, const Point& u,
                          const SymbolOptions& opt = {});

/// Frequency lattice dual to x_j = -L/2 + j L/n per axis, in FFT order.
struct FrequencyLattice {
    int dim = 1;
    int n = 0;
    double extent = 0.0;

    std::size_t size() const { return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
    double axis(int k) const;  ///< 2 pi k' / L with k' the signed index of k
    Point at(std::size_t idx) const;
    bool nyquist(std::size_t idx) const;
};

/// psi^y tabulated on a frequency lattice. Nyquist entries hold Re psi so that inverse
/// transforms of real symmetric data stay real.
struct FrozenSymbol {
    Point base_point{0.0, 0.0};
    double alpha = 0.0;
    int dim = 1;
    FrequencyLattice lattice;
    std::vector<cplx> values;
    double max_error_estimate = 0.0;
};

FrozenSymbol tabulate_symbol(const ModelSpec& spec, const Point& y, const FrequencyLattice& lattice,
                             const SymbolOptions& opt = {});

/// Symbols of a separable kernel's profiles on a 1D lattice: row p holds psi of profile p, so
/// psi^z(u_k) = sum_p w_p(z) rows[p][k]. A kernel without terms yields a single row computed
/// at the given base point.
struct ProfileSymbols {
    std::vector<std::vector<cplx>> rows;
    std::vector<std::function<double(const Point&)>> weights;
    bool separable = false;
};
ProfileSymbols profile_symbols(const ModelSpec& spec, const FrequencyLattice& lattice, const SymbolOptions& opt = {});

/// max_u |psi(-u) - conj psi(u)| over the lattice.
double conjugate_symmetry_defect(const FrozenSymbol& sym);

/// inf over lattice u != 0 of Re psi(u) / |u|^alpha; passes iff above floor_factor * kappa0.
BoundReport check_coercivity(const FrozenSymbol& sym, const ModelSpec& spec, double floor_factor = 1e-6);

/// CSV with columns u, Re, Im (d=1) or u1, u2, Re, Im (d=2).
void write_symbol_csv(const FrozenSymbol& sym, const std::string& path);

}  // namespace stablekernel
