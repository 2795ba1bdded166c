#pragma once

#include <cstddef>
#include <vector>

#include "stablekernel/model.hpp"
#include "stablekernel/symbol.hpp"

namespace stablekernel {

/// Periodic lattice x_j = -L/2 + j L/n_x per axis, with a list of positive time nodes.
struct SpaceTimeGrid {
    int dim = 1;
    double extent = 0.0;
    int n_x = 0;
    std::vector<double> time_nodes;
    double grading = 1.0;

    double dx() const { return extent / n_x; }
    double coord(int j) const { return -0.5 * extent + j * dx(); }
    std::size_t points() const { return dim == 1 ? static_cast<std::size_t>(n_x) : static_cast<std::size_t>(n_x) * n_x; }
    Point point(std::size_t idx) const;
    double cell_volume() const { return dim == 1 ? dx() : dx() * dx(); }
    double t_min() const { return time_nodes.front(); }
    double horizon() const { return time_nodes.back(); }
    FrequencyLattice frequencies() const { return {dim, n_x, extent}; }
    /// Outside the boundary band of width L/8 on every axis.
    bool interior(std::size_t idx) const;
    /// Index of the time node equal to t (relative tolerance 1e-12); throws ConfigError if absent.
    std::size_t time_index(double t) const;
    /// Same times, n_x doubled.
    SpaceTimeGrid refined() const;
};

/// Validating constructor: n_x a power of two, extent > 0, nodes strictly increasing in (0, inf).
SpaceTimeGrid make_grid(int dim, double extent, int n_x, std::vector<double> time_nodes, double grading = 1.0);

/// Graded mesh t_j = T (j/n)^g for j = 0..n, merged with the extra nodes in (0, T).
std::vector<double> graded_mesh(double T, int n, double g, const std::vector<double>& extra = {});

/// Lattice index nearest to coordinate x along one axis, wrapped onto the torus.
int nearest_index(const SpaceTimeGrid& grid, double x);

/// Throws ConfigError unless dx <= t_min^{1/alpha}/8 and L >= 40 T^{1/alpha}.
void check_density_resolution(const SpaceTimeGrid& grid, double alpha);

}  // namespace stablekernel
