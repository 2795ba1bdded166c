#include "stablekernel/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablekernel/errors.hpp"

namespace stablekernel {

Point SpaceTimeGrid::point(std::size_t idx) const {
    if (dim == 1) return {coord(static_cast<int>(idx)), 0.0};
    return {coord(static_cast<int>(idx / n_x)), coord(static_cast<int>(idx % n_x))};
}

bool SpaceTimeGrid::interior(std::size_t idx) const {
    const double lim = 0.5 * extent - extent / 8.0 + 1e-12 * extent;
    const Point p = point(idx);
    return std::abs(p[0]) <= lim && (dim == 1 || std::abs(p[1]) <= lim);
}

std::size_t SpaceTimeGrid::time_index(double t) const {
    for (std::size_t i = 0; i < time_nodes.size(); ++i)
        if (std::abs(time_nodes[i] - t) <= 1e-12 * std::max(1.0, t)) return i;
    std::ostringstream os;
    os << "time " << t << " is not a node of the grid";
    throw ConfigError(os.str());
}

SpaceTimeGrid SpaceTimeGrid::refined() const {
    SpaceTimeGrid g = *this;
    g.n_x *= 2;
    return g;
}

SpaceTimeGrid make_grid(int dim, double extent, int n_x, std::vector<double> time_nodes, double grading) {
    if (dim != 1 && dim != 2) throw ConfigError("grid dim must be 1 or 2");
    if (!(extent > 0.0) || !std::isfinite(extent)) throw ConfigError("grid extent must be positive");
    if (n_x < 4 || (n_x & (n_x - 1)) != 0) throw ConfigError("grid n_x must be a power of two >= 4");
    if (time_nodes.empty()) throw ConfigError("grid needs at least one time node");
    for (std::size_t i = 0; i < time_nodes.size(); ++i) {
        if (!(time_nodes[i] > 0.0)) throw ConfigError("time nodes must be positive");
        if (i && !(time_nodes[i] > time_nodes[i - 1])) throw ConfigError("time nodes must be strictly increasing");
    }
    return SpaceTimeGrid{dim, extent, n_x, std::move(time_nodes), grading};
}

std::vector<double> graded_mesh(double T, int n, double g, const std::vector<double>& extra) {
    if (n < 1 || !(T > 0.0) || !(g >= 1.0)) throw ConfigError("graded mesh needs n >= 1, T > 0, g >= 1");
    std::vector<double> t;
    for (int j = 0; j <= n; ++j) t.push_back(j == n ? T : T * std::pow(static_cast<double>(j) / n, g));
    for (double e : extra) {
        if (!(e > 0.0 && e < T)) throw ConfigError("extra mesh nodes must lie in (0, T)");
        t.push_back(e);
    }
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double v : t)
        if (out.empty() || v - out.back() > 1e-12 * T) out.push_back(v);
        else if (std::find(extra.begin(), extra.end(), v) != extra.end()) out.back() = v;
    return out;
}

int nearest_index(const SpaceTimeGrid& grid, double x) {
    const long j = std::lround((x + 0.5 * grid.extent) / grid.dx());
    const long n = grid.n_x;
    return static_cast<int>(((j % n) + n) % n);
}

void check_density_resolution(const SpaceTimeGrid& grid, double alpha) {
    const double inner = std::pow(grid.t_min(), 1.0 / alpha) / 8.0;
    const double outer = 40.0 * std::pow(grid.horizon(), 1.0 / alpha);
    std::ostringstream os;
    if (grid.dx() > inner * (1.0 + 1e-12)) {
        os << "grid spacing " << grid.dx() << " exceeds t_min^{1/alpha}/8 = " << inner;
        throw ConfigError(os.str());
    }
    if (grid.extent < outer * (1.0 - 1e-12)) {
        os << "grid extent " << grid.extent << " is below 40 T^{1/alpha} = " << outer;
        throw ConfigError(os.str());
    }
}

}  // namespace stablekernel
