#include "stablekernel/density.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stablekernel/errors.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/rho.hpp"
#include "stablekernel/spectral.hpp"

namespace stablekernel {

const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::frozen_density: return "frozen_density";
        case FieldKind::q: return "q";
        case FieldKind::F: return "F";
        case FieldKind::Phi: return "Phi";
        case FieldKind::p: return "p";
        case FieldKind::l: return "l";
        case FieldKind::gradient: return "gradient";
    }
    return "frozen_density";
}

namespace {

using cplx = std::complex<double>;

double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// f(x_j) = L^{-d} sum_k e^{-i u_k x_j} e^{-t psi(u_k)}
Eigen::VectorXd lattice_density(const FrozenSymbol& sym, const SpaceTimeGrid& grid, double t) {
    const int n = grid.n_x;
    const double vol = grid.dim == 1 ? grid.extent : grid.extent * grid.extent;
    if (grid.dim == 1) {
        Eigen::MatrixXcd c(n, 1);
        for (int k = 0; k < n; ++k) c(k, 0) = std::exp(-t * sym.values[k]) * (k % 2 ? -1.0 : 1.0);
        spectral::fft_columns(c, -1);
        return c.col(0).real() / vol;
    }
    std::vector<cplx> a(static_cast<std::size_t>(n) * n);
    for (int k1 = 0; k1 < n; ++k1)
        for (int k2 = 0; k2 < n; ++k2) {
            const std::size_t i = static_cast<std::size_t>(k1) * n + k2;
            a[i] = std::exp(-t * sym.values[i]) * ((k1 + k2) % 2 ? -1.0 : 1.0);
        }
    spectral::fft2d(a, n, -1);
    Eigen::VectorXd f(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) f(i) = a[i].real() / vol;
    return f;
}

double envelope_abs(const Point& x, int dim) { return norm(x, dim); }

}  // namespace

DensityField invert_density(const FrozenSymbol& sym, const ModelSpec& spec, const SpaceTimeGrid& grid) {
    if (sym.lattice.n != grid.n_x || sym.lattice.dim != grid.dim || sym.lattice.extent != grid.extent)
        throw ConfigError("symbol table does not match the grid");
    DensityField f;
    f.grid = grid;
    f.kind = FieldKind::frozen_density;
    f.base_points = {sym.base_point};
    f.values.resize(grid.time_nodes.size());
    f.mass_deficit.resize(grid.time_nodes.size());
    f.alias_bound.resize(grid.time_nodes.size());
    parallel_for(grid.time_nodes.size(), [&](std::size_t i) {
        const double t = grid.time_nodes[i];
        Eigen::VectorXd v = lattice_density(sym, grid, t);
        f.mass_deficit[i] = 1.0 - v.sum() * grid.cell_volume();
        f.alias_bound[i] = t * spec.kappa1 * sphere_area(grid.dim) * std::pow(0.5 * grid.extent, -spec.alpha) / spec.alpha;
        f.values[i] = v;
    });
    f.min_value = std::numeric_limits<double>::infinity();
    for (const auto& v : f.values) f.min_value = std::min(f.min_value, v.minCoeff());
    return f;
}

DensityField invert_density(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid, const SymbolOptions& opt) {
    check_spec_fields(spec);
    if (grid.dim != spec.dim) throw ConfigError("grid dimension differs from the model's");
    check_density_resolution(grid, spec.alpha);
    const FrozenSymbol sym = tabulate_symbol(spec, y, grid.frequencies(), opt);
    for (std::size_t i = 0; i < sym.values.size(); ++i) {
        const double slack = opt.rel_budget * (1.0 + std::pow(norm(sym.lattice.at(i), grid.dim), spec.alpha));
        if (sym.values[i].real() < -slack) throw ModelViolation("frozen symbol has negative real part");
    }
    return invert_density(sym, spec, grid);
}

std::vector<DensityField> density_gradient(const DensityField& field) {
    if (field.kind != FieldKind::frozen_density && field.kind != FieldKind::q && field.kind != FieldKind::p &&
        field.kind != FieldKind::l)
        throw ConfigError("gradient needs a density-valued field");
    const auto& g = field.grid;
    const int n = g.n_x;
    std::vector<DensityField> out;
    for (int axis = 0; axis < g.dim; ++axis) {
        DensityField d = field;
        d.kind = FieldKind::gradient;
        d.axis = axis;
        d.mass_deficit.clear();
        d.alias_bound.clear();
        for (std::size_t ti = 0; ti < field.values.size(); ++ti) {
            const Eigen::MatrixXd& v = field.values[ti];
            if (g.dim == 1) {
                d.values[ti] = spectral::derivative_columns(v, g.extent, 1);
                continue;
            }
            Eigen::MatrixXd r(v.rows(), v.cols());
            for (Eigen::Index s = 0; s < v.cols(); ++s) {
                std::vector<cplx> a(v.rows());
                for (Eigen::Index i = 0; i < v.rows(); ++i) a[i] = v(i, s);
                spectral::fft2d(a, n, -1);
                for (int k1 = 0; k1 < n; ++k1)
                    for (int k2 = 0; k2 < n; ++k2) {
                        const int k = axis == 0 ? k1 : k2;
                        const int kk = k < n / 2 ? k : k - n;
                        const double u = 2.0 * std::numbers::pi * kk / g.extent;
                        a[static_cast<std::size_t>(k1) * n + k2] *= k == n / 2 ? cplx(0.0) : cplx(0.0, u);
                    }
                spectral::fft2d(a, n, +1);
                for (Eigen::Index i = 0; i < v.rows(); ++i) r(i, s) = a[i].real() / (static_cast<double>(n) * n);
            }
            d.values[ti] = r;
        }
        d.min_value = 0.0;
        out.push_back(std::move(d));
    }
    return out;
}

BoundReport check_density_bounds(const DensityField& field, const ModelSpec& spec) {
    if (field.kind != FieldKind::frozen_density) throw ConfigError("density bounds need a frozen density");
    const auto& g = field.grid;
    const double a = spec.alpha;
    double sup = 0.0, inf = std::numeric_limits<double>::infinity(), min_interior = 0.0;
    double t_sup = 0.0, x_sup = 0.0, t_inf = 0.0, x_inf = 0.0;
    for (std::size_t ti = 0; ti < g.time_nodes.size(); ++ti) {
        const double t = g.time_nodes[ti];
        const double tau = std::pow(t, 1.0 / a);
        for (std::size_t i = 0; i < g.points(); ++i) {
            if (!g.interior(i)) continue;
            const double v = field.values[ti](i, 0);
            min_interior = std::min(min_interior, v);
            const double r = envelope_abs(g.point(i), g.dim);
            const double ratio = v / (t * std::pow(tau + r, -g.dim - a));
            if (ratio > sup) sup = ratio, t_sup = t, x_sup = r;
            if (ratio < inf) inf = ratio, t_inf = t, x_inf = r;
        }
    }
    if (min_interior < -ringing_tolerance) {
        std::ostringstream os;
        os << "frozen density negative beyond ringing tolerance: " << min_interior;
        throw ModelViolation(os.str());
    }
    BoundReport r;
    r.id = "frozen-density-two-sided";
    r.constants = {{"sup_ratio", sup}, {"inf_ratio", inf}};
    r.witness = {{"t_sup", t_sup}, {"abs_x_sup", x_sup}, {"t_inf", t_inf}, {"abs_x_inf", x_inf}, {"min_value", field.min_value}};
    finalize(r, {"sup_ratio", "inf_ratio"});
    return r;
}

BoundReport check_density_bounds_refined(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid, double threshold) {
    const BoundReport a = check_density_bounds(invert_density(spec, y, grid), spec);
    const BoundReport b = check_density_bounds(invert_density(spec, y, grid.refined()), spec);
    return merge_refinement(a, b, {"sup_ratio", "inf_ratio"}, threshold);
}

BoundReport check_gradient_bound(const std::vector<DensityField>& gradient, const ModelSpec& spec) {
    if (gradient.empty()) throw ConfigError("gradient bound needs gradient fields");
    const auto& g = gradient.front().grid;
    const double a = spec.alpha;
    double sup = 0.0, t_sup = 0.0;
    for (std::size_t ti = 0; ti < g.time_nodes.size(); ++ti) {
        const double t = g.time_nodes[ti];
        const double tau = std::pow(t, 1.0 / a);
        for (std::size_t i = 0; i < g.points(); ++i) {
            if (!g.interior(i)) continue;
            double m2 = 0.0;
            for (const auto& d : gradient) m2 += d.values[ti](i, 0) * d.values[ti](i, 0);
            const double r = envelope_abs(g.point(i), g.dim);
            const double ratio = std::sqrt(m2) * std::pow(tau + r, g.dim + a) / std::pow(t, 1.0 - 1.0 / a);
            if (ratio > sup) sup = ratio, t_sup = t;
        }
    }
    BoundReport r;
    r.id = "frozen-density-gradient";
    r.constants = {{"sup_ratio", sup}};
    r.witness = {{"t_sup", t_sup}};
    finalize(r);
    return r;
}

namespace {

double holder_ratio(const ModelSpec& spec, const Point& y, const Point& y2, const SpaceTimeGrid& grid, double gamma,
                    double& t_at) {
    const DensityField f1 = invert_density(spec, y, grid);
    const DensityField f2 = invert_density(spec, y2, grid);
    Point d{y[0] - y2[0], y[1] - y2[1]};
    const double factor = std::min(std::pow(norm(d, spec.dim), spec.theta), 1.0);
    double sup = 0.0;
    for (std::size_t ti = 0; ti < grid.time_nodes.size(); ++ti) {
        const double t = grid.time_nodes[ti];
        for (std::size_t i = 0; i < grid.points(); ++i) {
            if (!grid.interior(i)) continue;
            const double r = norm(grid.point(i), grid.dim);
            const double env = eval_rho({spec.alpha, 0.0}, t, r, spec.alpha, spec.dim) +
                               eval_rho({spec.alpha - gamma, gamma}, t, r, spec.alpha, spec.dim);
            const double ratio = std::abs(f1.values[ti](i, 0) - f2.values[ti](i, 0)) / (factor * env);
            if (ratio > sup) sup = ratio, t_at = t;
        }
    }
    return sup;
}

}  // namespace

BoundReport check_holder_in_y(const ModelSpec& spec, const Point& y, const Point& y2, const SpaceTimeGrid& grid,
                              double gamma, double threshold) {
    if (y == y2) throw DomainError("Hoelder-in-y check needs two distinct base points");
    if (std::isnan(gamma)) gamma = 0.5 * spec.theta_hat();
    if (!(gamma > 0.0 && gamma < spec.alpha / 4.0)) throw DomainError("gamma must lie in (0, alpha/4)");
    double t0 = 0.0, t1 = 0.0;
    const double c0 = holder_ratio(spec, y, y2, grid, gamma, t0);
    const double c1 = holder_ratio(spec, y, y2, grid.refined(), gamma, t1);
    BoundReport r;
    r.id = "frozen-density-holder-in-base-point";
    r.constants = {{"sup_ratio", c1}, {"sup_ratio_coarse", c0}};
    r.witness = {{"gamma", gamma}, {"t_sup", t1}};
    r.stability_threshold = threshold;
    // a difference that vanishes identically is stable by definition
    r.stability_delta = (c0 == 0.0 && c1 == 0.0) ? 0.0 : relative_change(c0, c1);
    finalize(r);
    return r;
}

double semigroup_residual(const DensityField& field, double s, double t) {
    const auto& g = field.grid;
    if (g.dim != 1) throw DomainError("semigroup residual is implemented for d=1");
    const auto is = g.time_index(s), it = g.time_index(t), ist = g.time_index(s + t);
    const int n = g.n_x;
    // periodic convolution h(x_j) = dx sum_m f_s(x_j - x_m) f_t(x_m); x_j - x_m is again a lattice point
    const Eigen::VectorXd fs = field.values[is].col(0), ft = field.values[it].col(0);
    const Eigen::VectorXcd cs = spectral::coefficients(std::span<const double>(fs.data(), n));
    const Eigen::VectorXcd ct = spectral::coefficients(std::span<const double>(ft.data(), n));
    const Eigen::VectorXcd c = cs.cwiseProduct(ct) * g.dx();
    const Eigen::VectorXd h = spectral::synthesize(c);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        if (g.interior(i)) worst = std::max(worst, std::abs(h(i) - field.values[ist](i, 0)));
    return worst;
}

double scaling_residual(const DensityField& field, double alpha, double t, std::size_t max_points) {
    const auto& g = field.grid;
    if (g.dim != 1) throw DomainError("scaling residual is implemented for d=1");
    const auto it = g.time_index(t), i1 = g.time_index(1.0);
    const double s = std::pow(t, -1.0 / alpha);
    const double lim = 0.375 * g.extent;
    std::vector<int> idx;
    for (int i = 0; i < g.n_x; ++i) {
        const double x = g.coord(i);
        if (std::abs(x) <= lim && std::abs(s * x) <= lim) idx.push_back(i);
    }
    const std::size_t stride = std::max<std::size_t>(1, idx.size() / std::max<std::size_t>(1, max_points));
    std::vector<double> xs;
    std::vector<int> keep;
    for (std::size_t k = 0; k < idx.size(); k += stride) {
        keep.push_back(idx[k]);
        xs.push_back(s * g.coord(idx[k]));
    }
    const Eigen::VectorXd f1 = field.values[i1].col(0);
    const auto vals = spectral::interpolate(std::span<const double>(f1.data(), g.n_x), g.extent, xs);
    double worst = 0.0;
    for (std::size_t k = 0; k < keep.size(); ++k)
        worst = std::max(worst, std::abs(field.values[it](keep[k], 0) - s * vals[k]));
    return worst;
}

BoundReport continuity_constant(const DensityField& field, const ModelSpec& spec) {
    const auto& g = field.grid;
    if (g.dim != 1) throw DomainError("continuity constant is implemented for d=1");
    const double a = spec.alpha;
    double sup = 0.0;
    for (std::size_t ti = 0; ti < g.time_nodes.size(); ++ti) {
        const double t = g.time_nodes[ti];
        const double tau = std::pow(t, 1.0 / a);
        for (int i = 0; i < g.n_x; ++i) {
            if (!g.interior(i)) continue;
            for (int m = 1; m < g.n_x / 4; m *= 2) {
                const int j = i + m;
                if (j >= g.n_x || !g.interior(j)) break;
                const double dxp = std::abs(g.coord(j) - g.coord(i));
                const double env = std::min(dxp / tau, 1.0) *
                                   (eval_rho({a, 0.0}, t, std::abs(g.coord(i)), a, 1) +
                                    eval_rho({a, 0.0}, t, std::abs(g.coord(j)), a, 1));
                sup = std::max(sup, std::abs(field.values[ti](i, 0) - field.values[ti](j, 0)) / env);
            }
        }
    }
    BoundReport r;
    r.id = "frozen-density-continuity";
    r.constants = {{"constant", sup}};
    finalize(r);
    return r;
}

}  // namespace stablekernel
