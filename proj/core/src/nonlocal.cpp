#include "stablekernel/nonlocal.hpp"

#include <algorithm>
#include <cmath>

#include "stablekernel/csv.hpp"
#include "stablekernel/errors.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/quadrature.hpp"
#include "stablekernel/rho.hpp"
#include "stablekernel/spectral.hpp"

namespace stablekernel {

namespace {

double factorial(int m) { return std::tgamma(m + 1.0); }

int wrap(long j, int n) {
    const long r = j % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

/// Lagrange weights on integer nodes first..first+p-1 at position u.
int lagrange(double u, int p, double* w) {
    const int first = static_cast<int>(std::floor(u)) - p / 2 + 1;
    for (int m = 0; m < p; ++m) {
        double v = 1.0;
        for (int k = 0; k < p; ++k) {
            if (k == m) continue;
            v *= (u - (first + k)) / static_cast<double>(m - k);
        }
        w[m] = v;
    }
    return first;
}

/// Breakpoints of [a, b] at lattice multiples of dx and at kernel breaks.
std::vector<double> cell_cuts(double a, double b, double dx, const std::vector<double>& breaks) {
    std::vector<double> cuts{a};
    for (long j = static_cast<long>(std::floor(a / dx)) + 1; j * dx < b; ++j)
        if (j * dx > a) cuts.push_back(j * dx);
    for (double r : breaks)
        if (r > a && r < b) cuts.push_back(r);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out;
    for (double c : cuts)
        if (out.empty() || c - out.back() > 1e-12 * dx) out.push_back(c);
    if (out.back() < b) out.back() = b;
    return out;
}

std::vector<double> breaks_in(const std::vector<double>& breaks, double a, double b) {
    std::vector<double> cuts{a};
    for (double r : breaks)
        if (r > a && r < b) cuts.push_back(r);
    cuts.push_back(b);
    return cuts;
}

/// int_R^inf e^{i kappa r} m(r) r^{-1-beta} dr for m a finite trigonometric sum.
cplx mode_tail(const std::vector<TailMode>& modes, double kappa, double beta, double R) {
    cplx s = 0.0;
    for (const auto& m : modes) {
        const cplx pp = quad::power_tail(kappa + m.omega, beta, R);
        const cplx pm = quad::power_tail(kappa - m.omega, beta, R);
        s += 0.5 * m.cos_coef * (pp + pm) + m.sin_coef / cplx(0.0, 2.0) * (pp - pm);
    }
    return s;
}

/// int_a^b k(side r) r^{p-1-alpha} dr, b may be infinite; the tail model is used past tail_radius.
double kernel_moment(const KernelSlice& k, double side, double a, double b, int p, double alpha) {
    const double beta = alpha - p;
    // beta <= 0 only arises for the alpha = 1 compensator on a bounded range.
    const double rt = beta <= 0.0 ? b : std::max(k.tail_radius, a);
    double s = 0.0;
    const double hi = std::min(b, rt);
    if (hi > a) {
        const auto& rule = quad::gauss_legendre(16);
        const auto cuts = breaks_in(k.radial_breaks, a, hi);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double lo = cuts[c];
            while (lo < cuts[c + 1]) {
                const double up = std::min(cuts[c + 1], lo + std::min(0.5 * lo, 0.25));
                s += quad::panel([&](double r) { return k.eval(side * r) * std::pow(r, -1.0 - beta); }, lo, up, rule);
                lo = up;
            }
        }
    }
    if (b > rt) {
        const auto& modes = side > 0 ? k.tail_plus : k.tail_minus;
        s += mode_tail(modes, 0.0, beta, rt).real();
        if (std::isfinite(b)) s -= mode_tail(modes, 0.0, beta, b).real();
    }
    return s;
}

void require_lattice_point(const SpaceTimeGrid& grid, const Point& x, int& index) {
    if (grid.dim != 1) throw ConfigError("operator quadrature is implemented for d = 1");
    index = nearest_index(grid, x[0]);
    if (std::abs(grid.coord(index) - x[0]) > 1e-9 * grid.dx())
        throw DomainError("operator evaluation point must be a lattice point");
    if (!grid.interior(static_cast<std::size_t>(index))) throw DomainError("x lies in the boundary band");
}

double resolve_delta(const SpaceTimeGrid& grid, const OperatorQuadrature& q) {
    const double delta = q.inner_radius > 0.0 ? q.inner_radius : 4.0 * grid.dx();
    if (delta < 2.0 * grid.dx() * (1.0 - 1e-12)) throw ConfigError("inner_radius must be at least 2 dx");
    if (delta >= 0.25 * grid.extent) throw ConfigError("inner_radius must be below L/4");
    if (q.near_order < 2 || q.far_nodes < 2 || q.interpolation_order < 2 || q.interpolation_order % 2)
        throw ConfigError("operator quadrature orders out of range");
    return delta;
}

}  // namespace

KernelSlice frozen_slice(const ModelSpec& spec, const Point& x) {
    if (!spec.kernel.has_tail_model()) throw ConfigError("operator quadrature needs a kernel tail model");
    KernelSlice k;
    const JumpKernel& kern = spec.kernel;
    k.eval = [kern, x](double h) { return kern.eval(x, {h, 0.0}); };
    k.tail_plus = kern.tail(x, {1.0, 0.0});
    k.tail_minus = kern.tail(x, {-1.0, 0.0});
    k.tail_radius = kern.tail_radius;
    k.radial_breaks = kern.radial_breaks;
    return k;
}

KernelSlice difference_slice(const ModelSpec& spec, const Point& x, const Point& y) {
    KernelSlice a = frozen_slice(spec, x);
    const KernelSlice b = frozen_slice(spec, y);
    const JumpKernel& kern = spec.kernel;
    a.eval = [kern, x, y](double h) { return kern.eval(x, {h, 0.0}) - kern.eval(y, {h, 0.0}); };
    for (TailMode m : b.tail_plus) {
        m.cos_coef = -m.cos_coef;
        m.sin_coef = -m.sin_coef;
        a.tail_plus.push_back(m);
    }
    for (TailMode m : b.tail_minus) {
        m.cos_coef = -m.cos_coef;
        m.sin_coef = -m.sin_coef;
        a.tail_minus.push_back(m);
    }
    return a;
}

Operand prepare_operand(const Eigen::VectorXd& values, double extent, int max_order) {
    Operand op;
    op.values = values;
    op.extent = extent;
    op.coefficients = spectral::coefficients({values.data(), static_cast<std::size_t>(values.size())});
    for (int m = 1; m <= max_order; ++m)
        op.derivatives.push_back(spectral::derivative({values.data(), static_cast<std::size_t>(values.size())}, extent, m));
    return op;
}

OperatorStencil::OperatorStencil(const KernelSlice& k, double alpha, const SpaceTimeGrid& grid,
                                 const OperatorQuadrature& q)
    : n_(grid.n_x), dx_(grid.dx()), delta_(resolve_delta(grid, q)) {
    if (grid.dim != 1) throw ConfigError("operator quadrature is implemented for d = 1");
    const double half = 0.5 * grid.extent;
    if (k.tail_radius > half) throw ConfigError("kernel tail radius exceeds L/2");
    auto chi = [alpha](double r) { return alpha > 1.0 || (alpha == 1.0 && r <= 1.0); };

    // Near field: Taylor coefficients of f^{(m)}(x).
    derivative_coef_.assign(static_cast<std::size_t>(q.near_order), 0.0);
    const auto near_cuts = breaks_in(k.radial_breaks, 0.0, delta_);
    for (int m = 1; m <= q.near_order; ++m) {
        double s = 0.0;
        for (std::size_t c = 0; c + 1 < near_cuts.size(); ++c) {
            s += quad::finite(
                [&](double r) {
                    if (r <= 0.0) return 0.0;
                    double kv = k.eval(r) + (m % 2 ? -1.0 : 1.0) * k.eval(-r);
                    if (m == 1 && chi(r)) return 0.0;
                    return kv * std::pow(r, m - 1.0 - alpha);
                },
                near_cuts[c], near_cuts[c + 1], 1e-14);
        }
        derivative_coef_[static_cast<std::size_t>(m - 1)] = s / factorial(m);
    }

    // -f(x) and -chi h f'(x) over |h| > delta, in closed form past the tail radius.
    value_coef_ = -(kernel_moment(k, 1.0, delta_, INFINITY, 0, alpha) + kernel_moment(k, -1.0, delta_, INFINITY, 0, alpha));
    double first = 0.0;
    if (alpha > 1.0) {
        first = kernel_moment(k, 1.0, delta_, INFINITY, 1, alpha) - kernel_moment(k, -1.0, delta_, INFINITY, 1, alpha);
    } else if (alpha == 1.0 && delta_ < 1.0) {
        first = kernel_moment(k, 1.0, delta_, 1.0, 1, alpha) - kernel_moment(k, -1.0, delta_, 1.0, 1, alpha);
    }
    derivative_coef_[0] += q.reverse_offsets ? first : -first;

    // Far field delta < |h| <= L/2: f(x+h) by local Lagrange interpolation on the lattice.
    weights_.assign(static_cast<std::size_t>(n_), 0.0);
    const auto& rule = quad::gauss_legendre(q.far_nodes);
    const int p = q.interpolation_order;
    std::vector<double> lw(static_cast<std::size_t>(p));
    const auto cuts = cell_cuts(delta_, half, dx_, k.radial_breaks);
    for (double side : {1.0, -1.0}) {
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c], b = cuts[c + 1];
            const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (std::size_t g = 0; g < rule.x.size(); ++g) {
                const double r = mid + hw * rule.x[g];
                const double kv = rule.w[g] * hw * k.eval(side * r) * std::pow(r, -1.0 - alpha);
                const double s = q.reverse_offsets ? -side * r : side * r;
                const int first_node = lagrange(s / dx_, p, lw.data());
                for (int m = 0; m < p; ++m) weights_[static_cast<std::size_t>(wrap(first_node + m, n_))] += kv * lw[static_cast<std::size_t>(m)];
            }
        }
    }

    // |h| > L/2 as a Fourier multiplier on the operand.
    tail_multiplier_.assign(static_cast<std::size_t>(n_), cplx(0.0));
    const FrequencyLattice fl{1, n_, grid.extent};
    for (int kk = 0; kk < n_; ++kk) {
        const double u = fl.axis(kk);
        auto t_of = [&](double uu) {
            const double sgn = q.reverse_offsets ? -1.0 : 1.0;
            return mode_tail(k.tail_plus, sgn * uu, alpha, half) + mode_tail(k.tail_minus, -sgn * uu, alpha, half);
        };
        tail_multiplier_[static_cast<std::size_t>(kk)] = kk == n_ / 2 ? 0.5 * (t_of(u) + t_of(-u)) : t_of(u);
    }
}

Eigen::VectorXd OperatorStencil::tail_all(const Operand& f) const {
    Eigen::VectorXcd c = f.coefficients;
    for (int k = 0; k < n_; ++k) c[k] *= tail_multiplier_[static_cast<std::size_t>(k)];
    return spectral::synthesize(c);
}

double OperatorStencil::apply(const Operand& f, int i) const {
    if (f.values.size() != n_) throw ConfigError("operand does not match the stencil lattice");
    double s = value_coef_ * f.values[i];
    for (int o = 0; o < n_; ++o) s += weights_[static_cast<std::size_t>(o)] * f.values[wrap(i + o, n_)];
    for (std::size_t m = 0; m < derivative_coef_.size(); ++m) s += derivative_coef_[m] * f.derivatives.at(m)[i];
    return s + tail_all(f)[i];
}

Eigen::VectorXd OperatorStencil::apply_all(const Operand& f) const {
    if (f.values.size() != n_) throw ConfigError("operand does not match the stencil lattice");
    // Circular correlation sum_o w_o f_{i+o} through the FFT.
    Eigen::MatrixXcd fw(n_, 2);
    for (int j = 0; j < n_; ++j) {
        fw(j, 0) = f.values[j];
        fw(j, 1) = weights_[static_cast<std::size_t>(j)];
    }
    Eigen::MatrixXcd ff = fw.col(0);
    Eigen::MatrixXcd ww = fw.col(1);
    spectral::fft_columns(ff, -1);
    spectral::fft_columns(ww, +1);
    Eigen::MatrixXcd prod = ff.cwiseProduct(ww);
    spectral::fft_columns(prod, +1);
    Eigen::VectorXd out = prod.col(0).real() / static_cast<double>(n_);
    out += value_coef_ * f.values;
    for (std::size_t m = 0; m < derivative_coef_.size(); ++m) out += derivative_coef_[m] * f.derivatives.at(m);
    return out + tail_all(f);
}

double apply_frozen_operator(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& operand,
                             const SpaceTimeGrid& grid, const Point& x, const OperatorQuadrature& q) {
    int i = 0;
    require_lattice_point(grid, x, i);
    const OperatorStencil st(frozen_slice(spec, y), spec.alpha, grid, q);
    return st.apply(prepare_operand(operand, grid.extent, q.near_order), i);
}

double apply_full_generator(const ModelSpec& spec, const Eigen::VectorXd& operand, const SpaceTimeGrid& grid,
                            const Point& x, const OperatorQuadrature& q) {
    int i = 0;
    require_lattice_point(grid, x, i);
    const OperatorStencil st(frozen_slice(spec, x), spec.alpha, grid, q);
    const Operand f = prepare_operand(operand, grid.extent, q.near_order);
    return st.apply(f, i) + spec.drift_at(x)[0] * f.derivatives[0][i];
}

double compute_F(const ModelSpec& spec, const Eigen::VectorXd& q_slice, const SpaceTimeGrid& grid, const Point& x,
                 const Point& y, const OperatorQuadrature& q) {
    int i = 0;
    require_lattice_point(grid, x, i);
    if (x[0] == y[0]) return 0.0;
    const OperatorStencil st(difference_slice(spec, x, y), spec.alpha, grid, q);
    return st.apply(prepare_operand(q_slice, grid.extent, q.near_order), i);
}

double spectral_consistency(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& operand,
                            const SpaceTimeGrid& grid, const OperatorQuadrature& q) {
    const OperatorStencil st(frozen_slice(spec, y), spec.alpha, grid, q);
    const Operand f = prepare_operand(operand, grid.extent, q.near_order);
    const Eigen::VectorXd a = st.apply_all(f);
    const FrozenSymbol sym = tabulate_symbol(spec, y, grid.frequencies());
    Eigen::VectorXcd c = f.coefficients;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= -sym.values[static_cast<std::size_t>(k)];
    const Eigen::VectorXd b = spectral::synthesize(c);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.points(); ++j)
        if (grid.interior(j)) {
            const double d = std::abs(a[static_cast<Eigen::Index>(j)] - b[static_cast<Eigen::Index>(j)]);
            if (!(d <= worst)) worst = d;
        }
    return worst;
}

namespace {

double increment_at(const ModelSpec& spec, const KernelSlice& k, const Operand& f, const SpaceTimeGrid& grid, int i,
                    double delta, const OperatorQuadrature& q) {
    const double alpha = spec.alpha;
    const double dx = grid.dx();
    const double half = 0.5 * grid.extent;
    const double f0 = f.values[i];
    const double d1 = f.derivatives[0][i];
    double total = 0.0;

    for (double side : {1.0, -1.0}) {
        // |h| <= delta: Taylor polynomial of the increment.
        for (const auto& [a, b] : [&] {
                 std::vector<std::pair<double, double>> seg;
                 const auto c = breaks_in(k.radial_breaks, 0.0, delta);
                 for (std::size_t j = 0; j + 1 < c.size(); ++j) seg.emplace_back(c[j], c[j + 1]);
                 return seg;
             }()) {
            total += quad::finite(
                [&](double r) {
                    if (r <= 0.0) return 0.0;
                    const double h = side * r;
                    const bool comp = spec.compensated(r);
                    const int m0 = comp ? 2 : 1;
                    double poly = 0.0, hm = 1.0;
                    for (int m = m0; m <= q.near_order; ++m) {
                        poly += f.derivatives[static_cast<std::size_t>(m - 1)][i] * hm / factorial(m);
                        hm *= h;
                    }
                    return std::abs(poly) * k.eval(h) * std::pow(r, m0 - 1.0 - alpha);
                },
                a, b, 1e-12);
        }

        // delta < |h| with x + h inside the box: lattice product rule.
        const double x = grid.coord(i);
        const double reach = side > 0 ? half - x : half + x;
        const auto& rule = quad::gauss_legendre(q.far_nodes);
        const int p = q.interpolation_order;
        std::vector<double> lw(static_cast<std::size_t>(p));
        const auto cuts = cell_cuts(delta, reach, dx, k.radial_breaks);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c], b = cuts[c + 1];
            const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (std::size_t g = 0; g < rule.x.size(); ++g) {
                const double r = mid + hw * rule.x[g];
                const double h = side * r;
                const int first = lagrange(h / dx, p, lw.data());
                double fv = 0.0;
                for (int m = 0; m < p; ++m) fv += lw[static_cast<std::size_t>(m)] * f.values[wrap(i + first + m, grid.n_x)];
                double inc = fv - f0;
                if (spec.compensated(r)) inc -= h * d1;
                total += rule.w[g] * hw * std::abs(inc) * k.eval(h) * std::pow(r, -1.0 - alpha);
            }
        }

        // Outside the box the density is taken as zero: |f(x) + chi h f'(x)|, piecewise of one sign.
        std::vector<double> cuts_out{reach};
        const bool linear = alpha > 1.0;
        if (linear && d1 != 0.0) {
            const double r0 = -f0 / (side * d1);
            if (r0 > reach) cuts_out.push_back(r0);
        }
        cuts_out.push_back(INFINITY);
        for (std::size_t c = 0; c + 1 < cuts_out.size(); ++c) {
            const double a = cuts_out[c], b = cuts_out[c + 1];
            double v = f0 * kernel_moment(k, side, a, b, 0, alpha);
            if (linear) v += side * d1 * kernel_moment(k, side, a, b, 1, alpha);
            else if (alpha == 1.0 && a < 1.0) v += side * d1 * kernel_moment(k, side, a, std::min(b, 1.0), 1, alpha);
            total += std::abs(v);
        }
    }
    return total;
}

std::string ratio_name(double t) { return "ratio@t=" + format_double(t); }

BoundReport increment_report(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid,
                             const OperatorQuadrature& q) {
    const DensityField field = invert_density(spec, y, grid);
    const KernelSlice k = frozen_slice(spec, y);
    const double delta = resolve_delta(grid, q);
    const double alpha = spec.alpha;
    BoundReport rep;
    rep.id = "increment-integral";
    double sup_all = 0.0;
    for (std::size_t ti = 0; ti < grid.time_nodes.size(); ++ti) {
        const double t = grid.time_nodes[ti];
        const Operand f = prepare_operand(field.column(ti), grid.extent, q.near_order);
        std::vector<int> idx{nearest_index(grid, 0.0)};
        const double s = std::pow(t, 1.0 / alpha);
        for (double r = 0.5 * s; r <= 0.375 * grid.extent; r *= 2.0) {
            idx.push_back(nearest_index(grid, r));
            idx.push_back(nearest_index(grid, -r));
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        std::vector<double> ratios(idx.size(), 0.0);
        parallel_for(idx.size(), [&](std::size_t m) {
            const int i = idx[m];
            if (!grid.interior(static_cast<std::size_t>(i))) return;
            const double I = increment_at(spec, k, f, grid, i, delta, q);
            double w = eval_rho({0.0, 0.0}, t, std::abs(grid.coord(i)), alpha, 1);
            if (alpha == 1.0) w *= 1.0 + std::log(1.0 / t);
            ratios[m] = I / w;
        });
        const double sup = *std::max_element(ratios.begin(), ratios.end());
        rep.constants.push_back({ratio_name(t), sup});
        sup_all = std::max(sup_all, sup);
    }
    rep.constants.insert(rep.constants.begin(), NamedValue{"sup_ratio", sup_all});
    return rep;
}

}  // namespace

double increment_integral(const ModelSpec& spec, const Point& y, const Eigen::VectorXd& f, const SpaceTimeGrid& grid,
                          int index, const OperatorQuadrature& q) {
    if (grid.dim != 1) throw ConfigError("operator quadrature is implemented for d = 1");
    const Operand op = prepare_operand(f, grid.extent, q.near_order);
    return increment_at(spec, frozen_slice(spec, y), op, grid, index, resolve_delta(grid, q), q);
}

BoundReport check_increment_integral(const ModelSpec& spec, const Point& y, const SpaceTimeGrid& grid, double threshold,
                                     const OperatorQuadrature& q) {
    if (grid.horizon() > 1.0) throw DomainError("increment integral estimate holds for t <= 1");
    const BoundReport coarse = increment_report(spec, y, grid, q);
    const BoundReport fine = increment_report(spec, y, grid.refined(), q);
    BoundReport rep = merge_refinement(coarse, fine, {"sup_ratio"}, threshold);
    rep.note = spec.alpha == 1.0 ? "normalised by (1 + ln 1/t) rho_0^0" : "normalised by rho_0^0";
    return rep;
}

double increment_ratio(const BoundReport& report, double t) { return report.constant(ratio_name(t)); }

}  // namespace stablekernel
