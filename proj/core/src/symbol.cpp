#include "stablekernel/symbol.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stablekernel/csv.hpp"
#include "stablekernel/errors.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/quadrature.hpp"

namespace stablekernel {

namespace {

constexpr double pi = std::numbers::pi;

struct RayIntegrand {
    const JumpKernel& kernel;
    double alpha;
    Point y;
    Point e;
    double w;

    double m(double r, double sign) const { return kernel(y, Point{sign * r * e[0], sign * r * e[1]}); }
    bool chi(double r) const { return alpha > 1.0 || (alpha == 1.0 && r <= 1.0); }

    // (1 - cos wr) r^{-1-alpha} written as 2 (sin(wr/2)/r)^2 r^{1-alpha}, finite as r -> 0
    double even(double r) const {
        if (r <= 0.0) return 0.0;
        const double s = std::sin(0.5 * w * r) / r;
        return 2.0 * s * s * std::pow(r, 1.0 - alpha) * (m(r, 1.0) + m(r, -1.0));
    }
    // imaginary part enters with a minus sign
    double odd(double r) const {
        if (r <= 0.0) return 0.0;
        const double d = m(r, 1.0) - m(r, -1.0);
        if (d == 0.0) return 0.0;
        const double x = w * r;
        if (!chi(r)) return std::sin(x) / r * std::pow(r, -alpha) * d;
        if (std::abs(x) < 0.1) {
            const double x2 = x * x;
            const double series = -(1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0))) / 6.0;
            return series * w * w * w * std::pow(r, 2.0 - alpha) * d;
        }
        return (std::sin(x) - x) * std::pow(r, -1.0 - alpha) * d;
    }
};

struct TailSums {
    double i0 = 0.0, ic = 0.0, is = 0.0, i1 = 0.0;
};

// Closed-form integrals over [R, inf) of the tail modes against r^{-1-alpha}.
TailSums tail_sums(const std::vector<TailMode>& modes, double w, double alpha, double R, bool need_first_moment) {
    TailSums s;
    for (const auto& md : modes) {
        const double A = md.cos_coef, B = md.sin_coef, om = md.omega;
        if (A == 0.0 && B == 0.0) continue;
        const cplx t0 = quad::power_tail(om, alpha, R);
        const cplx tp = quad::power_tail(om + w, alpha, R);
        const cplx tm = quad::power_tail(om - w, alpha, R);
        s.i0 += A * t0.real() + B * t0.imag();
        s.ic += 0.5 * A * (tp.real() + tm.real()) + 0.5 * B * (tp.imag() + tm.imag());
        // sin(wr) cos(om r) and sin(wr) sin(om r) in terms of om +- w
        s.is += 0.5 * A * (tp.imag() - tm.imag()) + 0.5 * B * (tm.real() - tp.real());
        if (need_first_moment) {
            const cplx t1 = quad::power_tail(om, alpha - 1.0, R);
            s.i1 += A * t1.real() + B * t1.imag();
        }
    }
    return s;
}

std::vector<TailMode> negate(std::vector<TailMode> modes) {
    for (auto& m : modes) {
        m.cos_coef = -m.cos_coef;
        m.sin_coef = -m.sin_coef;
    }
    return modes;
}

// J(w) = int_0^inf [(1 - cos wr)(m+ + m-) - i (sin wr - chi w r)(m+ - m-)] r^{-1-alpha} dr
SymbolValue ray_integral(const JumpKernel& kernel, double alpha, const Point& y, const Point& e, double w,
                         double budget) {
    if (w == 0.0) return {cplx(0.0, 0.0), 0.0};
    const RayIntegrand f{kernel, alpha, y, e, w};
    const double aw = std::abs(w);
    const double rho = std::min(1.0, 1.0 / std::max(1.0, aw));

    const bool modelled = kernel.has_tail_model();
    double R = modelled ? std::max(rho, kernel.tail_radius) : std::max(rho, alpha == 1.0 ? 1.0 : 0.0);
    double truncation_bound = 0.0;
    if (!modelled) {
        // |int_R^inf| <= 2 kappa-sup R^{-alpha}/alpha per part; pick R to spend half the budget
        double sup = 0.0;
        for (double r : {1.0, 10.0, 100.0}) sup = std::max({sup, std::abs(f.m(r, 1.0)), std::abs(f.m(r, -1.0))});
        sup = std::max(sup, 1.0);
        R = std::max({R, 50.0, std::pow(16.0 * sup / (alpha * budget), 1.0 / alpha)});
        truncation_bound = 8.0 * sup * std::pow(R, -alpha) / alpha;
    }

    std::vector<double> cuts{0.0, rho};
    for (double b : kernel.radial_breaks)
        if (b > 0.0 && b < R) cuts.push_back(b);
    if (alpha == 1.0 && R >= 1.0) cuts.push_back(1.0);
    cuts.push_back(R);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double re = 0.0, im = 0.0, err = truncation_bound;
    const auto& g12 = quad::gauss_legendre(12);
    const auto& g8 = quad::gauss_legendre(8);
    constexpr std::size_t max_panels = 400000;
    std::size_t panels = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= rho) {
            double e1 = 0.0, e2 = 0.0;
            re += quad::finite([&](double r) { return f.even(r); }, a, b, 1e-13, &e1);
            im -= quad::finite([&](double r) { return f.odd(r); }, a, b, 1e-13, &e2);
            err += e1 + e2;
            continue;
        }
        double lo = a;
        while (lo < b) {
            double len = std::min({0.5 * lo, kernel.resolution, pi / aw});
            double hi = std::min(b, lo + len);
            if (b - hi < 0.25 * len) hi = b;
            const double ev = quad::panel([&](double r) { return f.even(r); }, lo, hi, g12);
            const double od = quad::panel([&](double r) { return f.odd(r); }, lo, hi, g12);
            const double ev8 = quad::panel([&](double r) { return f.even(r); }, lo, hi, g8);
            const double od8 = quad::panel([&](double r) { return f.odd(r); }, lo, hi, g8);
            re += ev;
            im -= od;
            err += std::abs(ev - ev8) + std::abs(od - od8);
            lo = hi;
            if (++panels > max_panels) throw QuadratureError("symbol quadrature: panel budget exhausted", err);
        }
    }

    if (modelled) {
        const auto mp = kernel.tail(y, e);
        const auto mm = kernel.tail(y, Point{-e[0], -e[1]});
        std::vector<TailMode> sum = mp, diff = mp;
        sum.insert(sum.end(), mm.begin(), mm.end());
        const auto neg = negate(mm);
        diff.insert(diff.end(), neg.begin(), neg.end());
        const bool chi_tail = alpha > 1.0;
        const TailSums ts = tail_sums(sum, w, alpha, R, false);
        const TailSums td = tail_sums(diff, w, alpha, R, chi_tail);
        re += ts.i0 - ts.ic;
        im -= td.is - (chi_tail ? w * td.i1 : 0.0);
        if (alpha == 1.0 && R < 1.0) {
            // compensator w r on [R, 1]
            double c = 0.0;
            double lo = R;
            while (lo < 1.0) {
                const double hi = std::min(1.0, lo + std::min(lo, kernel.resolution));
                c += quad::panel([&](double r) { return (f.m(r, 1.0) - f.m(r, -1.0)) / r; }, lo, hi, g12);
                lo = hi;
            }
            im += w * c;
        }
    }
    return {cplx(re, im), err};
}

}  // namespace

double FrequencyLattice::axis(int k) const {
    const int kk = k < n / 2 ? k : k - n;
    return 2.0 * pi * kk / extent;
}

Point FrequencyLattice::at(std::size_t idx) const {
    if (dim == 1) return {axis(static_cast<int>(idx)), 0.0};
    return {axis(static_cast<int>(idx / n)), axis(static_cast<int>(idx % n))};
}

bool FrequencyLattice::nyquist(std::size_t idx) const {
    if (dim == 1) return static_cast<int>(idx) == n / 2;
    return static_cast<int>(idx / n) == n / 2 || static_cast<int>(idx % n) == n / 2;
}

SymbolValue kernel_symbol(const JumpKernel& kernel, double alpha, int dim, const Point& y, const Point& u,
                          const SymbolOptions& opt) {
    const double un = norm(u, dim);
    if (un == 0.0) return {cplx(0.0, 0.0), 0.0};
    const double budget = opt.rel_budget * (1.0 + std::pow(un, alpha));
    SymbolValue out;
    if (dim == 1) {
        out = ray_integral(kernel, alpha, y, Point{1.0, 0.0}, u[0], budget);
    } else {
        // psi = int_0^pi J(u.e_phi) dphi; split where u.e vanishes and at the kernel's angular jumps
        std::vector<double> cuts{0.0, pi};
        double kink = std::atan2(u[1], u[0]) + 0.5 * pi;
        kink = std::fmod(std::fmod(kink, pi) + pi, pi);
        cuts.push_back(kink);
        for (double b : kernel.angular_breaks) cuts.push_back(std::fmod(std::fmod(b, pi) + pi, pi));
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                   cuts.end());
        const auto& rule = quad::gauss_legendre(opt.angular_nodes);
        cplx acc = 0.0;
        double err = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (b - a < 1e-15) continue;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                // phi = a + (b-a)(1 - cos(pi s))/2 clusters nodes at both ends
                const double s = 0.5 * (rule.x[q] + 1.0);
                const double phi = a + (b - a) * 0.5 * (1.0 - std::cos(pi * s));
                const double jac = (b - a) * 0.5 * pi * std::sin(pi * s) * 0.5 * rule.w[q];
                const Point e{std::cos(phi), std::sin(phi)};
                const SymbolValue j = ray_integral(kernel, alpha, y, e, u[0] * e[0] + u[1] * e[1], budget);
                acc += jac * j.value;
                err += jac * j.error_estimate;
            }
        }
        out = {acc, err};
    }
    if (opt.throw_on_budget && !(out.error_estimate <= budget)) {
        std::ostringstream os;
        os << "symbol quadrature missed its budget at |u|=" << un << " (estimate " << out.error_estimate
           << ", budget " << budget << ")";
        throw QuadratureError(os.str(), out.error_estimate);
    }
    return out;
}

SymbolValue eval_symbol_detailed(const ModelSpec& spec, const Point& y, const Point& u, const SymbolOptions& opt) {
    return kernel_symbol(spec.kernel, spec.alpha, spec.dim, y, u, opt);
}

cplx eval_symbol(const ModelSpec& spec, const Point& y, const Point& u, const SymbolOptions& opt) {
    return eval_symbol_detailed(spec, y, u, opt).value;
}

FrozenSymbol tabulate_symbol(const ModelSpec& spec, const Point& y, const FrequencyLattice& lattice,
                             const SymbolOptions& opt) {
    if (lattice.dim != spec.dim) throw ConfigError("frequency lattice dimension differs from the model's");
    FrozenSymbol sym;
    sym.base_point = y;
    sym.alpha = spec.alpha;
    sym.dim = spec.dim;
    sym.lattice = lattice;
    sym.values.assign(lattice.size(), cplx(0.0, 0.0));
    std::vector<double> errs(lattice.size(), 0.0);
    parallel_for(lattice.size(), [&](std::size_t i) {
        const SymbolValue v = eval_symbol_detailed(spec, y, lattice.at(i), opt);
        sym.values[i] = lattice.nyquist(i) ? cplx(v.value.real(), 0.0) : v.value;
        errs[i] = v.error_estimate;
    });
    for (double e : errs) sym.max_error_estimate = std::max(sym.max_error_estimate, e);
    return sym;
}

ProfileSymbols profile_symbols(const ModelSpec& spec, const FrequencyLattice& lattice, const SymbolOptions& opt) {
    ProfileSymbols ps;
    const Point origin{0.0, 0.0};
    if (spec.kernel.terms.empty()) {
        ps.rows.push_back(tabulate_symbol(spec, origin, lattice, opt).values);
        return ps;
    }
    ps.separable = true;
    for (const auto& term : spec.kernel.terms) {
        std::vector<cplx> row(lattice.size());
        parallel_for(lattice.size(), [&](std::size_t i) {
            const cplx v = kernel_symbol(*term.profile, spec.alpha, spec.dim, origin, lattice.at(i), opt).value;
            row[i] = lattice.nyquist(i) ? cplx(v.real(), 0.0) : v;
        });
        ps.rows.push_back(std::move(row));
        ps.weights.push_back(term.weight);
    }
    return ps;
}

double conjugate_symmetry_defect(const FrozenSymbol& sym) {
    const auto& lat = sym.lattice;
    const int n = lat.n;
    auto neg = [n](int k) { return (n - k) % n; };
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        std::size_t j;
        if (lat.dim == 1) {
            j = static_cast<std::size_t>(neg(static_cast<int>(i)));
        } else {
            const int k1 = static_cast<int>(i / n), k2 = static_cast<int>(i % n);
            j = static_cast<std::size_t>(neg(k1)) * n + neg(k2);
        }
        worst = std::max(worst, std::abs(sym.values[j] - std::conj(sym.values[i])));
    }
    return worst;
}

BoundReport check_coercivity(const FrozenSymbol& sym, const ModelSpec& spec, double floor_factor) {
    BoundReport r;
    r.id = "symbol-coercivity";
    double inf = std::numeric_limits<double>::infinity(), arg = 0.0;
    double min_re = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sym.values.size(); ++i) {
        const double un = norm(sym.lattice.at(i), sym.dim);
        if (un == 0.0) continue;
        const double ratio = sym.values[i].real() / std::pow(un, sym.alpha);
        min_re = std::min(min_re, sym.values[i].real());
        if (ratio < inf) {
            inf = ratio;
            arg = un;
        }
    }
    if (!std::isfinite(inf)) throw DomainError("coercivity check needs a lattice frequency other than 0");
    const double floor = floor_factor * spec.kappa0;
    r.constants = {{"inf_ratio", inf}, {"floor", floor}, {"min_real_part", min_re}};
    r.witness = {{"abs_u", arg}};
    r.status = std::isfinite(inf) && inf >= floor ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

void write_symbol_csv(const FrozenSymbol& sym, const std::string& path) {
    CsvWriter csv(path, sym.dim == 1 ? std::vector<std::string>{"u", "Re", "Im"}
                                     : std::vector<std::string>{"u1", "u2", "Re", "Im"});
    for (std::size_t i = 0; i < sym.values.size(); ++i) {
        const Point u = sym.lattice.at(i);
        if (sym.dim == 1)
            csv.row({u[0], sym.values[i].real(), sym.values[i].imag()});
        else
            csv.row({u[0], u[1], sym.values[i].real(), sym.values[i].imag()});
    }
    csv.close();
}

}  // namespace stablekernel
