#include "stablekernel/rho.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stablekernel/errors.hpp"
#include "stablekernel/quadrature.hpp"

namespace stablekernel {

double eval_rho(const RhoWeight& w, double t, double abs_x, double alpha, int dim) {
    if (!(t > 0.0)) throw DomainError("rho weight evaluated at t <= 0");
    const double tau = std::pow(t, 1.0 / alpha);
    const double cut = w.beta == 0.0 ? 1.0 : std::min(std::pow(abs_x, w.beta), 1.0);
    return std::pow(t, w.gamma / alpha) * cut * std::pow(tau + abs_x, -dim - alpha);
}

double eval_rho(const RhoWeight& w, double t, const Point& x, const ModelSpec& spec) {
    return eval_rho(w, t, norm(x, spec.dim), spec.alpha, spec.dim);
}

double beta_function(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

RhoGrid RhoGrid::refined() const {
    RhoGrid g = *this;
    g.n_t = 2 * n_t - 1;
    g.n_x = 2 * n_x - 1;
    g.n_s = 2 * n_s - 1;
    return g;
}

namespace {

std::vector<double> geometric(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? b : a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    return v;
}

// fractions s/t clustered at both ends, logit-spaced in [1e-3, 1 - 1e-3]
std::vector<double> fractions(int n) {
    std::vector<double> v;
    const double lo = std::log(1e-3 / (1.0 - 1e-3));
    for (int i = 0; i < n; ++i) {
        const double z = n == 1 ? 0.0 : lo + (-2.0 * lo) * i / (n - 1);
        v.push_back(1.0 / (1.0 + std::exp(-z)));
    }
    return v;
}

void check_range(double beta, double hi, const char* clause) {
    if (!(beta >= 0.0 && beta <= hi + 1e-15)) {
        std::ostringstream os;
        os << clause << ": beta=" << beta << " outside [0, " << hi << "]";
        throw DomainError(os.str());
    }
}

double space_integral(const RhoWeight& w, double t, double alpha, int dim) {
    const double tau = std::pow(t, 1.0 / alpha);
    auto radial = [&](double r) {
        const double jac = dim == 1 ? 2.0 : 2.0 * std::numbers::pi * r;
        return jac * eval_rho(w, t, r, alpha, dim);
    };
    std::vector<double> cuts{0.0, tau, 1.0};
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += quad::finite(radial, cuts[i], cuts[i + 1], 1e-12);
    s += quad::semi_infinite([&](double u) { return radial(cuts.back() + u); }, 0.0, 1e-12);
    return s;
}

// rho(w, t, r) with the t-dependent factors evaluated once
struct RhoFactor {
    double lead, tau, beta, power;
    RhoFactor(const RhoWeight& w, double t, double alpha)
        : lead(std::pow(t, w.gamma / alpha)), tau(std::pow(t, 1.0 / alpha)), beta(w.beta), power(-1.0 - alpha) {}
    double operator()(double r) const {
        const double cut = beta == 0.0 ? 1.0 : std::min(std::pow(r, beta), 1.0);
        return lead * cut * std::pow(tau + r, power);
    }
};

void graded_nodes(std::vector<double>& nodes, double centre, double scale, int below, double reach) {
    for (double h = scale * std::pow(4.0, -below); h < reach; h *= 4.0) {
        nodes.push_back(centre - h);
        nodes.push_back(centre + h);
    }
}

// d=1 convolution of rho(w1, t1, x - .) with rho(w2, s, .): Gauss panels on nodes graded
// geometrically about the two centres, geometric tail panels and a closed-form power tail.
double space_convolution_split(const RhoWeight& w1, double t1, const RhoWeight& w2, double s, double x, double alpha) {
    const RhoFactor r1(w1, t1, alpha), r2(w2, s, alpha);
    auto f = [&](double z) { return r1(std::abs(x - z)) * r2(std::abs(z)); };
    const double reach = 4.0 * (std::abs(x) + 1.0 + r1.tau + r2.tau);
    std::vector<double> nodes{0.0, x, -1.0, 1.0, x - 1.0, x + 1.0, -reach, reach};
    graded_nodes(nodes, 0.0, r2.tau, w2.beta > 0.0 ? 8 : 1, reach);
    graded_nodes(nodes, x, r1.tau, w1.beta > 0.0 ? 8 : 1, reach);
    std::erase_if(nodes, [&](double z) { return std::abs(z) > reach; });
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    const quad::Rule& rule = quad::gauss_legendre(8);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) total += quad::panel(f, nodes[i], nodes[i + 1], rule);
    double z = reach;
    for (; z < 1e4 * reach; z *= 4.0) {
        total += quad::panel(f, z, 4.0 * z, rule);
        total += quad::panel(f, -4.0 * z, -z, rule);
    }
    // beyond z the integrand decays like |z|^(-2-2 alpha)
    const double q = 1.0 + 2.0 * alpha;
    return total + z * (f(z) + f(-z)) / q;
}

double space_convolution(const RhoWeight& w1, const RhoWeight& w2, double t, double s, double x, double alpha) {
    return space_convolution_split(w1, t - s, w2, s, x, alpha);
}

double rhs_space_convolution(const RhoWeight& w1, const RhoWeight& w2, double t, double s, double x, double alpha) {
    const double t1 = t - s;
    const double g1 = w1.gamma, b1 = w1.beta, g2 = w2.gamma, b2 = w2.beta;
    const double r00 = eval_rho({0.0, 0.0}, t, x, alpha, 1);
    const double r0b2 = eval_rho({0.0, b2}, t, x, alpha, 1);
    const double r0b1 = eval_rho({0.0, b1}, t, x, alpha, 1);
    const double a = std::pow(t1, (g1 + b1 + b2 - alpha) / alpha) * std::pow(s, g2 / alpha) +
                     std::pow(t1, g1 / alpha) * std::pow(s, (g2 + b1 + b2 - alpha) / alpha);
    return a * r00 + std::pow(t1, (g1 + b1 - alpha) / alpha) * std::pow(s, g2 / alpha) * r0b2 +
           std::pow(t1, g1 / alpha) * std::pow(s, (g2 + b2 - alpha) / alpha) * r0b1;
}

double space_time_convolution(const RhoWeight& w1, const RhoWeight& w2, double t, double x, double alpha) {
    // the integrand behaves like s^(p2-1) at 0 and (t-s)^(p1-1) at t: geometric Gauss panels toward
    // both ends, closed-form power pieces below d
    auto left = [&](double s) { return space_convolution_split(w1, t - s, w2, s, x, alpha); };
    auto right = [&](double u) { return space_convolution_split(w1, u, w2, t - u, x, alpha); };
    const double p1 = (w1.gamma + w1.beta) / alpha, p2 = (w2.gamma + w2.beta) / alpha;
    const double d = 1e-10 * t;
    const quad::Rule& rule = quad::gauss_legendre(8);
    double total = d * left(d) / p2 + d * right(d) / p1;
    for (double hi = 0.5 * t; hi > d; hi /= 4.0) {
        const double lo = std::max(hi / 4.0, d);
        total += quad::panel(left, lo, hi, rule) + quad::panel(right, lo, hi, rule);
    }
    return total;
}

double rhs_space_time(const RhoWeight& w1, const RhoWeight& w2, double t, double x, double alpha) {
    const double g = w1.gamma + w2.gamma;
    const double b = beta_function((w1.gamma + w1.beta) / alpha, (w2.gamma + w2.beta) / alpha);
    return b * (eval_rho({g + w1.beta + w2.beta, 0.0}, t, x, alpha, 1) + eval_rho({g + w2.beta, w1.beta}, t, x, alpha, 1) +
                eval_rho({g + w1.beta, w2.beta}, t, x, alpha, 1));
}

}  // namespace

std::vector<RhoTuple> default_rho_tuples(const ModelSpec& spec) {
    const double a = spec.alpha, th = spec.theta_hat();
    std::vector<RhoTuple> v;
    v.push_back({RhoInequality::space_integral, {a, 0.0}, {}});
    v.push_back({RhoInequality::space_integral, {0.0, 0.0}, {}});
    v.push_back({RhoInequality::space_integral, {a, a / 2.0}, {}});
    if (spec.dim == 1) {
        v.push_back({RhoInequality::space_convolution, {a, 0.0}, {a, 0.0}});
        v.push_back({RhoInequality::space_convolution, {0.0, th}, {a, 0.0}});
        v.push_back({RhoInequality::space_convolution, {a, a / 4.0}, {0.0, a / 4.0}});
        v.push_back({RhoInequality::space_time_convolution, {a, 0.0}, {th, 0.0}});
        v.push_back({RhoInequality::space_time_convolution, {0.0, th}, {th, 0.0}});
        v.push_back({RhoInequality::space_time_convolution, {a, th}, {a, 0.0}});
    }
    return v;
}

double rho_constant(const ModelSpec& spec, const RhoTuple& tuple, const RhoGrid& grid) {
    const double alpha = spec.alpha;
    const auto ts = geometric(grid.t_min, 1.0, grid.n_t);
    std::vector<double> xs{0.0};
    for (double x : geometric(grid.x_min, grid.x_max, grid.n_x)) xs.push_back(x);
    double best = 0.0;
    switch (tuple.kind) {
        case RhoInequality::space_integral: {
            check_range(tuple.w1.beta, alpha / 2.0, "space integral inequality");
            for (double t : ts) {
                const double v = space_integral(tuple.w1, t, alpha, spec.dim) /
                                 std::pow(t, (tuple.w1.gamma + tuple.w1.beta - alpha) / alpha);
                best = std::max(best, v);
            }
            break;
        }
        case RhoInequality::space_convolution: {
            check_range(tuple.w1.beta, alpha / 4.0, "space convolution inequality (beta1)");
            check_range(tuple.w2.beta, alpha / 4.0, "space convolution inequality (beta2)");
            if (spec.dim != 1) throw DomainError("convolution inequalities are measured in d=1 only");
            const auto fr = fractions(grid.n_s);
            for (double t : ts)
                for (double f : fr)
                    for (double x : xs) {
                        const double s = f * t;
                        const double v = space_convolution(tuple.w1, tuple.w2, t, s, x, alpha) /
                                         rhs_space_convolution(tuple.w1, tuple.w2, t, s, x, alpha);
                        best = std::max(best, v);
                    }
            break;
        }
        case RhoInequality::space_time_convolution: {
            check_range(tuple.w1.beta, alpha / 4.0, "space-time convolution inequality (beta1)");
            check_range(tuple.w2.beta, alpha / 4.0, "space-time convolution inequality (beta2)");
            if (!(tuple.w1.gamma + tuple.w1.beta > 0.0) || !(tuple.w2.gamma + tuple.w2.beta > 0.0))
                throw DomainError("space-time convolution inequality requires gamma_i + beta_i > 0");
            if (spec.dim != 1) throw DomainError("convolution inequalities are measured in d=1 only");
            for (double t : ts)
                for (double x : xs) {
                    const double v = space_time_convolution(tuple.w1, tuple.w2, t, x, alpha) /
                                     rhs_space_time(tuple.w1, tuple.w2, t, x, alpha);
                    best = std::max(best, v);
                }
            break;
        }
    }
    return best;
}

std::vector<BoundReport> verify_rho_inequalities(const ModelSpec& spec, const std::vector<RhoTuple>& tuples,
                                                 const RhoGrid& grid, double stability_tol) {
    std::vector<BoundReport> out;
    const RhoGrid fine = grid.refined();
    for (const auto& tp : tuples) {
        BoundReport r;
        switch (tp.kind) {
            case RhoInequality::space_integral: r.id = "rho-space-integral"; break;
            case RhoInequality::space_convolution: r.id = "rho-space-convolution"; break;
            case RhoInequality::space_time_convolution: r.id = "rho-space-time-convolution"; break;
        }
        const double c0 = rho_constant(spec, tp, grid);
        const double c1 = rho_constant(spec, tp, fine);
        r.constants = {{"constant", c1}, {"constant_coarse", c0}};
        r.witness = {{"gamma1", tp.w1.gamma}, {"beta1", tp.w1.beta}};
        if (tp.kind != RhoInequality::space_integral) {
            r.witness.push_back({"gamma2", tp.w2.gamma});
            r.witness.push_back({"beta2", tp.w2.beta});
        }
        r.stability_threshold = stability_tol;
        r.stability_delta = relative_change(c0, c1);
        finalize(r, {"constant"});
        out.push_back(r);
    }
    return out;
}

}  // namespace stablekernel
