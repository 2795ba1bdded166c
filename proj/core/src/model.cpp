#include "stablekernel/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stablekernel/errors.hpp"

namespace stablekernel {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::info: return "info";
    }
    return "info";
}

JumpKernel make_separable(std::vector<JumpKernel::Term> terms) {
    JumpKernel k;
    k.tail_radius = 0.0;
    k.resolution = 1e300;
    bool all_tails = true;
    for (const auto& t : terms) {
        k.tail_radius = std::max(k.tail_radius, t.profile->tail_radius);
        k.resolution = std::min(k.resolution, t.profile->resolution);
        k.radial_breaks.insert(k.radial_breaks.end(), t.profile->radial_breaks.begin(), t.profile->radial_breaks.end());
        k.angular_breaks.insert(k.angular_breaks.end(), t.profile->angular_breaks.begin(), t.profile->angular_breaks.end());
        all_tails = all_tails && t.profile->has_tail_model();
    }
    std::sort(k.radial_breaks.begin(), k.radial_breaks.end());
    k.radial_breaks.erase(std::unique(k.radial_breaks.begin(), k.radial_breaks.end()), k.radial_breaks.end());
    std::sort(k.angular_breaks.begin(), k.angular_breaks.end());
    k.angular_breaks.erase(std::unique(k.angular_breaks.begin(), k.angular_breaks.end()), k.angular_breaks.end());
    k.terms = std::move(terms);
    auto shared = std::make_shared<std::vector<JumpKernel::Term>>(k.terms);
    k.eval = [shared](const Point& x, const Point& h) {
        double s = 0.0;
        for (const auto& t : *shared) s += t.weight(x) * t.profile->eval(x, h);
        return s;
    };
    if (all_tails) {
        k.tail = [shared](const Point& x, const Point& dir) {
            std::vector<TailMode> modes;
            for (const auto& t : *shared) {
                const double w = t.weight(x);
                for (TailMode m : t.profile->tail(x, dir)) {
                    m.cos_coef *= w;
                    m.sin_coef *= w;
                    modes.push_back(m);
                }
            }
            return modes;
        };
    }
    return k;
}

void check_spec_fields(const ModelSpec& spec) {
    auto fail = [&](const std::string& what) { throw ConfigError("model '" + spec.name + "': " + what); };
    if (!(spec.alpha > 0.0 && spec.alpha < 2.0)) fail("alpha must lie in (0,2)");
    if (spec.dim != 1 && spec.dim != 2) fail("dim must be 1 or 2");
    if (!spec.kernel.eval) fail("kernel evaluator missing");
    if (!(spec.kappa0 > 0.0) || !std::isfinite(spec.kappa0)) fail("kappa0 must be positive");
    if (!(spec.kappa1 >= spec.kappa0) || !std::isfinite(spec.kappa1)) fail("kappa1 must be >= kappa0");
    if (!(spec.kappa2 >= 0.0) || !std::isfinite(spec.kappa2)) fail("kappa2 must be >= 0");
    if (!(spec.theta > 0.0 && spec.theta < 1.0)) fail("theta must lie in (0,1)");
    if (!(spec.kappa3 >= 0.0) || !std::isfinite(spec.kappa3)) fail("kappa3 must be >= 0");
}

namespace {

std::shared_ptr<const JumpKernel> rescale_kernel(const JumpKernel& k, double a);

JumpKernel rescale_kernel_value(const JumpKernel& k, double a) {
    JumpKernel r;
    auto src = std::make_shared<JumpKernel>(k);
    r.eval = [src, a](const Point& x, const Point& h) {
        return src->eval(Point{x[0] / a, x[1] / a}, Point{h[0] / a, h[1] / a});
    };
    if (k.tail) {
        r.tail = [src, a](const Point& x, const Point& dir) {
            auto modes = src->tail(Point{x[0] / a, x[1] / a}, dir);
            for (auto& m : modes) m.omega /= a;
            return modes;
        };
    }
    r.tail_radius = k.tail_radius * a;
    for (double b : k.radial_breaks) r.radial_breaks.push_back(b * a);
    r.angular_breaks = k.angular_breaks;
    r.resolution = k.resolution * a;
    r.x_independent = k.x_independent;
    for (const auto& t : k.terms) {
        auto w = t.weight;
        r.terms.push_back({[w, a](const Point& x) { return w(Point{x[0] / a, x[1] / a}); }, rescale_kernel(*t.profile, a)});
    }
    return r;
}

std::shared_ptr<const JumpKernel> rescale_kernel(const JumpKernel& k, double a) {
    return std::make_shared<const JumpKernel>(rescale_kernel_value(k, a));
}

}  // namespace

ModelSpec rescale(const ModelSpec& spec, double a) {
    if (!(a > 0.0)) throw ConfigError("rescaling factor must be positive");
    ModelSpec r = spec;
    r.name = spec.name + "@scale";
    r.kernel = rescale_kernel_value(spec.kernel, a);
    r.kappa2 = spec.kappa2 * std::pow(a, -spec.theta);
    if (spec.drift) {
        auto b = spec.drift;
        const double f = std::pow(a, 1.0 - spec.alpha);
        r.drift = [b, a, f](const Point& x) {
            Point v = b(Point{x[0] / a, x[1] / a});
            return Point{f * v[0], f * v[1]};
        };
        r.kappa3 = spec.kappa3 * f;
    }
    return r;
}

bool ValidationReport::passed() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::fail) return false;
    return true;
}

const AssumptionCheck* ValidationReport::find(const std::string& assumption) const {
    for (const auto& c : checks)
        if (c.assumption == assumption) return &c;
    return nullptr;
}

namespace {

std::vector<Point> sample_points(const ModelSpec& spec, const ValidationLattice& lat) {
    std::vector<Point> pts;
    const int n = lat.n_points;
    if (spec.dim == 1) {
        for (int i = 0; i < n; ++i) {
            const double s = n == 1 ? 0.0 : -1.0 + 2.0 * i / (n - 1);
            pts.push_back({lat.x_extent * s, 0.0});
        }
    } else {
        // Halton points in bases 2 and 3
        auto radical = [](int i, int base) {
            double f = 1.0, r = 0.0;
            while (i > 0) {
                f /= base;
                r += f * (i % base);
                i /= base;
            }
            return r;
        };
        for (int i = 0; i < n; ++i)
            pts.push_back({lat.x_extent * (2.0 * radical(i + 1, 2) - 1.0), lat.x_extent * (2.0 * radical(i + 1, 3) - 1.0)});
    }
    return pts;
}

std::vector<Point> sample_directions(const ModelSpec& spec, const ValidationLattice& lat) {
    if (spec.dim == 1) return {Point{1.0, 0.0}, Point{-1.0, 0.0}};
    std::vector<Point> dirs;
    for (int k = 0; k < lat.n_directions; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / lat.n_directions;
        dirs.push_back({std::cos(phi), std::sin(phi)});
    }
    return dirs;
}

std::vector<double> sample_radii(const ValidationLattice& lat) {
    std::vector<double> r;
    for (int i = 0; i < lat.n_radii; ++i) {
        const double s = lat.n_radii == 1 ? 0.0 : static_cast<double>(i) / (lat.n_radii - 1);
        r.push_back(lat.r_min * std::pow(lat.r_max / lat.r_min, s));
    }
    return r;
}

std::vector<NamedValue> point_witness(const std::string& prefix, const Point& p, int dim) {
    std::vector<NamedValue> w{{prefix + "1", p[0]}};
    if (dim == 2) w.push_back({prefix + "2", p[1]});
    return w;
}

[[noreturn]] void non_finite(const std::string& what, const Point& x, const Point& h, int dim) {
    std::ostringstream os;
    os << "non-finite " << what << " at x=(" << x[0];
    if (dim == 2) os << "," << x[1];
    os << ")";
    if (what == "kernel") {
        os << " h=(" << h[0];
        if (dim == 2) os << "," << h[1];
        os << ")";
    }
    throw ModelViolation(os.str());
}

}  // namespace

ValidationReport validate_model(const ModelSpec& spec, const ValidationLattice& lat) {
    check_spec_fields(spec);
    if (lat.n_points < 1 || lat.n_radii < 1 || lat.n_directions < 1)
        throw ConfigError("validation lattice must be nonempty");
    const auto xs = sample_points(spec, lat);
    const auto dirs = sample_directions(spec, lat);
    const auto radii = sample_radii(lat);
    std::vector<Point> hs;
    for (const auto& e : dirs)
        for (double r : radii) hs.push_back({r * e[0], r * e[1]});

    // kernel values on the full lattice, reused by every check
    std::vector<double> values(xs.size() * hs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < hs.size(); ++j) {
            const double v = spec.kernel(xs[i], hs[j]);
            if (!std::isfinite(v)) non_finite("kernel", xs[i], hs[j], spec.dim);
            values[i * hs.size() + j] = v;
        }

    ValidationReport report;
    const double tol = lat.bound_tol * std::max(1.0, spec.kappa1);

    {
        AssumptionCheck c;
        c.assumption = "kernel_bounds";
        double worst = -1e300;
        std::size_t wi = 0, wj = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < hs.size(); ++j) {
                const double v = values[i * hs.size() + j];
                const double viol = std::max(spec.kappa0 - v, v - spec.kappa1);
                if (viol > worst) {
                    worst = viol;
                    wi = i;
                    wj = j;
                }
            }
        c.worst_violation = std::max(0.0, worst);
        c.status = worst > tol ? CheckStatus::fail : CheckStatus::pass;
        c.witness = point_witness("x", xs[wi], spec.dim);
        auto hw = point_witness("h", hs[wj], spec.dim);
        c.witness.insert(c.witness.end(), hw.begin(), hw.end());
        c.witness.push_back({"n", values[wi * hs.size() + wj]});
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c;
        c.assumption = "kernel_holder";
        double worst = -1e300;
        std::size_t wa = 0, wb = 1 % xs.size(), wj = 0;
        for (std::size_t a = 0; a < xs.size(); ++a)
            for (std::size_t b = a + 1; b < xs.size(); ++b) {
                const Point d{xs[a][0] - xs[b][0], xs[a][1] - xs[b][1]};
                const double bound = spec.kappa2 * std::pow(norm(d, spec.dim), spec.theta);
                for (std::size_t j = 0; j < hs.size(); ++j) {
                    const double diff = std::abs(values[a * hs.size() + j] - values[b * hs.size() + j]);
                    if (diff - bound > worst) {
                        worst = diff - bound;
                        wa = a;
                        wb = b;
                        wj = j;
                    }
                }
            }
        if (xs.size() < 2) worst = 0.0;
        c.worst_violation = std::max(0.0, worst);
        c.status = worst > tol ? CheckStatus::fail : CheckStatus::pass;
        c.witness = point_witness("x", xs[wa], spec.dim);
        auto yw = point_witness("y", xs[wb], spec.dim);
        auto hw = point_witness("h", hs[wj], spec.dim);
        c.witness.insert(c.witness.end(), yw.begin(), yw.end());
        c.witness.insert(c.witness.end(), hw.begin(), hw.end());
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c;
        c.assumption = "odd_moment";
        if (!spec.unit_index()) {
            c.status = CheckStatus::info;
            c.note = "required only for alpha = 1";
        } else {
            double worst = 0.0;
            Point wx{}, wr{0.0, 0.0};
            for (const auto& x : xs)
                for (double r : radii) {
                    double m = 0.0;
                    if (spec.dim == 1) {
                        const double vp = spec.kernel(x, {r, 0.0});
                        const double vm = spec.kernel(x, {-r, 0.0});
                        if (!std::isfinite(vp) || !std::isfinite(vm)) non_finite("kernel", x, {r, 0.0}, 1);
                        m = std::abs(vp - vm) / 2.0;
                    } else {
                        double sx = 0.0, sy = 0.0;
                        const int nodes = std::max(256, lat.sphere_nodes);
                        for (int k = 0; k < nodes; ++k) {
                            const double phi = 2.0 * std::numbers::pi * k / nodes;
                            const double v = spec.kernel(x, {r * std::cos(phi), r * std::sin(phi)});
                            if (!std::isfinite(v)) non_finite("kernel", x, {r * std::cos(phi), r * std::sin(phi)}, 2);
                            sx += v * std::cos(phi);
                            sy += v * std::sin(phi);
                        }
                        m = std::hypot(sx, sy) / nodes;
                    }
                    m /= spec.kappa1;
                    if (m > worst) {
                        worst = m;
                        wx = x;
                        wr = {r, 0.0};
                    }
                }
            c.worst_violation = worst;
            c.status = worst > lat.moment_tol ? CheckStatus::fail : CheckStatus::pass;
            c.witness = point_witness("x", wx, spec.dim);
            c.witness.push_back({"r", wr[0]});
            c.note = "sampled radii only";
        }
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c;
        c.assumption = "drift_bound";
        if (!spec.has_drift()) {
            c.status = CheckStatus::info;
            c.note = spec.alpha > 1.0 ? "no drift" : "drift ignored unless alpha > 1";
        } else {
            double worst = -1e300;
            Point wx{};
            for (const auto& x : xs) {
                const Point b = spec.drift(x);
                if (!std::isfinite(b[0]) || !std::isfinite(b[1])) non_finite("drift", x, {}, spec.dim);
                const double v = norm(b, spec.dim) - spec.kappa3;
                if (v > worst) {
                    worst = v;
                    wx = x;
                }
            }
            c.worst_violation = std::max(0.0, worst);
            c.status = worst > lat.bound_tol * std::max(1.0, spec.kappa3) ? CheckStatus::fail : CheckStatus::pass;
            c.witness = point_witness("x", wx, spec.dim);
        }
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c;
        c.assumption = "theta_hat";
        c.status = CheckStatus::info;
        c.witness = {{"theta_hat", spec.theta_hat()}};
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace stablekernel
