#include "stablekernel/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stablekernel/csv.hpp"
#include "stablekernel/errors.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/quadrature.hpp"
#include "stablekernel/spectral.hpp"
#include "stablekernel/symbol.hpp"

namespace stablekernel {

namespace {

constexpr double pi = std::numbers::pi;

double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * pi; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 path_stream(std::uint64_t seed, std::size_t path) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(path) + 1)));
}

double uniform(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53; }

/// Drift and small-jump covariance frozen at a point.
struct LocalMoments {
    Point velocity{0.0, 0.0};
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
};

struct Directions {
    std::vector<Point> e;
    std::vector<double> w;
};

Directions directions(int dim) {
    Directions d;
    if (dim == 1) {
        d.e = {{1.0, 0.0}, {-1.0, 0.0}};
        d.w = {1.0, 1.0};
        return d;
    }
    const int m = 64;
    for (int k = 0; k < m; ++k) {
        const double th = 2.0 * pi * (k + 0.5) / m;
        d.e.push_back({std::cos(th), std::sin(th)});
        d.w.push_back(2.0 * pi / m);
    }
    return d;
}

bool odd_part_vanishes(const ModelSpec& spec) {
    const auto& k = spec.kernel;
    for (int i = 0; i < 17; ++i) {
        const double x = -8.0 + i;
        for (double r : {1e-3, 0.05, 0.3, 0.9, 1.7, 4.0, 25.0}) {
            for (int a = 0; a < (spec.dim == 1 ? 1 : 8); ++a) {
                const double th = pi * a / 8.0;
                const Point xp{x, 0.5 * x}, h{r * std::cos(th), r * std::sin(th)}, mh{-h[0], -h[1]};
                if (std::abs(k(xp, h) - k(xp, mh)) > 1e-14 * (1.0 + std::abs(k(xp, h)))) return false;
            }
        }
    }
    return true;
}

class Moments {
public:
    Moments(const SimConfig& cfg) : spec_(cfg.spec), eps_(cfg.epsilon_cut), gaussian_(cfg.small_jump_mode == SmallJumpMode::gaussian_substitute),
                                    dirs_(directions(cfg.spec.dim)), symmetric_(odd_part_vanishes(cfg.spec)) {
        if (spec_.kernel.x_independent) {
            cached_ = compute(spec_.kernel, {0.0, 0.0});
            have_cache_ = true;
        } else {
            for (const auto& term : spec_.kernel.terms) profiles_.push_back(compute(*term.profile, {0.0, 0.0}));
        }
    }

    LocalMoments at(const Point& x) const {
        if (have_cache_) return cached_;
        if (profiles_.empty()) return compute(spec_.kernel, x);
        LocalMoments m;
        for (std::size_t p = 0; p < profiles_.size(); ++p) {
            const double w = spec_.kernel.terms[p].weight(x);
            m.velocity[0] += w * profiles_[p].velocity[0];
            m.velocity[1] += w * profiles_[p].velocity[1];
            m.cxx += w * profiles_[p].cxx;
            m.cxy += w * profiles_[p].cxy;
            m.cyy += w * profiles_[p].cyy;
        }
        return m;
    }

private:
    LocalMoments compute(const JumpKernel& k, const Point& x) const {
        LocalMoments m;
        const double a = spec_.alpha;
        const auto& gl = quad::gauss_legendre(8);
        if (gaussian_) {
            // int_0^eps r^{1-alpha} g(r) dr with u = (r/eps)^{2-alpha}
            const double pre = std::pow(eps_, 2.0 - a) / (2.0 - a);
            for (std::size_t d = 0; d < dirs_.e.size(); ++d) {
                const Point e = dirs_.e[d];
                const double s = quad::panel([&](double u) { const double r = eps_ * std::pow(u, 1.0 / (2.0 - a));
                                                             return k(x, {r * e[0], r * e[1]}); },
                                             0.0, 1.0, gl) * pre * dirs_.w[d];
                m.cxx += s * e[0] * e[0];
                m.cxy += s * e[0] * e[1];
                m.cyy += s * e[1] * e[1];
            }
        }
        if (!symmetric_) {
            const Point v = odd_moment(k, x);
            m.velocity[0] += v[0];
            m.velocity[1] += v[1];
        }
        return m;
    }

    /// alpha < 1: int_{|h|<=eps} h nu; alpha = 1: -int_{eps<|h|<=1} h nu; alpha > 1: -int_{|h|>eps} h nu.
    Point odd_moment(const JumpKernel& k, const Point& x) const {
        const double a = spec_.alpha;
        const auto& gl = quad::gauss_legendre(16);
        Point v{0.0, 0.0};
        for (std::size_t d = 0; d < dirs_.e.size(); ++d) {
            const Point e = dirs_.e[d];
            auto ray = [&](double r) { return k(x, {r * e[0], r * e[1]}); };
            double s = 0.0;
            if (a < 1.0) {
                const double pre = std::pow(eps_, 1.0 - a) / (1.0 - a);
                s = pre * quad::panel([&](double u) { return ray(eps_ * std::pow(u, 1.0 / (1.0 - a))); }, 0.0, 1.0, gl);
            } else {
                const double top = a == 1.0 ? 1.0 : std::max(1.0, k.tail_radius);
                double lo = eps_;
                while (lo < top) {
                    const double hi = std::min(top, 2.0 * lo);
                    s -= quad::panel([&](double lr) { const double r = std::exp(lr); return r * std::pow(r, -a) * ray(r); },
                                     std::log(lo), std::log(hi), gl);
                    lo = hi;
                }
                if (a > 1.0) {
                    if (!k.has_tail_model())
                        throw ConfigError("asymmetric kernels need a tail model for the large-jump compensator");
                    for (const auto& md : k.tail(x, e)) {
                        const auto t = quad::power_tail(md.omega, a - 1.0, top);
                        s -= md.cos_coef * t.real() + md.sin_coef * t.imag();
                    }
                }
            }
            v[0] += s * e[0] * dirs_.w[d];
            v[1] += s * e[1] * dirs_.w[d];
        }
        return v;
    }

    const ModelSpec& spec_;
    double eps_;
    bool gaussian_;
    Directions dirs_;
    bool symmetric_;
    LocalMoments cached_;
    bool have_cache_ = false;
    std::vector<LocalMoments> profiles_;  ///< per separable term
};

struct PathStats {
    std::size_t candidates = 0, accepted = 0;
};

/// One path on [0, horizon]; `observe` is called with each skeleton state and returns true to stop.
template <class Observe>
Point run_path(const SimConfig& cfg, const Moments& mom, const Point& x0, double horizon, std::mt19937_64& g,
               PathStats& stats, Observe&& observe) {
    const ModelSpec& spec = cfg.spec;
    const int dim = spec.dim;
    const double a = spec.alpha;
    const double lambda = dominating_intensity(spec, cfg.epsilon_cut);
    const double k1 = spec.kappa1;
    std::normal_distribution<double> normal;
    Point x = x0;
    double t = 0.0;
    double next_jump = -std::log(uniform(g)) / lambda;
    while (t < horizon) {
        const double h = std::min(cfg.dt, horizon - t);
        const LocalMoments m = mom.at(x);
        const Point b = spec.drift_at(x);
        x[0] += (b[0] + m.velocity[0]) * h;
        x[1] += (b[1] + m.velocity[1]) * h;
        if (cfg.small_jump_mode == SmallJumpMode::gaussian_substitute) {
            const double sh = std::sqrt(h);
            const double l11 = std::sqrt(m.cxx);
            const double z1 = normal(g);
            x[0] += sh * l11 * z1;
            if (dim == 2) {
                const double l21 = l11 > 0.0 ? m.cxy / l11 : 0.0;
                const double l22 = std::sqrt(std::max(0.0, m.cyy - l21 * l21));
                x[1] += sh * (l21 * z1 + l22 * normal(g));
            }
        }
        if (observe(x)) return x;
        while (next_jump <= t + h) {
            ++stats.candidates;
            const double r = cfg.epsilon_cut * std::pow(uniform(g), -1.0 / a);
            Point jump;
            if (dim == 1) {
                jump = {uniform(g) < 0.5 ? -r : r, 0.0};
            } else {
                const double th = 2.0 * pi * uniform(g);
                jump = {r * std::cos(th), r * std::sin(th)};
            }
            const double acc = spec.kernel(x, jump) / k1;
            if (acc > 1.0 + 1e-12)
                throw ModelViolation("kernel exceeds kappa1 during thinning (acceptance " + format_double(acc) + ")");
            if (uniform(g) < acc) {
                ++stats.accepted;
                x[0] += jump[0];
                x[1] += jump[1];
                if (observe(x)) return x;
            }
            next_jump += -std::log(uniform(g)) / lambda;
        }
        t += h;
    }
    return x;
}

}  // namespace

const char* to_string(SmallJumpMode m) {
    return m == SmallJumpMode::drift_compensate ? "drift-compensate" : "gaussian-substitute";
}

SmallJumpMode small_jump_mode_from_string(const std::string& s) {
    if (s == "drift-compensate") return SmallJumpMode::drift_compensate;
    if (s == "gaussian-substitute") return SmallJumpMode::gaussian_substitute;
    throw ConfigError("unknown small_jump_mode '" + s + "'");
}

double dominating_intensity(const ModelSpec& spec, double eps) {
    return spec.kappa1 * sphere_measure(spec.dim) * std::pow(eps, -spec.alpha) / spec.alpha;
}

double default_epsilon_cut(const ModelSpec& spec) {
    const double a = spec.alpha;
    const double eps = std::pow(1e-3 * (3.0 - a) / (spec.kappa1 * sphere_measure(spec.dim)), 1.0 / (3.0 - a));
    return std::min(eps, 0.5);
}

SimConfig make_sim_config(const ModelSpec& spec, std::size_t n_paths, std::uint64_t seed) {
    SimConfig c;
    c.spec = spec;
    c.epsilon_cut = default_epsilon_cut(spec);
    c.dt = std::min(0.5 / dominating_intensity(spec, c.epsilon_cut), 0.01);
    c.n_paths = n_paths;
    c.seed = seed;
    return c;
}

void validate_sim_config(const SimConfig& cfg) {
    check_spec_fields(cfg.spec);
    if (!(cfg.epsilon_cut > 0.0 && cfg.epsilon_cut < 1.0)) throw ConfigError("epsilon_cut must lie in (0, 1)");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (cfg.n_paths == 0) throw ConfigError("n_paths must be positive");
    const double load = cfg.dt * dominating_intensity(cfg.spec, cfg.epsilon_cut);
    if (load > 0.5 + 1e-12) throw ConfigError("dt * lambda_max = " + format_double(load) + " exceeds 0.5");
}

SampleSet simulate_paths(const SimConfig& cfg, const Point& x0, double horizon) {
    validate_sim_config(cfg);
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    const Moments mom(cfg);
    SampleSet s;
    s.dim = cfg.spec.dim;
    s.x0 = x0;
    s.horizon = horizon;
    s.terminal.resize(cfg.n_paths);
    std::vector<PathStats> stats(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        auto g = path_stream(cfg.seed, i);
        s.terminal[i] = run_path(cfg, mom, x0, horizon, g, stats[i], [](const Point&) { return false; });
    });
    for (const auto& st : stats) {
        s.candidate_jumps += st.candidates;
        s.accepted_jumps += st.accepted;
    }
    return s;
}

void write_samples_csv(const SampleSet& samples, const std::string& path) {
    std::vector<std::string> header{"path_id", "x"};
    if (samples.dim == 2) header = {"path_id", "x1", "x2"};
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < samples.terminal.size(); ++i) {
        const auto& p = samples.terminal[i];
        if (samples.dim == 1)
            w.row({static_cast<double>(i), p[0]});
        else
            w.row({static_cast<double>(i), p[0], p[1]});
    }
    w.close();
}

ExitTimeEstimate estimate_exit_probability(const SimConfig& cfg, const Point& x0, double r, double t) {
    validate_sim_config(cfg);
    if (!(r > 0.0)) throw ConfigError("exit radius must be positive");
    if (!(t >= 10.0 * cfg.dt)) throw ConfigError("exit horizon must cover at least 10 time steps to bracket exits");
    const Moments mom(cfg);
    const int dim = cfg.spec.dim;
    std::vector<char> exited(cfg.n_paths, 0);
    std::vector<PathStats> stats(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        auto g = path_stream(cfg.seed, i);
        run_path(cfg, mom, x0, t, g, stats[i], [&](const Point& x) {
            const Point d{x[0] - x0[0], x[1] - x0[1]};
            if (norm(d, dim) > r) exited[i] = 1;
            return exited[i] != 0;
        });
    });
    const double n = static_cast<double>(cfg.n_paths);
    const double k = static_cast<double>(std::count(exited.begin(), exited.end(), 1));
    ExitTimeEstimate e;
    e.r = r;
    e.t = t;
    e.x0 = x0;
    e.p_hat = k / n;
    const double z = 1.959963984540054;
    e.ci_halfwidth = z / (1.0 + z * z / n) * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z * z / (4.0 * n * n));
    e.bound_value = std::nan("");
    return e;
}

double fit_exit_envelope(std::vector<ExitTimeEstimate>& sweep, double alpha) {
    double c = 0.0;
    for (const auto& e : sweep) c = std::max(c, e.p_hat * std::pow(e.r, alpha) / e.t);
    for (auto& e : sweep) e.bound_value = c * e.t * std::pow(e.r, -alpha);
    return c;
}

AgreementReport density_agreement(const SampleSet& samples, const DensityField& field, double allowance) {
    const SpaceTimeGrid& g = field.grid;
    if (samples.dim != 1 || g.dim != 1) throw ConfigError("density agreement is implemented for d = 1");
    if (samples.terminal.empty()) throw ConfigError("no samples");
    const std::size_t ti = g.time_index(samples.horizon);
    const int n = g.n_x;
    Eigen::VectorXd f(n);
    double shift = 0.0;
    if (field.per_slice) {
        if (field.values[ti].cols() != n) throw ConfigError("agreement needs every lattice point as y");
        const int xi = nearest_index(g, samples.x0[0]);
        if (std::abs(g.coord(xi) - samples.x0[0]) > 1e-9 * g.extent)
            throw ConfigError("sample start point is not a lattice point of the field");
        f = field.values[ti].row(xi).transpose();
    } else {
        f = field.values[ti].col(0);
        shift = samples.x0[0];
    }
    const int up = 8;
    const auto cdf = spectral::cumulative(std::span<const double>(f.data(), static_cast<std::size_t>(n)), g.extent, up);
    const double total = cdf.back();
    const double h = g.extent / (n * up);
    auto model_cdf = [&](double x) {
        const double s = (x + 0.5 * g.extent) / h;
        if (s <= 0.0) return 0.0;
        if (s >= n * up) return 1.0;
        const auto i = static_cast<std::size_t>(s);
        const double w = s - static_cast<double>(i);
        return ((1.0 - w) * cdf[i] + w * cdf[i + 1]) / total;
    };
    std::vector<double> xs;
    xs.reserve(samples.terminal.size());
    for (const auto& p : samples.terminal) {
        const double d = p[0] - shift;
        xs.push_back(d - g.extent * std::round(d / g.extent));
    }
    std::sort(xs.begin(), xs.end());
    AgreementReport rep;
    rep.n = xs.size();
    const double nn = static_cast<double>(rep.n);
    std::vector<double> u(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        u[i] = model_cdf(xs[i]);
        rep.ks = std::max({rep.ks, (static_cast<double>(i) + 1.0) / nn - u[i], u[i] - static_cast<double>(i) / nn});
    }
    const int bins = 40;
    std::vector<double> counts(bins, 0.0);
    for (double v : u) counts[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>(v * bins)))] += 1.0;
    for (double c : counts) rep.chi2 += (c - nn / bins) * (c - nn / bins) / (nn / bins);
    rep.chi2_dof = bins - 1;
    rep.allowance = allowance;
    rep.threshold = 1.63 / std::sqrt(nn) + allowance;
    rep.pass = rep.ks <= rep.threshold;
    return rep;
}

CharacteristicCheck characteristic_function_check(const SampleSet& samples, const ModelSpec& spec, std::vector<double> u) {
    if (samples.dim != 1 || spec.dim != 1) throw ConfigError("characteristic function check is implemented for d = 1");
    if (!spec.kernel.x_independent) throw ConfigError("characteristic function check needs an x-independent kernel");
    const double b = spec.drift_at(samples.x0)[0];
    if (spec.has_drift() && std::abs(spec.drift_at({samples.x0[0] + 1.0, 0.0})[0] - b) > 0.0)
        throw ConfigError("characteristic function check needs a constant drift");
    CharacteristicCheck c;
    c.u = std::move(u);
    c.pass = true;
    const double n = static_cast<double>(samples.terminal.size());
    const double T = samples.horizon;
    for (double w : c.u) {
        double sc = 0, ss = 0, sc2 = 0, ss2 = 0;
        for (const auto& p : samples.terminal) {
            const double ph = w * (p[0] - samples.x0[0]);
            const double cs = std::cos(ph), sn = std::sin(ph);
            sc += cs;
            ss += sn;
            sc2 += cs * cs;
            ss2 += sn * sn;
        }
        const std::complex<double> emp(sc / n, ss / n);
        const double se_re = std::sqrt(std::max(0.0, sc2 / n - emp.real() * emp.real()) / n);
        const double se_im = std::sqrt(std::max(0.0, ss2 / n - emp.imag() * emp.imag()) / n);
        const std::complex<double> psi = eval_symbol(spec, samples.x0, {w, 0.0});
        const std::complex<double> ref = std::exp(-T * psi + std::complex<double>(0.0, w * b * T));
        auto score = [](double diff, double se) { return se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : INFINITY); };
        const double z = std::max(score(emp.real() - ref.real(), se_re), score(emp.imag() - ref.imag(), se_im));
        c.empirical.push_back(emp);
        c.expected.push_back(ref);
        c.z_score.push_back(z);
        if (!(z <= 3.0)) c.pass = false;
    }
    return c;
}

}  // namespace stablekernel
