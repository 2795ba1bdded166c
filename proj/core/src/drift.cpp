#include "stablekernel/drift.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stablekernel/errors.hpp"
#include "stablekernel/spectral.hpp"

namespace stablekernel {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double sup_positive(const TimeSeries& s) {
    double m = 0.0;
    for (std::size_t j = 1; j < s.size(); ++j) {
        const double v = s[j].cwiseAbs().maxCoeff();
        if (!(v <= m)) m = v;
    }
    return m;
}

VectorXd drift_values(const ParametrixRun& run) {
    VectorXd b(run.grid.n_x);
    for (int i = 0; i < run.grid.n_x; ++i) b[i] = run.spec.drift_at({run.grid.coord(i), 0.0})[0];
    return b;
}

/// b(z) d_z f(s, z, y) for every node.
TimeSeries drift_gradient(const TimeSeries& f, const VectorXd& b, double extent) {
    TimeSeries g;
    g.reserve(f.size());
    for (const auto& m : f) g.push_back(b.asDiagonal() * spectral::derivative_columns(m, extent, 1));
    return g;
}

DensityField as_field(const ParametrixRun& run, const TimeSeries& s) {
    DensityField f = run.p;
    f.kind = FieldKind::l;
    f.values.assign(s.begin() + 1, s.end());
    f.mass_deficit.clear();
    f.alias_bound.clear();
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& v : f.values) mn = std::min(mn, v.minCoeff());
    f.min_value = mn;
    return f;
}

void fit_gamma(DriftSeriesState& st) {
    const double a = st.run->spec.alpha;
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : st.gamma_log)
        if (e.n >= 1 && e.sup_norm > 0.0)
            pts.emplace_back(e.n, std::log(e.sup_norm) + std::lgamma(1.0 + e.n * (1.0 - 1.0 / a)));
    st.fit_log_c = 0.0;
    st.fit_log_ratio = 0.0;
    st.gamma_fit_residual = 0.0;
    if (pts.empty()) return;
    if (pts.size() == 1) {
        st.fit_log_c = pts[0].second - pts[0].first;
        st.fit_log_ratio = 1.0;
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(pts.size());
        st.fit_log_ratio = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        st.fit_log_c = (sy - st.fit_log_ratio * sx) / k;
    }
    for (auto& e : st.gamma_log) {
        if (e.n < 1) continue;
        const double logp = st.fit_log_c + e.n * st.fit_log_ratio - std::lgamma(1.0 + e.n * (1.0 - 1.0 / a));
        e.predicted = std::exp(logp);
        e.log_residual = e.sup_norm > 0.0 ? std::log(e.sup_norm) - logp : 0.0;
        st.gamma_fit_residual = std::max(st.gamma_fit_residual, std::abs(e.log_residual));
    }
}

}  // namespace

DriftSeriesState make_drift_state(std::shared_ptr<const ParametrixRun> run) {
    if (!run) throw ConfigError("drift series needs a parametrix run");
    if (!(run->spec.alpha > 1.0)) throw ConfigError("the drift term is defined for alpha > 1 only");
    if (run->p.values.empty()) throw ConfigError("drift series needs p; run build_p first");
    if (!run->full_slice()) throw ConfigError("drift series needs the y_slice to cover every lattice point");
    DriftSeriesState st;
    st.gradient = run->p;
    st.gradient.kind = FieldKind::gradient;
    st.gradient.axis = 0;
    st.gradient.mass_deficit.clear();
    for (auto& v : st.gradient.values) v = spectral::derivative_columns(v, run->grid.extent, 1);
    st.terms.push_back(run->p);
    st.run = std::move(run);
    return st;
}

DensityField build_drift_series(DriftSeriesState& st, int n_max, double tail_tol) {
    if (n_max < 1) throw ConfigError("n_max must be at least 1");
    if (!(tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
    const ParametrixRun& run = *st.run;
    st.n_max = n_max;
    st.tail_tol = tail_tol;
    st.terms.assign(1, run.p);
    st.gamma_log.clear();

    const double extent = run.grid.extent;
    const VectorXd b = drift_values(run);
    TimeSeries l = run.series(run.p);
    const double p_norm = sup_positive(l);
    TimeSeries grad = drift_gradient(l, VectorXd::Ones(run.grid.n_x), extent);
    st.gamma_log.push_back({0, p_norm, sup_positive(grad), 0.0, 0.0});

    bool converged = b.cwiseAbs().maxCoeff() == 0.0;
    if (!converged) {
        MomentStack kernel = spectral_moments(run, SpectralKernel::q);
        if (!run.spec.kernel.x_independent) accumulate_mesh_moments(kernel, run.zero_origin_series(run.q_phi));
        for (int n = 1; n <= n_max; ++n) {
            for (auto& g : grad) g = b.asDiagonal() * g;
            const TimeSeries term = kernel.apply(grad);
            grad = drift_gradient(term, VectorXd::Ones(run.grid.n_x), extent);
            for (std::size_t j = 0; j < l.size(); ++j) l[j] += term[j];
            st.terms.push_back(as_field(run, term));
            const double norm = sup_positive(term);
            st.gamma_log.push_back({n, norm, sup_positive(grad), 0.0, 0.0});
            if (norm <= tail_tol * p_norm) {
                converged = true;
                break;
            }
        }
    }
    fit_gamma(st);
    st.l = as_field(run, l);
    for (const auto& v : st.l.values)
        st.l.mass_deficit.push_back((1.0 - v.rowwise().sum().array() * run.grid.dx()).abs().maxCoeff());
    if (!converged) {
        std::ostringstream os;
        os << "drift series did not reach tail_tol " << tail_tol << " within " << n_max << " terms; gamma log "
           << gamma_log_json(st.gamma_log);
        throw ConvergenceError(os.str());
    }
    return st.l;
}

double duhamel_residual(const DriftSeriesState& st) {
    if (st.l.values.empty()) throw ConfigError("duhamel residual needs l; run build_drift_series first");
    const ParametrixRun& run = *st.run;
    const SpaceTimeGrid& g = run.grid;
    const TimeSeries p = run.series(run.p);
    TimeSeries l = run.series(st.l);
    l[0] = p[0];
    const VectorXd b = drift_values(run);
    TimeSeries rhs(p.size(), MatrixXd::Zero(g.n_x, g.n_x));
    if (b.cwiseAbs().maxCoeff() > 0.0) {
        const MomentStack kernel = mesh_moments(l, mesh_with_origin(g), g.dx());
        rhs = kernel.apply(drift_gradient(p, b, g.extent));
    }
    double worst = 0.0;
    for (std::size_t j = 1; j < p.size(); ++j) {
        const MatrixXd r = l[j] - p[j] - rhs[j];
        double m = 0.0;
        for (int x = 0; x < g.n_x; ++x) {
            if (!g.interior(static_cast<std::size_t>(x))) continue;
            for (int y = 0; y < g.n_x; ++y) {
                if (!g.interior(static_cast<std::size_t>(y))) continue;
                const double d = std::abs(r(x, y));
                if (!(d <= m)) m = d;
            }
        }
        const double v = m * std::pow(g.time_nodes[j - 1], 1.0 / run.spec.alpha);
        if (!(v <= worst)) worst = v;
    }
    return worst;
}

BoundReport check_l_bounds(const DriftSeriesState& st) {
    if (st.l.values.empty()) throw ConfigError("bound check needs l; run build_drift_series first");
    BoundReport rep = check_heat_kernel_bounds(st.l, st.run->spec, st.run->resolved_times(), "drift-kernel-two-sided");
    double mass = 0.0;
    for (double m : st.l.mass_deficit) mass = std::max(mass, m);
    rep.constants.push_back({"mass_deficit", mass});
    return rep;
}

std::string gamma_log_json(const std::vector<GammaLogEntry>& log) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : log)
        arr.push_back({{"n", e.n},
                       {"sup_norm", e.sup_norm},
                       {"gradient_norm", e.gradient_norm},
                       {"predicted", e.predicted},
                       {"log_residual", e.log_residual}});
    return arr.dump();
}

}  // namespace stablekernel
