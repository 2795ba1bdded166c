#include "stablekernel/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "stablekernel/errors.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/rho.hpp"
#include "stablekernel/spectral.hpp"
#include "stablekernel/symbol.hpp"

namespace stablekernel {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

struct ParametrixCache {
    std::vector<double> mesh;
    int n = 0;
    double extent = 0.0;
    MatrixXcd psi;    ///< psi^{z_m}(u_k) at (k, m)
    MatrixXcd phase;  ///< e^{-2 pi i k m / n}
    bool separable = false;
    std::vector<Eigen::VectorXcd> rows;  ///< profile symbols
    std::vector<Eigen::VectorXd> weights;  ///< profile weights at the lattice points
    MatrixXcd x_multiplier;  ///< non-separable: psi^{x_j}(u_k) e^{2 pi i k j / n} at (j, k)
    MatrixXd q0, F0;         ///< t = 0 values on the slice columns
    std::shared_ptr<MomentStack> q_moments, F_moments;
};

namespace {

constexpr double pi = std::numbers::pi;

double torus_distance(double a, double b, double extent) {
    double d = std::fmod(std::abs(a - b), extent);
    return std::min(d, extent - d);
}

/// (phi1, phi2)(mu) = (int_0^1 e^{-mu v} dv, int_0^1 v e^{-mu v} dv).
std::pair<cplx, cplx> phi12(cplx mu) {
    if (std::abs(mu) < 0.05) {
        cplx p1 = 0.0, p2 = 0.0, term = 1.0;
        double fact = 1.0;
        for (int m = 0; m < 10; ++m) {
            if (m) fact *= m;
            const cplx c = term / fact;
            p1 += c / (m + 1.0);
            p2 += c / (m + 2.0);
            term *= -mu;
        }
        return {p1, p2};
    }
    const cplx e = std::exp(-mu);
    return {(1.0 - e) / mu, (1.0 - (1.0 + mu) * e) / (mu * mu)};
}

/// Re (1/L) sum_k e^{i u_k x_j} a(u_k, x_j, z_m) A(k, m) e^{-i u_k z_m} for the selected columns,
/// with a = 1 (difference = false) or a = psi^{z} - psi^{x} (difference = true).
MatrixXd synthesize_kernel(const ParametrixCache& c, const MatrixXcd& A, const std::vector<int>& cols, bool difference) {
    const int n = c.n;
    const auto m = static_cast<Eigen::Index>(cols.size());
    MatrixXcd B(n, m);
    for (Eigen::Index j = 0; j < m; ++j) B.col(j) = A.col(j).cwiseProduct(c.phase.col(cols[static_cast<std::size_t>(j)]));
    const double scale = 1.0 / c.extent;
    if (!difference) {
        spectral::fft_columns(B, +1);
        return B.real() * scale;
    }
    MatrixXcd Z(n, m);
    for (Eigen::Index j = 0; j < m; ++j) Z.col(j) = B.col(j).cwiseProduct(c.psi.col(cols[static_cast<std::size_t>(j)]));
    spectral::fft_columns(Z, +1);
    MatrixXd out = Z.real();
    if (c.separable) {
        for (std::size_t p = 0; p < c.rows.size(); ++p) {
            MatrixXcd W = c.rows[p].asDiagonal() * B;
            spectral::fft_columns(W, +1);
            out -= c.weights[p].asDiagonal() * W.real();
        }
    } else {
        out -= (c.x_multiplier * B).real();
    }
    return out * scale;
}

MatrixXd slice_identity(const std::vector<int>& cols, int n, double cell) {
    MatrixXd m = MatrixXd::Zero(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m(cols[j], static_cast<Eigen::Index>(j)) = 1.0 / cell;
    return m;
}

DensityField make_field(const ParametrixRun& run, FieldKind kind, const TimeSeries& s) {
    DensityField f;
    f.grid = run.grid;
    f.kind = kind;
    f.base_points = run.y_slice;
    f.per_slice = true;
    f.values.assign(s.begin() + 1, s.end());
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& v : f.values) mn = std::min(mn, v.minCoeff());
    f.min_value = mn;
    return f;
}

double sup_positive(const TimeSeries& s) {
    double m = 0.0;
    for (std::size_t j = 1; j < s.size(); ++j) {
        const double v = s[j].cwiseAbs().maxCoeff();
        if (!(v <= m)) m = v;
    }
    return m;
}

std::vector<int> all_columns(int n) {
    std::vector<int> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = i;
    return c;
}

void require_full_slice(const ParametrixRun& run, const char* what) {
    if (!run.full_slice()) throw ConfigError(std::string(what) + " needs the y_slice to cover every lattice point");
}

}  // namespace

std::vector<double> mesh_with_origin(const SpaceTimeGrid& grid) {
    std::vector<double> m{0.0};
    m.insert(m.end(), grid.time_nodes.begin(), grid.time_nodes.end());
    return m;
}

TimeSeries MomentStack::apply(const TimeSeries& phi) const {
    if (phi.size() != mesh.size()) throw ConfigError("time series does not match the moment mesh");
    const Eigen::Index cols = phi.front().cols();
    MatrixXd stacked(static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(phi.size()), cols);
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (phi[k].rows() != n || phi[k].cols() != cols) throw ConfigError("time series blocks have inconsistent shape");
        stacked.middleRows(static_cast<Eigen::Index>(k) * n, n) = phi[k];
    }
    TimeSeries out(phi.size(), MatrixXd::Zero(n, cols));
    parallel_for(phi.size() - 1, [&](std::size_t jj) {
        const std::size_t j = jj + 1;
        out[j].noalias() = cell * blocks[j] * stacked.topRows(static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(j + 1));
    });
    return out;
}

std::size_t MomentStack::bytes() const {
    std::size_t b = 0;
    for (const auto& m : blocks) b += static_cast<std::size_t>(m.size()) * sizeof(double);
    return b;
}

std::vector<std::vector<std::vector<double>>> product_weights(const std::vector<double>& mesh) {
    const std::size_t J = mesh.size() - 1;
    std::vector<std::vector<std::vector<double>>> w(mesh.size(),
                                                    std::vector<std::vector<double>>(mesh.size(), std::vector<double>(mesh.size(), 0.0)));
    auto cell_of = [&](double t) {
        auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - mesh.begin())) - 1;
        return std::min(i, J - 1);
    };
    for (std::size_t j = 1; j <= J; ++j) {
        const double tj = mesh[j];
        std::vector<double> cuts;
        for (std::size_t k = 0; k <= j; ++k) {
            cuts.push_back(mesh[k]);
            cuts.push_back(tj - mesh[k]);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> br;
        for (double c : cuts)
            if (br.empty() || c - br.back() > 1e-14 * tj) br.push_back(std::clamp(c, 0.0, tj));
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const double s0 = br[i], s1 = br[i + 1];
            const double sm = 0.5 * (s0 + s1);
            const std::size_t kb = cell_of(sm), ka = cell_of(tj - sm);
            const double hb = mesh[kb + 1] - mesh[kb], ha = mesh[ka + 1] - mesh[ka];
            const double nodes[3] = {s0, sm, s1};
            const double sw[3] = {(s1 - s0) / 6.0, 4.0 * (s1 - s0) / 6.0, (s1 - s0) / 6.0};
            for (int q = 0; q < 3; ++q) {
                const double s = nodes[q], sig = tj - s;
                const double bl = (mesh[kb + 1] - s) / hb, br_ = (s - mesh[kb]) / hb;
                const double al = (mesh[ka + 1] - sig) / ha, ar = (sig - mesh[ka]) / ha;
                w[j][ka][kb] += sw[q] * al * bl;
                w[j][ka][kb + 1] += sw[q] * al * br_;
                w[j][ka + 1][kb] += sw[q] * ar * bl;
                w[j][ka + 1][kb + 1] += sw[q] * ar * br_;
            }
        }
    }
    return w;
}

MomentStack mesh_moments(const TimeSeries& kernel, const std::vector<double>& mesh, double cell) {
    if (kernel.size() != mesh.size()) throw ConfigError("kernel series does not match the mesh");
    const auto n = kernel.front().rows();
    MomentStack st;
    st.mesh = mesh;
    st.n = static_cast<int>(n);
    st.cell = cell;
    st.blocks.resize(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j) st.blocks[j] = MatrixXd::Zero(n, n * static_cast<Eigen::Index>(j + 1));
    accumulate_mesh_moments(st, kernel);
    return st;
}

void accumulate_mesh_moments(MomentStack& st, const TimeSeries& kernel) {
    const auto& mesh = st.mesh;
    const int n = st.n;
    if (kernel.size() != mesh.size()) throw ConfigError("kernel series does not match the mesh");
    for (const auto& k : kernel)
        if (k.rows() != n || k.cols() != n) throw ConfigError("mesh kernel needs square N x N blocks");
    const auto w = product_weights(mesh);
    parallel_for(mesh.size(), [&](std::size_t j) {
        MatrixXd& b = st.blocks[j];
        for (std::size_t m = 0; m <= j; ++m)
            for (std::size_t k = 0; k <= j; ++k)
                if (w[j][m][k] != 0.0) b.middleCols(static_cast<Eigen::Index>(k) * n, n) += w[j][m][k] * kernel[m];
    });
}

ConvolutionResult space_time_convolve(const TimeSeries& phi1, const TimeSeries& phi2, const std::vector<double>& mesh,
                                      double cell, bool estimate_error) {
    const MomentStack st = mesh_moments(phi1, mesh, cell);
    ConvolutionResult r;
    r.values = st.apply(phi2);
    if (estimate_error && mesh.size() >= 3) {
        TimeSeries coarse = phi2;
        for (std::size_t k = 1; k + 1 < mesh.size(); k += 2) {
            const double a = (mesh[k + 1] - mesh[k]) / (mesh[k + 1] - mesh[k - 1]);
            coarse[k] = a * phi2[k - 1] + (1.0 - a) * phi2[k + 1];
        }
        const TimeSeries rc = st.apply(coarse);
        for (std::size_t j = 0; j < rc.size(); ++j)
            r.error_estimate = std::max(r.error_estimate, (rc[j] - r.values[j]).cwiseAbs().maxCoeff());
    }
    return r;
}

TimeSeries ParametrixRun::series(const DensityField& field) const {
    TimeSeries s;
    const auto cols = static_cast<Eigen::Index>(y_index.size());
    if (field.kind == FieldKind::q || field.kind == FieldKind::p)
        s.push_back(slice_identity(y_index, grid.n_x, grid.dx()));
    else if (field.kind == FieldKind::F || field.kind == FieldKind::Phi)
        s.push_back(cache->F0);
    else
        s.push_back(MatrixXd::Zero(grid.n_x, cols));
    s.insert(s.end(), field.values.begin(), field.values.end());
    return s;
}

TimeSeries ParametrixRun::zero_origin_series(const DensityField& field) const {
    TimeSeries s{MatrixXd::Zero(grid.n_x, static_cast<Eigen::Index>(y_index.size()))};
    s.insert(s.end(), field.values.begin(), field.values.end());
    return s;
}

double ParametrixRun::nyquist_rate() const {
    return cache->psi.row(grid.n_x / 2).real().minCoeff();
}

std::vector<double> ParametrixRun::resolved_times() const {
    const double rate = nyquist_rate();
    std::vector<double> t;
    for (double v : grid.time_nodes)
        if (v * rate >= 12.0) t.push_back(v);
    return t;
}

ParametrixRun make_parametrix_run(const ModelSpec& spec, const SpaceTimeGrid& grid, std::vector<Point> y_slice,
                                  const ParametrixOptions& opt) {
    check_spec_fields(spec);
    if (spec.dim != 1 || grid.dim != 1) throw ConfigError("the parametrix pipeline is implemented for d = 1");
    if (opt.n_max < 1) throw ConfigError("n_max must be at least 1");
    if (!(opt.tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
    ParametrixRun run;
    run.spec = spec;
    run.grid = grid;
    run.n_max = opt.n_max;
    run.tail_tol = opt.tail_tol;
    const int n = grid.n_x;
    if (y_slice.empty())
        for (int i = 0; i < n; ++i) y_slice.push_back(grid.point(static_cast<std::size_t>(i)));
    for (const Point& y : y_slice) {
        const int i = nearest_index(grid, y[0]);
        if (std::abs(grid.coord(i) - y[0]) > 1e-9 * grid.dx()) throw ConfigError("y_slice entries must be lattice points");
        run.y_index.push_back(i);
    }
    run.y_slice = std::move(y_slice);

    auto c = std::make_shared<ParametrixCache>();
    c->mesh = mesh_with_origin(grid);
    c->n = n;
    c->extent = grid.extent;
    const FrequencyLattice lat = grid.frequencies();
    c->psi.resize(n, n);
    const ProfileSymbols prof = profile_symbols(spec, lat);
    if (prof.separable) {
        c->separable = true;
        c->psi.setZero();
        for (std::size_t p = 0; p < prof.rows.size(); ++p) {
            Eigen::VectorXcd row(n);
            for (int k = 0; k < n; ++k) row[k] = prof.rows[p][static_cast<std::size_t>(k)];
            Eigen::VectorXd w(n);
            for (int j = 0; j < n; ++j) w[j] = prof.weights[p](grid.point(static_cast<std::size_t>(j)));
            c->psi += row * w.transpose().cast<cplx>();
            c->rows.push_back(std::move(row));
            c->weights.push_back(std::move(w));
        }
    } else {
        for (int m = 0; m < n; ++m) {
            const FrozenSymbol s = tabulate_symbol(spec, grid.point(static_cast<std::size_t>(m)), lat);
            for (int k = 0; k < n; ++k) c->psi(k, m) = s.values[static_cast<std::size_t>(k)];
        }
        c->x_multiplier.resize(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                c->x_multiplier(j, k) = c->psi(k, j) * std::polar(1.0, 2.0 * pi * static_cast<double>(k) * j / n);
    }
    if (c->psi.real().minCoeff() < -1e-8 * (1.0 + std::pow(pi / grid.dx(), spec.alpha)))
        throw ModelViolation("symbol has negative real part on the lattice");
    c->phase.resize(n, n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
            c->phase(k, m) = std::polar(1.0, -2.0 * pi * static_cast<double>((static_cast<long>(k) * m) % n) / n);
    c->q0 = slice_identity(run.y_index, n, grid.dx());
    if (spec.kernel.x_independent)
        c->F0 = MatrixXd::Zero(n, static_cast<Eigen::Index>(run.y_index.size()));
    else
        c->F0 = synthesize_kernel(*c, MatrixXcd::Ones(n, static_cast<Eigen::Index>(run.y_index.size())), run.y_index, true);
    run.cache = std::move(c);
    return run;
}

DensityField build_q(ParametrixRun& run) {
    const auto& c = *run.cache;
    TimeSeries s{c.q0};
    for (std::size_t j = 1; j < c.mesh.size(); ++j) {
        MatrixXcd A(c.n, static_cast<Eigen::Index>(run.y_index.size()));
        for (std::size_t m = 0; m < run.y_index.size(); ++m)
            A.col(static_cast<Eigen::Index>(m)) = (-c.mesh[j] * c.psi.col(run.y_index[m])).array().exp();
        s.push_back(synthesize_kernel(c, A, run.y_index, false));
    }
    run.q = make_field(run, FieldKind::q, s);
    std::vector<double> deficit;
    for (const auto& v : run.q.values) deficit.push_back((1.0 - v.colwise().sum().array() * run.grid.dx()).abs().maxCoeff());
    run.q.mass_deficit = deficit;
    return run.q;
}

DensityField build_q(const ModelSpec& spec, const SpaceTimeGrid& grid, const std::vector<Point>& y_slice) {
    ParametrixRun run = make_parametrix_run(spec, grid, y_slice);
    return build_q(run);
}

DensityField build_F(ParametrixRun& run) {
    const auto& c = *run.cache;
    const auto cols = static_cast<Eigen::Index>(run.y_index.size());
    TimeSeries s{c.F0};
    for (std::size_t j = 1; j < c.mesh.size(); ++j) {
        if (run.spec.kernel.x_independent) {
            s.push_back(MatrixXd::Zero(c.n, cols));
            continue;
        }
        MatrixXcd A(c.n, cols);
        for (std::size_t m = 0; m < run.y_index.size(); ++m)
            A.col(static_cast<Eigen::Index>(m)) = (-c.mesh[j] * c.psi.col(run.y_index[m])).array().exp();
        s.push_back(synthesize_kernel(c, A, run.y_index, true));
    }
    run.F = make_field(run, FieldKind::F, s);
    return run.F;
}

MomentStack spectral_moments(const ParametrixRun& run, SpectralKernel which) {
    const auto& c = *run.cache;
    const int n = c.n;
    const auto cols = all_columns(n);
    const std::size_t J = c.mesh.size() - 1;
    MomentStack st;
    st.mesh = c.mesh;
    st.n = n;
    st.cell = run.grid.dx();
    st.blocks.resize(J + 1);
    st.blocks[0] = MatrixXd::Zero(n, n);
    const bool diff = which == SpectralKernel::F;

    // Per step i: e^{-h_i psi}, h_i (phi1 - phi2)(h_i psi) and h_i phi2(h_i psi).
    std::vector<MatrixXcd> decay(J + 1), rise(J + 1), fall(J + 1);
    for (std::size_t i = 1; i <= J; ++i) {
        const double h = c.mesh[i] - c.mesh[i - 1];
        decay[i].resize(n, n);
        rise[i].resize(n, n);
        fall[i].resize(n, n);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) {
                const cplx mu = h * c.psi(k, m);
                const auto [p1, p2] = phi12(mu);
                decay[i](k, m) = std::exp(-mu);
                rise[i](k, m) = h * (p1 - p2);
                fall[i](k, m) = h * p2;
            }
    }
    for (std::size_t j = 1; j <= J; ++j) {
        MatrixXd b(n, static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(j + 1));
        // e^{-(t_j - t_k) psi} built downward from k = j.
        MatrixXcd upper = MatrixXcd::Ones(n, n);
        for (std::size_t k = j + 1; k-- > 0;) {
            MatrixXcd at_k = k == j ? upper : MatrixXcd(upper.cwiseProduct(decay[k + 1]));
            MatrixXcd A = MatrixXcd::Zero(n, n);
            if (k >= 1) A += at_k.cwiseProduct(rise[k]);
            if (k < j) A += upper.cwiseProduct(fall[k + 1]);
            b.middleCols(static_cast<Eigen::Index>(k) * n, n) = synthesize_kernel(c, A, cols, diff);
            upper = std::move(at_k);
        }
        st.blocks[j] = std::move(b);
    }
    return st;
}

DensityField build_phi(ParametrixRun& run) {
    if (run.F.values.empty()) build_F(run);
    const TimeSeries F = run.series(run.F);
    run.terms.clear();
    run.convergence_log.clear();
    const double f_norm = sup_positive(F);
    TimeSeries phi = F;
    run.terms.push_back(make_field(run, FieldKind::F, F));
    run.convergence_log.push_back({1, f_norm, 0.0, std::numeric_limits<double>::infinity()});
    if (run.spec.kernel.x_independent || f_norm == 0.0) {
        run.convergence_log.back().tail_estimate = 0.0;
        run.phi = make_field(run, FieldKind::Phi, phi);
        return run.phi;
    }
    auto& c = *run.cache;
    if (!c.F_moments) c.F_moments = std::make_shared<MomentStack>(spectral_moments(run, SpectralKernel::F));
    TimeSeries term = F;
    bool converged = false;
    for (int n = 2; n <= run.n_max; ++n) {
        term = c.F_moments->apply(term);
        const double norm = sup_positive(term);
        const double prev = run.convergence_log.back().sup_norm;
        const double ratio = prev > 0.0 ? norm / prev : 0.0;
        const double tail = ratio < 1.0 ? norm * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += term[j];
        run.terms.push_back(make_field(run, FieldKind::F, term));
        run.convergence_log.push_back({n, norm, ratio, tail});
        if (tail <= run.tail_tol * f_norm) {
            converged = true;
            break;
        }
    }
    run.phi = make_field(run, FieldKind::Phi, phi);
    c.F_moments.reset();
    if (!converged) {
        std::ostringstream os;
        os << "parametrix series did not reach tail_tol " << run.tail_tol << " within " << run.n_max
           << " terms; log " << convergence_log_json(run.convergence_log);
        throw ConvergenceError(os.str());
    }
    return run.phi;
}

DensityField build_p(ParametrixRun& run) {
    if (run.q.values.empty()) build_q(run);
    if (run.phi.values.empty()) build_phi(run);
    auto& c = *run.cache;
    const TimeSeries q = run.series(run.q);
    TimeSeries p = q;
    TimeSeries qphi(q.size(), MatrixXd::Zero(c.n, static_cast<Eigen::Index>(run.y_index.size())));
    if (!run.spec.kernel.x_independent) {
        if (!c.q_moments) c.q_moments = std::make_shared<MomentStack>(spectral_moments(run, SpectralKernel::q));
        qphi = c.q_moments->apply(run.series(run.phi));
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += qphi[j];
    }
    run.q_phi = make_field(run, FieldKind::p, qphi);
    run.p = make_field(run, FieldKind::p, p);
    if (run.full_slice()) {
        for (const auto& v : run.p.values)
            run.p.mass_deficit.push_back((1.0 - v.rowwise().sum().array() * run.grid.dx()).abs().maxCoeff());
    }
    return run.p;
}

ParametrixRun run_parametrix(const ModelSpec& spec, const SpaceTimeGrid& grid, const ParametrixOptions& opt) {
    ParametrixRun run = make_parametrix_run(spec, grid, {}, opt);
    build_q(run);
    build_F(run);
    build_phi(run);
    build_p(run);
    if (!opt.keep_moments) {
        run.cache->q_moments.reset();
        run.cache->F_moments.reset();
    }
    return run;
}

double chapman_kolmogorov_residual(const DensityField& p, double alpha, double s, double t) {
    const SpaceTimeGrid& g = p.grid;
    if (!(s > 0.0) || !(t > 0.0)) throw ConfigError("Chapman-Kolmogorov times must be positive");
    if (p.values.empty() || p.values.front().cols() != g.n_x)
        throw ConfigError("Chapman-Kolmogorov residual needs p on every lattice point as y");
    const auto is = g.time_index(s), it = g.time_index(t), ist = g.time_index(s + t);
    const MatrixXd conv = g.dx() * p.values[is] * p.values[it];
    const MatrixXd& ref = p.values[ist];
    double worst = 0.0;
    for (int x = 0; x < g.n_x; ++x) {
        if (!g.interior(static_cast<std::size_t>(x))) continue;
        for (int y = 0; y < g.n_x; ++y) {
            if (!g.interior(static_cast<std::size_t>(y))) continue;
            const double d = std::abs(conv(x, y) - ref(x, y));
            if (!(d <= worst)) worst = d;
        }
    }
    return worst * std::pow(s + t, 1.0 / alpha);
}

double chapman_kolmogorov_residual(const ParametrixRun& run, double s, double t) {
    require_full_slice(run, "Chapman-Kolmogorov residual");
    return chapman_kolmogorov_residual(run.p, run.spec.alpha, s, t);
}

BoundReport check_heat_kernel_bounds(const DensityField& field, const ModelSpec& spec, const std::vector<double>& times,
                                     const std::string& id) {
    const SpaceTimeGrid& g = field.grid;
    const double a = spec.alpha;
    if (field.base_points.size() != static_cast<std::size_t>(field.values.front().cols()))
        throw ConfigError("bound check needs one base point per column");
    if (times.empty()) throw ConfigError("no resolved time nodes for the bound check");
    BoundReport rep;
    rep.id = id;
    double sup = 0.0, inf = std::numeric_limits<double>::infinity(), near = inf, gsup = 0.0;
    for (double t : times) {
        const auto ti = g.time_index(t);
        const MatrixXd& v = field.values[ti];
        const MatrixXd grad = a > 1.0 ? spectral::derivative_columns(v, g.extent, 1) : MatrixXd();
        const double scale = std::pow(t, 1.0 / a);
        for (Eigen::Index col = 0; col < v.cols(); ++col) {
            const double y = field.base_points[static_cast<std::size_t>(col)][0];
            if (std::abs(y) > 0.375 * g.extent + 1e-12 * g.extent) continue;
            for (int x = 0; x < g.n_x; ++x) {
                if (!g.interior(static_cast<std::size_t>(x))) continue;
                const double d = torus_distance(g.coord(x), y, g.extent);
                const double w = d > 0.0 ? std::min(t * std::pow(d, -1.0 - a), 1.0 / scale) : 1.0 / scale;
                const double r = v(x, col) / w;
                sup = std::max(sup, r);
                inf = std::min(inf, r);
                if (d <= scale) near = std::min(near, r);
                if (!std::isfinite(r)) sup = r;
                if (a > 1.0) {
                    const double gw = eval_rho({a, 0.0}, t, d, a, 1) / scale;
                    gsup = std::max(gsup, std::abs(grad(x, col)) / gw);
                }
            }
        }
    }
    rep.constants = {{"sup_ratio", sup}, {"inf_ratio", inf}};
    if (std::isfinite(near)) rep.constants.push_back({"near_diagonal_inf", near});
    if (a > 1.0) rep.constants.push_back({"grad_sup_ratio", gsup});
    finalize(rep, {"sup_ratio", "inf_ratio"});
    return rep;
}

BoundReport check_heat_kernel_bounds_refined(const ModelSpec& spec, const SpaceTimeGrid& grid,
                                             const ParametrixOptions& opt, double threshold) {
    ParametrixOptions o = opt;
    o.keep_moments = false;
    std::vector<double> times;
    BoundReport coarse, fine;
    {
        const ParametrixRun run = run_parametrix(spec, grid, o);
        times = run.resolved_times();
        coarse = check_heat_kernel_bounds(run.p, spec, times);
    }
    {
        const ParametrixRun run = run_parametrix(spec, grid.refined(), o);
        fine = check_heat_kernel_bounds(run.p, spec, times);
    }
    return merge_refinement(coarse, fine, {"sup_ratio", "inf_ratio"}, threshold);
}

namespace {

BoundReport envelope(const DensityField& field, const ParametrixRun& run, RhoWeight w1, RhoWeight w2,
                     const std::string& id, const std::vector<double>& times) {
    const SpaceTimeGrid& g = run.grid;
    const double a = run.spec.alpha;
    BoundReport rep;
    rep.id = id;
    double sup = 0.0;
    for (double t : times) {
        const MatrixXd& v = field.values[g.time_index(t)];
        for (Eigen::Index col = 0; col < v.cols(); ++col) {
            const double y = run.y_slice[static_cast<std::size_t>(col)][0];
            if (!g.interior(static_cast<std::size_t>(run.y_index[static_cast<std::size_t>(col)]))) continue;
            for (int x = 0; x < g.n_x; ++x) {
                if (!g.interior(static_cast<std::size_t>(x))) continue;
                const double d = torus_distance(g.coord(x), y, g.extent);
                const double env = eval_rho(w1, t, d, a, 1) + eval_rho(w2, t, d, a, 1);
                const double r = std::abs(v(x, col)) / env;
                if (!(r <= sup)) sup = r;
            }
        }
    }
    rep.constants = {{"sup_ratio", sup}};
    finalize(rep);
    return rep;
}

}  // namespace

BoundReport check_phi_envelope(const ParametrixRun& run, const std::vector<double>& times) {
    const double th = run.spec.theta_hat();
    return envelope(run.phi, run, {th, 0.0}, {0.0, th}, "phi-envelope", times.empty() ? run.resolved_times() : times);
}

BoundReport check_q_phi_envelope(const ParametrixRun& run, const std::vector<double>& times) {
    const double th = run.spec.theta_hat();
    const double a = run.spec.alpha;
    return envelope(run.q_phi, run, {a + th, 0.0}, {a, th}, "q-phi-envelope",
                    times.empty() ? run.resolved_times() : times);
}

std::vector<BoundReport> check_envelopes_refined(const ModelSpec& spec, const SpaceTimeGrid& grid,
                                                 const ParametrixOptions& opt, double threshold) {
    ParametrixOptions o = opt;
    o.keep_moments = false;
    BoundReport pc, qc, pf, qf;
    std::vector<double> times;
    {
        const ParametrixRun run = run_parametrix(spec, grid, o);
        times = run.resolved_times();
        pc = check_phi_envelope(run, times);
        qc = check_q_phi_envelope(run, times);
    }
    {
        const ParametrixRun run = run_parametrix(spec, grid.refined(), o);
        pf = check_phi_envelope(run, times);
        qf = check_q_phi_envelope(run, times);
    }
    return {merge_refinement(pc, pf, {}, threshold), merge_refinement(qc, qf, {}, threshold)};
}

Eigen::MatrixXd lattice_generator(const ModelSpec& spec, const SpaceTimeGrid& grid) {
    if (grid.dim != 1) throw ConfigError("lattice generator is implemented for d = 1");
    const int n = grid.n_x;
    MatrixXcd G(n, n);
    for (int j = 0; j < n; ++j) {
        const FrozenSymbol s = tabulate_symbol(spec, grid.point(static_cast<std::size_t>(j)), grid.frequencies());
        for (int k = 0; k < n; ++k) G(k, j) = -s.values[static_cast<std::size_t>(k)];
    }
    spectral::fft_columns(G, +1);
    MatrixXd A(n, n);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) A(j, m) = G(((j - m) % n + n) % n, j).real() / n;
    return A;
}

std::string convergence_log_json(const std::vector<ConvergenceEntry>& log) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& e : log) {
        nlohmann::ordered_json o;
        o["n"] = e.n;
        o["sup_norm"] = e.sup_norm;
        o["ratio"] = e.ratio;
        o["tail_estimate"] = std::isfinite(e.tail_estimate) ? nlohmann::ordered_json(e.tail_estimate) : nlohmann::ordered_json(nullptr);
        a.push_back(o);
    }
    return a.dump();
}

SpaceTimeGrid default_parametrix_grid(const ModelSpec& spec, int n_x, int n_t, double horizon) {
    const double g = std::max(2.0, spec.alpha / spec.theta_hat());
    auto mesh = graded_mesh(horizon, n_t, g, {0.25 * horizon, 0.5 * horizon, 0.75 * horizon});
    mesh.erase(mesh.begin());
    return make_grid(1, 14.0 * pi, n_x, mesh, g);
}

}  // namespace stablekernel
