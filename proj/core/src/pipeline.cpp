#include "stablekernel/pipeline.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stablekernel/acceptance.hpp"
#include "stablekernel/csv.hpp"
#include "stablekernel/drift.hpp"
#include "stablekernel/montecarlo.hpp"
#include "stablekernel/nonlocal.hpp"
#include "stablekernel/parallel.hpp"
#include "stablekernel/parametrix.hpp"
#include "stablekernel/presets.hpp"
#include "stablekernel/rho.hpp"
#include "stablekernel/symbol.hpp"

#ifndef STABLEKERNEL_VERSION
#define STABLEKERNEL_VERSION "0.0.0"
#endif

namespace stablekernel {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const BoundReport& r) {
    json constants = json::object(), witness = json::object();
    for (const auto& c : r.constants) constants[c.name] = number(c.value);
    for (const auto& w : r.witness) witness[w.name] = number(w.value);
    return json{{"id", r.id},
                {"status", to_string(r.status)},
                {"constants", constants},
                {"stability_delta", number(r.stability_delta)},
                {"stability_threshold", r.stability_threshold},
                {"witness", witness},
                {"note", r.note}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    std::ostringstream nl;
    nl << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
    return json{{"stablekernel", STABLEKERNEL_VERSION}, {"eigen", eigen.str()}, {"fftw", std::string(fftw_version)}, {"nlohmann_json", nl.str()}};
}

json skeleton(const RunConfig& cfg, bool timestamp) {
    json j;
    j["tool"] = "stablekernel";
    if (timestamp) j["timestamp"] = utc_timestamp();
    j["pipeline"] = cfg.pipeline;
    j["config_hash"] = config_hash(cfg);
    j["config"] = json::parse(to_json(cfg));
    j["versions"] = versions();
    j["status"] = "pass";
    for (const char* k : {"checks", "reports", "validation", "convergence_log", "gamma_log", "agreement", "characteristic_function",
                          "exit_estimates", "acceptance", "files"})
        j[k] = json::array();
    return j;
}

/// Collects checks, reports and written files of one run.
class Session {
public:
    Session(const RunConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt), report_(skeleton(cfg, opt.timestamp)) {
        if (opt.write_files) {
            std::error_code ec;
            fs::create_directories(cfg.output, ec);
            if (ec) throw IoError("cannot create output directory '" + cfg.output + "': " + ec.message());
        }
    }

    void check(const std::string& name, double value, double limit, bool pass) {
        report_["checks"].push_back({{"name", name}, {"value", number(value)}, {"limit", number(limit)}, {"pass", pass}});
        if (!pass) failed_ = true;
    }
    void check_max(const std::string& name, double value, double limit) { check(name, value, limit, value <= limit); }

    void add(const BoundReport& r) {
        report_["reports"].push_back(to_json(r));
        if (r.status == CheckStatus::fail) failed_ = true;
    }

    json& section(const char* key) { return report_[key]; }

    bool writing() const { return opt_.write_files; }
    std::string path(const std::string& name) {
        report_["files"].push_back(name);
        files_.push_back(name);
        return (fs::path(cfg_.output) / name).string();
    }

    void write_text(const std::string& name, const std::string& text) {
        if (!writing()) return;
        std::ofstream out(path(name));
        if (!out) throw IoError("cannot write " + name);
        out << text << '\n';
    }

    RunOutcome finish() {
        report_["status"] = failed_ ? "fail" : "pass";
        RunOutcome o;
        o.code = failed_ ? ExitCode::check_failed : ExitCode::pass;
        o.report_json = report_.dump(2);
        if (opt_.write_files) {
            report_["files"].push_back("report.json");
            files_.push_back("report.json");
            o.report_json = report_.dump(2);
            std::ofstream out(fs::path(cfg_.output) / "report.json");
            if (!out) throw IoError("cannot write report.json");
            out << o.report_json << '\n';
        }
        o.files = files_;
        return o;
    }

    const RunConfig& cfg_;

private:
    const RunOptions& opt_;
    json report_;
    std::vector<std::string> files_;
    bool failed_ = false;
};

ModelSpec model_of(const RunConfig& cfg) { return make_preset(cfg.model.preset, cfg.model.params); }

int next_pow2(double v) {
    int n = 16;
    while (n < v) n *= 2;
    return n;
}

SpaceTimeGrid density_grid(const RunConfig& cfg, const ModelSpec& spec) {
    const double T = cfg.grid.horizon;
    std::vector<double> times = cfg.grid.times;
    if (times.empty()) times = {0.25 * T, 0.5 * T, T};
    const double a = spec.alpha;
    double L = cfg.grid.extent;
    if (L <= 0.0) L = std::max(64.0, std::ceil(40.0 * std::pow(times.back(), 1.0 / a)));
    int n = cfg.grid.n_x;
    if (n <= 0) n = next_pow2(L / (std::pow(times.front(), 1.0 / a) / 8.0));
    return make_grid(spec.dim, L, n, times);
}

SpaceTimeGrid parametrix_grid(const RunConfig& cfg, const ModelSpec& spec, double horizon) {
    SpaceTimeGrid g = default_parametrix_grid(spec, cfg.grid.n_x > 0 ? cfg.grid.n_x : 256, cfg.grid.n_t, horizon);
    if (cfg.grid.extent > 0.0) g = make_grid(1, cfg.grid.extent, g.n_x, g.time_nodes, g.grading);
    return g;
}

ParametrixOptions parametrix_options(const RunConfig& cfg) {
    ParametrixOptions o;
    o.n_max = cfg.tolerances.parametrix_n_max;
    o.tail_tol = cfg.tolerances.parametrix_tail_tol;
    return o;
}

bool has_node(const SpaceTimeGrid& g, double t) {
    try {
        g.time_index(t);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

void validation_section(Session& s, const ModelSpec& spec) {
    const ValidationReport v = validate_model(spec);
    for (const auto& c : v.checks) {
        json w = json::object();
        for (const auto& n : c.witness) w[n.name] = number(n.value);
        s.section("validation").push_back({{"assumption", c.assumption},
                                           {"status", to_string(c.status)},
                                           {"worst_violation", number(c.worst_violation)},
                                           {"witness", w},
                                           {"note", c.note}});
    }
    s.check("model-validation", v.passed() ? 1.0 : 0.0, 1.0, v.passed());
}

void density_section(Session& s, const ModelSpec& spec) {
    const RunConfig& cfg = s.cfg_;
    const SpaceTimeGrid g = density_grid(cfg, spec);
    const Point y{cfg.density.y, 0.0};
    SymbolOptions so;
    so.rel_budget = cfg.tolerances.symbol_rel_budget;
    const FrozenSymbol sym = tabulate_symbol(spec, y, g.frequencies(), so);
    s.check_max("symbol-conjugate-symmetry", conjugate_symmetry_defect(sym), 1e-10);
    s.add(check_coercivity(sym, spec));
    const DensityField f = invert_density(sym, spec, g);
    double mass = 0.0;
    for (double m : f.mass_deficit) mass = std::max(mass, std::abs(m));
    s.check_max("density-mass", mass, mass_tolerance);
    s.check("density-ringing", f.min_value, -ringing_tolerance, f.min_value >= -ringing_tolerance);
    if (spec.dim == 1) {
        s.add(check_density_bounds_refined(spec, y, g, cfg.tolerances.refinement_threshold));
        s.add(check_gradient_bound(density_gradient(f), spec));
        s.add(continuity_constant(f, spec));
        const double t1 = g.time_nodes.front();
        if (has_node(g, 2.0 * t1)) s.check_max("semigroup", semigroup_residual(f, t1, t1), 1e-8);
        if (has_node(g, 1.0)) {
            BoundReport sc;
            sc.id = "scaling";
            for (double t : g.time_nodes)
                if (t < 1.0) sc.constants.push_back({"residual@t=" + format_double(t), scaling_residual(f, spec.alpha, t)});
            sc.status = CheckStatus::info;
            sc.note = "periodic aliasing on this box; the gated scaling law is acceptance criterion 3";
            if (!sc.constants.empty()) s.add(sc);
        }
    } else {
        s.add(check_density_bounds(f, spec));
    }
    if (s.writing()) {
        write_symbol_csv(sym, s.path("symbol.csv"));
        write_field_csv(f, s.path("density.csv"));
        write_field_binary(f, s.path("density.bin"));
    }
}

void write_convergence(Session& s, const std::vector<ConvergenceEntry>& log) {
    for (const auto& e : log)
        s.section("convergence_log")
            .push_back({{"n", e.n}, {"sup_norm", number(e.sup_norm)}, {"ratio", number(e.ratio)}, {"tail_estimate", number(e.tail_estimate)}});
    if (!s.writing()) return;
    CsvWriter w(s.path("convergence.csv"), {"n", "sup_norm", "ratio", "tail_estimate"});
    for (const auto& e : log) w.row({static_cast<double>(e.n), e.sup_norm, e.ratio, e.tail_estimate});
    w.close();
}

void write_ratio_heatmap(Session& s, const DensityField& p, double alpha, const std::string& name) {
    const SpaceTimeGrid& g = p.grid;
    const std::size_t ti = g.time_nodes.size() - 1;
    const double t = g.time_nodes[ti];
    CsvWriter w(s.path(name), {"x", "y", "ratio"});
    for (int x = 0; x < g.n_x; ++x) {
        if (!g.interior(static_cast<std::size_t>(x))) continue;
        for (int y = 0; y < g.n_x; ++y) {
            if (!g.interior(static_cast<std::size_t>(y))) continue;
            const double d = std::abs(g.coord(x) - g.coord(y));
            const double wgt = d > 0.0 ? std::min(t * std::pow(d, -1.0 - alpha), std::pow(t, -1.0 / alpha)) : std::pow(t, -1.0 / alpha);
            w.row({g.coord(x), g.coord(y), p.values[ti](x, y) / wgt});
        }
    }
    w.close();
}

std::shared_ptr<ParametrixRun> parametrix_section(Session& s, const ModelSpec& spec, double horizon) {
    const RunConfig& cfg = s.cfg_;
    const SpaceTimeGrid g = parametrix_grid(cfg, spec, horizon);
    auto run = std::make_shared<ParametrixRun>(run_parametrix(spec, g, parametrix_options(cfg)));
    write_convergence(s, run->convergence_log);
    double mass = 0.0;
    for (double m : run->p.mass_deficit) mass = std::max(mass, m);
    s.check_max("parametrix-mass", mass, cfg.tolerances.mass_limit);
    const double T = g.horizon();
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.25, 0.25}, {0.25, 0.5}, {0.5, 0.5}})
        if (has_node(g, a * T) && has_node(g, b * T) && has_node(g, (a + b) * T))
            s.check_max("chapman-kolmogorov@(" + format_double(a * T) + "," + format_double(b * T) + ")",
                        chapman_kolmogorov_residual(*run, a * T, b * T), cfg.tolerances.ck_limit);
    if (spec.kernel.x_independent) {
        double diff = 0.0;
        for (std::size_t j = 0; j < run->p.values.size(); ++j)
            diff = std::max(diff, (run->p.values[j] - run->q.values[j]).cwiseAbs().maxCoeff());
        s.check_max("p == q", diff, 1e-12);
    }
    if (cfg.parametrix.refine) {
        s.add(check_heat_kernel_bounds_refined(spec, g, parametrix_options(cfg), cfg.tolerances.refinement_threshold));
        for (const auto& r : check_envelopes_refined(spec, g, parametrix_options(cfg), cfg.tolerances.refinement_threshold)) s.add(r);
    } else {
        s.add(check_heat_kernel_bounds(run->p, spec, run->resolved_times()));
        s.add(check_phi_envelope(*run));
        s.add(check_q_phi_envelope(*run));
    }
    if (s.writing()) {
        write_field_binary(run->p, s.path("p.bin"));
        write_slice_csv(run->p, g.time_nodes.size() - 1, static_cast<std::size_t>(g.n_x / 2), s.path("p_slice.csv"));
        write_ratio_heatmap(s, run->p, spec.alpha, "p_ratio_heatmap.csv");
        s.write_text("convergence_log.json", convergence_log_json(run->convergence_log));
    }
    return run;
}

std::unique_ptr<DriftSeriesState> drift_section(Session& s, std::shared_ptr<ParametrixRun> run) {
    const RunConfig& cfg = s.cfg_;
    auto st = std::make_unique<DriftSeriesState>(make_drift_state(run));
    build_drift_series(*st, cfg.tolerances.drift_n_max, cfg.tolerances.drift_tail_tol);
    for (const auto& e : st->gamma_log)
        s.section("gamma_log").push_back({{"n", e.n},
                                          {"sup_norm", number(e.sup_norm)},
                                          {"gradient_norm", number(e.gradient_norm)},
                                          {"predicted", number(e.predicted)},
                                          {"log_residual", number(e.log_residual)}});
    s.check_max("duhamel", duhamel_residual(*st), cfg.tolerances.duhamel_limit);
    s.check_max("gamma-fit-residual", st->gamma_fit_residual, 0.5);
    const BoundReport lb = check_l_bounds(*st);
    s.add(lb);
    s.check_max("drift-mass", lb.constant("mass_deficit"), 5e-3);
    if (s.writing()) {
        const auto& g = st->l.grid;
        write_field_binary(st->l, s.path("l.bin"));
        write_slice_csv(st->l, g.time_nodes.size() - 1, static_cast<std::size_t>(g.n_x / 2), s.path("l_slice.csv"));
        CsvWriter w(s.path("gamma_log.csv"), {"n", "sup_norm", "gradient_norm", "predicted", "log_residual"});
        for (const auto& e : st->gamma_log) w.row({static_cast<double>(e.n), e.sup_norm, e.gradient_norm, e.predicted, e.log_residual});
        w.close();
        s.write_text("gamma_log.json", gamma_log_json(st->gamma_log));
    }
    return st;
}

void mc_section(Session& s, const ModelSpec& spec) {
    const RunConfig& cfg = s.cfg_;
    const McConfig& m = cfg.mc;
    SimConfig sc = make_sim_config(spec, m.n_paths, cfg.seed);
    if (m.epsilon_cut > 0.0) sc.epsilon_cut = m.epsilon_cut;
    sc.dt = m.dt > 0.0 ? m.dt : std::min(0.5 / dominating_intensity(spec, sc.epsilon_cut), 0.01);
    sc.small_jump_mode = small_jump_mode_from_string(m.small_jump_mode);
    const Point x0{m.x0, 0.0};
    const SampleSet samples = simulate_paths(sc, x0, m.horizon);
    s.section("simulation") = {{"epsilon_cut", sc.epsilon_cut},
                               {"dt", sc.dt},
                               {"lambda_max", dominating_intensity(spec, sc.epsilon_cut)},
                               {"small_jump_mode", to_string(sc.small_jump_mode)},
                               {"candidate_jumps", samples.candidate_jumps},
                               {"accepted_jumps", samples.accepted_jumps}};
    if (s.writing()) write_samples_csv(samples, s.path("samples.csv"));

    if (spec.dim == 1) {
        AgreementReport a;
        std::string against;
        if (spec.kernel.x_independent) {
            RunConfig dc = cfg;
            dc.grid.times = {m.horizon};
            dc.grid.horizon = m.horizon;
            dc.grid.n_x = 0;
            dc.grid.extent = 0.0;
            const DensityField f = invert_density(spec, {0.0, 0.0}, density_grid(dc, spec));
            a = density_agreement(samples, f, cfg.tolerances.ks_allowance);
            against = "fft-density";
            if (!spec.has_drift() || spec.drift_at({1.0, 0.0})[0] == spec.drift_at({0.0, 0.0})[0]) {
                const CharacteristicCheck c = characteristic_function_check(samples, spec);
                for (std::size_t i = 0; i < c.u.size(); ++i)
                    s.section("characteristic_function")
                        .push_back({{"u", c.u[i]},
                                    {"empirical_re", c.empirical[i].real()},
                                    {"empirical_im", c.empirical[i].imag()},
                                    {"expected_re", c.expected[i].real()},
                                    {"expected_im", c.expected[i].imag()},
                                    {"z_score", number(c.z_score[i])}});
                s.check("characteristic-function", *std::max_element(c.z_score.begin(), c.z_score.end()), 3.0, c.pass);
            }
        } else {
            auto run = parametrix_section(s, spec, m.horizon);
            if (spec.has_drift()) {
                auto st = drift_section(s, run);
                a = density_agreement(samples, st->l, cfg.tolerances.ks_allowance);
                against = "drift-kernel";
            } else {
                a = density_agreement(samples, run->p, cfg.tolerances.ks_allowance);
                against = "parametrix-density";
            }
        }
        s.section("agreement").push_back({{"against", against},
                                          {"n", a.n},
                                          {"ks", a.ks},
                                          {"threshold", a.threshold},
                                          {"allowance", a.allowance},
                                          {"chi2", a.chi2},
                                          {"chi2_dof", a.chi2_dof},
                                          {"pass", a.pass}});
        s.check("ks-" + against, a.ks, a.threshold, a.pass);
    }

    SimConfig ec = sc;
    ec.n_paths = m.exit_paths;
    ec.seed = cfg.seed + 1;
    std::vector<ExitTimeEstimate> sweep;
    for (double k : m.exit_radii) sweep.push_back(estimate_exit_probability(ec, x0, k * std::pow(m.exit_time, 1.0 / spec.alpha), m.exit_time));
    const double C = fit_exit_envelope(sweep, spec.alpha);
    double lo = INFINITY, hi = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto& e = sweep[i];
        const double ratio = e.p_hat * std::pow(e.r, spec.alpha) / e.t;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (i && e.p_hat > sweep[i - 1].p_hat + e.ci_halfwidth + sweep[i - 1].ci_halfwidth) monotone = false;
        s.section("exit_estimates")
            .push_back({{"r", e.r}, {"t", e.t}, {"x0", e.x0[0]}, {"p_hat", e.p_hat}, {"ci_halfwidth", e.ci_halfwidth},
                        {"bound_value", number(e.bound_value)}, {"ratio", ratio}, {"fitted_C", C}});
    }
    if (sweep.size() >= 2) {
        s.check("exit-monotone", monotone ? 1.0 : 0.0, 1.0, monotone);
        s.check_max("exit-envelope-spread", hi / lo, 1.3 / 0.7);
    }
}

void verify_section(Session& s, const ModelSpec& spec) {
    const RunConfig& cfg = s.cfg_;
    validation_section(s, spec);
    density_section(s, spec);
    for (const auto& r : verify_rho_inequalities(spec, default_rho_tuples(spec), {}, cfg.tolerances.refinement_threshold)) s.add(r);
    if (spec.dim == 1 && spec.kernel.has_tail_model()) {
        RunConfig dc = cfg;
        dc.grid.times = {0.5 * cfg.grid.horizon, cfg.grid.horizon};
        dc.grid.n_x = 2048;
        dc.grid.extent = 14.0 * std::numbers::pi;
        const SpaceTimeGrid g = density_grid(dc, spec);
        const DensityField f = invert_density(spec, {cfg.density.y, 0.0}, g);
        s.check_max("generator-spectral-consistency", spectral_consistency(spec, {cfg.density.y, 0.0}, f.column(0), g), 1e-5);
    }
    if (!cfg.verify.acceptance.empty()) {
        AcceptanceOptions ao;
        ao.seed = cfg.seed;
        for (const auto& r : run_acceptance(cfg.verify.acceptance, ao)) {
            json values = json::object();
            for (const auto& v : r.values) values[v.name] = number(v.value);
            s.section("acceptance").push_back(
                {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"values", values}, {"detail", r.detail}});
            s.check("acceptance-" + std::to_string(r.id), r.pass ? 1.0 : 0.0, 1.0, r.pass);
        }
    }
}

}  // namespace

RunOutcome run_pipeline(const RunConfig& cfg, const RunOptions& opt) {
    set_thread_count(cfg.threads);
    const ModelSpec spec = model_of(cfg);
    Session s(cfg, opt);
    if (cfg.pipeline == "density") {
        validation_section(s, spec);
        density_section(s, spec);
    } else if (cfg.pipeline == "parametrix") {
        parametrix_section(s, spec, cfg.grid.horizon);
    } else if (cfg.pipeline == "drift") {
        drift_section(s, parametrix_section(s, spec, cfg.grid.horizon));
    } else if (cfg.pipeline == "mc") {
        mc_section(s, spec);
    } else if (cfg.pipeline == "verify") {
        verify_section(s, spec);
    } else {
        throw ConfigError("unknown pipeline '" + cfg.pipeline + "'");
    }
    return s.finish();
}

std::string error_json(const std::exception& e) {
    json j{{"status", "error"}};
    if (const auto* se = dynamic_cast<const Error*>(&e)) {
        j["kind"] = se->kind();
        j["exit_code"] = static_cast<int>(se->code());
    } else {
        j["kind"] = "internal_error";
        j["exit_code"] = static_cast<int>(ExitCode::check_failed);
    }
    j["message"] = e.what();
    return j.dump(2);
}

std::string empty_report_json(const RunConfig& config, bool timestamp) { return skeleton(config, timestamp).dump(2); }

std::vector<std::string> render_report(const std::string& report_path, const std::string& out_dir) {
    std::ifstream in(report_path);
    if (!in) throw IoError("cannot read report " + report_path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
    std::vector<std::string> written;
    auto out = [&](const std::string& name) {
        written.push_back(name);
        return (fs::path(out_dir) / name).string();
    };
    auto val = [](const json& v) { return v.is_number() ? format_double(v.get<double>()) : std::string(); };
    {
        CsvWriter w(out("reports.csv"), {"id", "status", "constant", "value", "stability_delta"});
        if (j.contains("reports"))
            for (const auto& r : j["reports"])
                for (const auto& [k, v] : r["constants"].items())
                    w.row_mixed({r["id"].get<std::string>(), r["status"].get<std::string>(), k, val(v), val(r["stability_delta"])});
        if (j.contains("checks"))
            for (const auto& c : j["checks"])
                w.row_mixed({c["name"].get<std::string>(), c["pass"].get<bool>() ? "pass" : "fail", "value", val(c["value"]), ""});
        w.close();
    }
    auto table = [&](const char* key, const char* file, const std::vector<std::string>& cols) {
        if (!j.contains(key) || j[key].empty()) return;
        CsvWriter w(out(file), cols);
        for (const auto& e : j[key]) {
            std::vector<std::string> row;
            for (const auto& c : cols) {
                const json& v = e.contains(c) ? e[c] : json(nullptr);
                row.push_back(v.is_string() ? v.get<std::string>() : v.is_boolean() ? (v.get<bool>() ? "true" : "false") : val(v));
            }
            w.row_mixed(row);
        }
        w.close();
    };
    table("convergence_log", "convergence.csv", {"n", "sup_norm", "ratio", "tail_estimate"});
    table("gamma_log", "gamma_log.csv", {"n", "sup_norm", "gradient_norm", "predicted", "log_residual"});
    table("exit_estimates", "exit.csv", {"r", "t", "p_hat", "ci_halfwidth", "bound_value", "ratio"});
    table("acceptance", "acceptance.csv", {"id", "name", "pass"});
    return written;
}

void write_slice_csv(const DensityField& field, std::size_t time_index, std::size_t slice, const std::string& path) {
    const auto& g = field.grid;
    if (g.dim != 1) throw ConfigError("slice export is implemented for d = 1");
    CsvWriter w(path, {"x", "value"});
    const auto& v = field.values.at(time_index);
    for (int x = 0; x < g.n_x; ++x) w.row({g.coord(x), v(x, static_cast<Eigen::Index>(slice))});
    w.close();
}

}  // namespace stablekernel
