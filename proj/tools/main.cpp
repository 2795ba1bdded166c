#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "stablekernel/config.hpp"
#include "stablekernel/errors.hpp"
#include "stablekernel/pipeline.hpp"

namespace sk = stablekernel;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> preset;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--preset", o.preset, "model preset name");
}

sk::RunConfig resolve(const std::string& pipeline, const Overrides& o) {
    sk::RunConfig cfg = o.config.empty() ? sk::RunConfig{} : sk::load_config(o.config);
    cfg.pipeline = pipeline;
    if (o.out) cfg.output = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.preset) {
        cfg.model.preset = *o.preset;
        if (o.config.empty()) cfg.model.params.clear();
    }
    return cfg;
}

int run(const sk::RunConfig& cfg) {
    const sk::RunOutcome r = sk::run_pipeline(cfg);
    std::cout << cfg.pipeline << ": " << (r.code == sk::ExitCode::pass ? "pass" : "fail") << " (" << r.files.size()
              << " files in " << cfg.output << ")\n";
    return static_cast<int>(r.code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat kernel and Monte Carlo tooling for stable-like nonlocal operators"};
    app.require_subcommand(1);

    Overrides o;
    for (const auto& name : sk::pipeline_names()) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " pipeline");
        add_run_flags(cmd, o);
    }
    std::string report_path, report_out = "plots";
    auto* report = app.add_subcommand("report", "re-render a report.json into plot CSVs");
    report->add_option("report", report_path, "report.json to render")->required()->check(CLI::ExistingFile);
    report->add_option("--out", report_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            for (const auto& f : sk::render_report(report_path, report_out)) std::cout << report_out << '/' << f << '\n';
            return 0;
        }
        for (const auto* cmd : app.get_subcommands()) return run(resolve(cmd->get_name(), o));
    } catch (const std::exception& e) {
        std::cerr << sk::error_json(e) << '\n';
        if (const auto* se = dynamic_cast<const sk::Error*>(&e)) return static_cast<int>(se->code());
        return static_cast<int>(sk::ExitCode::check_failed);
    }
    return 0;
}
