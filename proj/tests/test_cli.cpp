#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "stablekernel/config.hpp"
#include "stablekernel/errors.hpp"
#include "stablekernel/pipeline.hpp"

namespace sk = stablekernel;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "stablekernel_cli_tests" / name;
    fs::remove_all(p);
    return p;
}

sk::RunConfig small(const std::string& pipeline, const std::string& preset, const std::string& out) {
    sk::RunConfig c;
    c.pipeline = pipeline;
    c.model.preset = preset;
    c.output = out;
    c.grid.n_x = 64;
    c.grid.n_t = 20;
    c.verify.acceptance.clear();
    return c;
}

const json* find_check(const json& report, const std::string& name) {
    for (const auto& c : report["checks"])
        if (c["name"] == name) return &c;
    return nullptr;
}

}  // namespace

TEST(Config, RoundTrip) {
    sk::RunConfig c;
    c.pipeline = "mc";
    c.seed = 99;
    c.model.preset = "sinusoidal";
    c.model.params = {{"alpha", 1.25}, {"c1", 0.2}};
    c.grid.times = {0.25, 1.0};
    c.mc.exit_radii = {1.0, 3.0};
    c.verify.acceptance = {2, 7};
    const sk::RunConfig back = sk::parse_config(sk::to_json(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(sk::to_json(back), sk::to_json(c));
    EXPECT_EQ(sk::config_hash(back), sk::config_hash(c));
    c.seed = 100;
    EXPECT_NE(sk::config_hash(back), sk::config_hash(c));
    EXPECT_EQ(sk::config_hash(c).size(), 64u);
}

TEST(Config, UnknownKeyIsRejectedWithPath) {
    try {
        sk::parse_config(R"({"grid": {"n_x": 64, "nx": 3}})");
        FAIL();
    } catch (const sk::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/grid/nx"), std::string::npos) << e.what();
    }
    EXPECT_THROW(sk::parse_config(R"({"bogus": 1})"), sk::ConfigError);
}

TEST(Config, TypeErrorsCarryThePath) {
    try {
        sk::parse_config(R"({"mc": {"exit_radii": [1, "two"]}})");
        FAIL();
    } catch (const sk::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/mc/exit_radii/1"), std::string::npos) << e.what();
    }
    EXPECT_THROW(sk::parse_config(R"({"pipeline": "nope"})"), sk::ConfigError);
    EXPECT_THROW(sk::parse_config("{not json"), sk::ConfigError);
    EXPECT_THROW(sk::parse_config(R"({"threads": 0})"), sk::ConfigError);
}

TEST(Report, EmptyReportHasEmptyArrays) {
    const json j = json::parse(sk::empty_report_json(sk::RunConfig{}, false));
    for (const char* k : {"checks", "reports", "convergence_log", "gamma_log", "exit_estimates", "acceptance", "files"}) {
        ASSERT_TRUE(j.contains(k)) << k;
        EXPECT_TRUE(j[k].is_array() && j[k].empty()) << k;
    }
    EXPECT_FALSE(j.contains("timestamp"));
}

TEST(Report, ErrorJson) {
    const json j = json::parse(sk::error_json(sk::ConvergenceError("no contraction")));
    EXPECT_EQ(j["status"], "error");
    EXPECT_EQ(j["kind"], "convergence_failure");
    EXPECT_EQ(j["exit_code"], 3);
    EXPECT_EQ(json::parse(sk::error_json(sk::ConfigError("x")))["exit_code"], 2);
}

TEST(Pipeline, DensityRunIsDeterministic) {
    const auto out = scratch("density");
    auto cfg = small("density", "sinusoidal", out.string());
    cfg.grid.n_x = 0;
    sk::RunOptions opt;
    opt.timestamp = false;
    const auto a = sk::run_pipeline(cfg, opt);
    const std::string first = a.report_json;
    const auto b = sk::run_pipeline(cfg, opt);
    EXPECT_EQ(first, b.report_json);
    EXPECT_EQ(a.code, sk::ExitCode::pass) << a.report_json;
    for (const char* f : {"report.json", "density.csv", "density.bin", "symbol.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    const json j = json::parse(first);
    EXPECT_EQ(j["config_hash"], sk::config_hash(cfg));
    EXPECT_FALSE(j["reports"].empty());
    for (const auto& r : j["reports"]) EXPECT_FALSE(r["id"].get<std::string>().empty());
}

TEST(Pipeline, ParametrixCollapseCheckForConstantKernel) {
    const auto out = scratch("parametrix");
    const auto r = sk::run_pipeline(small("parametrix", "constant", out.string()));
    const json j = json::parse(r.report_json);
    const json* c = find_check(j, "p == q");
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE((*c)["pass"].get<bool>());
    EXPECT_FALSE(j["convergence_log"].is_null());
    for (const char* f : {"p.bin", "p_slice.csv", "p_ratio_heatmap.csv", "convergence.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;

    std::ifstream in(out / "p_slice.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 64 + 1);
}

TEST(Pipeline, VerifyCauchyPresetPassesDensityChecks) {
    const auto out = scratch("verify");
    auto cfg = small("verify", "constant-cauchy", out.string());
    cfg.grid.n_x = 0;
    const auto r = sk::run_pipeline(cfg);
    const json j = json::parse(r.report_json);
    for (const auto& c : j["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
    for (const auto& rep : j["reports"]) EXPECT_NE(rep["status"], "fail") << rep.dump();
    EXPECT_EQ(r.code, sk::ExitCode::pass);
}

TEST(Pipeline, DriftAndRender) {
    const auto out = scratch("drift");
    const auto r = sk::run_pipeline(small("drift", "sinusoidal-drift", out.string()));
    const json j = json::parse(r.report_json);
    EXPECT_FALSE(j["gamma_log"].empty());
    ASSERT_NE(find_check(j, "duhamel"), nullptr);
    const auto plots = out / "plots";
    const auto files = sk::render_report((out / "report.json").string(), plots.string());
    EXPECT_NE(std::find(files.begin(), files.end(), "gamma_log.csv"), files.end());
    EXPECT_TRUE(fs::exists(plots / "reports.csv"));
    EXPECT_THROW(sk::render_report((out / "missing.json").string(), plots.string()), sk::IoError);
}

TEST(Pipeline, MonteCarloWritesSamplesAndExitSweep) {
    const auto out = scratch("mc");
    auto cfg = small("mc", "constant", out.string());
    cfg.mc.n_paths = 4000;
    cfg.mc.exit_paths = 4000;
    const auto r = sk::run_pipeline(cfg);
    const json j = json::parse(r.report_json);
    EXPECT_EQ(j["exit_estimates"].size(), 3u);
    EXPECT_EQ(j["agreement"].size(), 1u);
    EXPECT_TRUE(fs::exists(out / "samples.csv"));
}

TEST(Pipeline, UnwritableOutputIsAnIoError) {
    auto cfg = small("density", "constant", "/proc/stablekernel-cannot-write");
    EXPECT_THROW(sk::run_pipeline(cfg), sk::IoError);
}
