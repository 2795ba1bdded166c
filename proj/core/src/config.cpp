#include "stablekernel/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "stablekernel/errors.hpp"

namespace stablekernel {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

void expect_object(const json& j, const std::string& path, const std::set<std::string>& keys) {
    if (!j.is_object()) throw ConfigError("config: " + (path.empty() ? "/" : path) + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError("config: unknown key " + join(path, k));
}

void type_error(const std::string& path, const char* what) { throw ConfigError("config: " + path + " must be " + what); }

void read(const json& j, const std::string& path, double& out) {
    if (!j.is_number()) type_error(path, "a number");
    out = j.get<double>();
}
void read(const json& j, const std::string& path, int& out) {
    if (!j.is_number_integer()) type_error(path, "an integer");
    out = j.get<int>();
}
void read(const json& j, const std::string& path, std::uint64_t& out) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        type_error(path, "a non-negative integer");
    out = j.get<std::uint64_t>();
}
void read(const json& j, const std::string& path, bool& out) {
    if (!j.is_boolean()) type_error(path, "a boolean");
    out = j.get<bool>();
}
void read(const json& j, const std::string& path, std::string& out) {
    if (!j.is_string()) type_error(path, "a string");
    out = j.get<std::string>();
}
template <class T>
void read(const json& j, const std::string& path, std::vector<T>& out) {
    if (!j.is_array()) type_error(path, "an array");
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        T v{};
        read(j[i], path + "/" + std::to_string(i), v);
        out.push_back(v);
    }
}
void read(const json& j, const std::string& path, std::map<std::string, double>& out) {
    if (!j.is_object()) type_error(path, "an object");
    out.clear();
    for (const auto& [k, v] : j.items()) read(v, join(path, k), out[k]);
}

template <class T>
void field(const json& j, const std::string& path, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) read(*it, join(path, key), out);
}

void read(const json& j, const std::string& path, ModelConfig& m) {
    expect_object(j, path, {"preset", "params"});
    field(j, path, "preset", m.preset);
    field(j, path, "params", m.params);
}

void read(const json& j, const std::string& path, GridConfig& g) {
    expect_object(j, path, {"n_x", "extent", "n_t", "horizon", "times"});
    field(j, path, "n_x", g.n_x);
    field(j, path, "extent", g.extent);
    field(j, path, "n_t", g.n_t);
    field(j, path, "horizon", g.horizon);
    field(j, path, "times", g.times);
}

void read(const json& j, const std::string& path, Tolerances& t) {
    expect_object(j, path, {"symbol_rel_budget", "refinement_threshold", "parametrix_n_max", "parametrix_tail_tol",
                            "drift_n_max", "drift_tail_tol", "ck_limit", "duhamel_limit", "mass_limit", "ks_allowance"});
    field(j, path, "symbol_rel_budget", t.symbol_rel_budget);
    field(j, path, "refinement_threshold", t.refinement_threshold);
    field(j, path, "parametrix_n_max", t.parametrix_n_max);
    field(j, path, "parametrix_tail_tol", t.parametrix_tail_tol);
    field(j, path, "drift_n_max", t.drift_n_max);
    field(j, path, "drift_tail_tol", t.drift_tail_tol);
    field(j, path, "ck_limit", t.ck_limit);
    field(j, path, "duhamel_limit", t.duhamel_limit);
    field(j, path, "mass_limit", t.mass_limit);
    field(j, path, "ks_allowance", t.ks_allowance);
}

void read(const json& j, const std::string& path, McConfig& m) {
    expect_object(j, path, {"n_paths", "epsilon_cut", "dt", "small_jump_mode", "x0", "horizon", "exit_time", "exit_radii",
                            "exit_paths"});
    field(j, path, "n_paths", m.n_paths);
    field(j, path, "epsilon_cut", m.epsilon_cut);
    field(j, path, "dt", m.dt);
    field(j, path, "small_jump_mode", m.small_jump_mode);
    field(j, path, "x0", m.x0);
    field(j, path, "horizon", m.horizon);
    field(j, path, "exit_time", m.exit_time);
    field(j, path, "exit_radii", m.exit_radii);
    field(j, path, "exit_paths", m.exit_paths);
}

json to_object(const RunConfig& c) {
    json params = json::object();
    for (const auto& [k, v] : c.model.params) params[k] = v;
    const auto& t = c.tolerances;
    const auto& m = c.mc;
    return json{{"pipeline", c.pipeline},
                {"output", c.output},
                {"seed", c.seed},
                {"threads", c.threads},
                {"model", {{"preset", c.model.preset}, {"params", params}}},
                {"grid",
                 {{"n_x", c.grid.n_x},
                  {"extent", c.grid.extent},
                  {"n_t", c.grid.n_t},
                  {"horizon", c.grid.horizon},
                  {"times", c.grid.times}}},
                {"tolerances",
                 {{"symbol_rel_budget", t.symbol_rel_budget},
                  {"refinement_threshold", t.refinement_threshold},
                  {"parametrix_n_max", t.parametrix_n_max},
                  {"parametrix_tail_tol", t.parametrix_tail_tol},
                  {"drift_n_max", t.drift_n_max},
                  {"drift_tail_tol", t.drift_tail_tol},
                  {"ck_limit", t.ck_limit},
                  {"duhamel_limit", t.duhamel_limit},
                  {"mass_limit", t.mass_limit},
                  {"ks_allowance", t.ks_allowance}}},
                {"density", {{"y", c.density.y}}},
                {"parametrix", {{"refine", c.parametrix.refine}}},
                {"mc",
                 {{"n_paths", m.n_paths},
                  {"epsilon_cut", m.epsilon_cut},
                  {"dt", m.dt},
                  {"small_jump_mode", m.small_jump_mode},
                  {"x0", m.x0},
                  {"horizon", m.horizon},
                  {"exit_time", m.exit_time},
                  {"exit_radii", m.exit_radii},
                  {"exit_paths", m.exit_paths}}},
                {"verify", {{"acceptance", c.verify.acceptance}}}};
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
    static const std::vector<std::string> names{"density", "parametrix", "drift", "mc", "verify"};
    return names;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    RunConfig c;
    expect_object(j, "", {"pipeline", "output", "seed", "threads", "model", "grid", "tolerances", "density", "parametrix",
                          "mc", "verify"});
    field(j, "", "pipeline", c.pipeline);
    field(j, "", "output", c.output);
    field(j, "", "seed", c.seed);
    field(j, "", "threads", c.threads);
    if (auto it = j.find("model"); it != j.end()) read(*it, "/model", c.model);
    if (auto it = j.find("grid"); it != j.end()) read(*it, "/grid", c.grid);
    if (auto it = j.find("tolerances"); it != j.end()) read(*it, "/tolerances", c.tolerances);
    if (auto it = j.find("density"); it != j.end()) {
        expect_object(*it, "/density", {"y"});
        field(*it, "/density", "y", c.density.y);
    }
    if (auto it = j.find("parametrix"); it != j.end()) {
        expect_object(*it, "/parametrix", {"refine"});
        field(*it, "/parametrix", "refine", c.parametrix.refine);
    }
    if (auto it = j.find("mc"); it != j.end()) read(*it, "/mc", c.mc);
    if (auto it = j.find("verify"); it != j.end()) {
        expect_object(*it, "/verify", {"acceptance"});
        field(*it, "/verify", "acceptance", c.verify.acceptance);
    }
    if (std::find(pipeline_names().begin(), pipeline_names().end(), c.pipeline) == pipeline_names().end())
        throw ConfigError("config: /pipeline '" + c.pipeline + "' is not one of density, parametrix, drift, mc, verify");
    if (c.threads < 1) throw ConfigError("config: /threads must be at least 1");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const RunConfig& config, int indent) { return to_object(config).dump(indent); }

std::string config_hash(const RunConfig& config) {
    const std::string text = to_object(config).dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_object(a) == to_object(b); }

}  // namespace stablekernel
