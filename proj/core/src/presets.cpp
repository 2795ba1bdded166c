#include "stablekernel/presets.hpp"

#include <cmath>
#include <numbers>

#include "stablekernel/errors.hpp"

namespace stablekernel {

namespace {

using Profile = std::shared_ptr<const JumpKernel>;

Profile profile_constant(double c) {
    JumpKernel k;
    k.eval = [c](const Point&, const Point&) { return c; };
    k.tail = [c](const Point&, const Point&) { return std::vector<TailMode>{{0.0, c, 0.0}}; };
    k.x_independent = true;
    return std::make_shared<const JumpKernel>(std::move(k));
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Profile profile_sign(double a) {
    JumpKernel k;
    k.eval = [a](const Point&, const Point& h) { return 1.0 + a * sgn(h[0]); };
    k.tail = [a](const Point&, const Point& e) { return std::vector<TailMode>{{0.0, 1.0 + a * sgn(e[0]), 0.0}}; };
    k.angular_breaks = {0.5 * std::numbers::pi, 1.5 * std::numbers::pi};
    k.x_independent = true;
    return std::make_shared<const JumpKernel>(std::move(k));
}

Profile profile_cosine(double omega) {
    JumpKernel k;
    k.eval = [omega](const Point&, const Point& h) { return std::cos(omega * std::hypot(h[0], h[1])); };
    k.tail = [omega](const Point&, const Point&) { return std::vector<TailMode>{{omega, 1.0, 0.0}}; };
    k.resolution = std::min(1.0, 1.0 / omega);
    k.x_independent = true;
    return std::make_shared<const JumpKernel>(std::move(k));
}

Profile profile_ball(double r0) {
    JumpKernel k;
    k.eval = [r0](const Point&, const Point& h) { return std::hypot(h[0], h[1]) <= r0 ? 1.0 : 0.0; };
    k.tail = [](const Point&, const Point&) { return std::vector<TailMode>{}; };
    k.tail_radius = r0;
    k.radial_breaks = {r0};
    k.x_independent = true;
    return std::make_shared<const JumpKernel>(std::move(k));
}

std::function<double(const Point&)> constant_weight(double c) {
    return [c](const Point&) { return c; };
}

}  // namespace

ModelSpec constant_model(double alpha, int dim, double c) {
    ModelSpec s;
    s.name = "constant";
    s.alpha = alpha;
    s.dim = dim;
    s.kernel = make_separable({{constant_weight(1.0), profile_constant(c)}});
    s.kernel.x_independent = true;
    s.kappa0 = s.kappa1 = c;
    s.kappa2 = 0.0;
    s.theta = 0.5;
    return s;
}

ModelSpec sinusoidal_model(double alpha, int dim, double c0, double c1, double omega, double theta) {
    ModelSpec s;
    s.name = "sinusoidal";
    s.alpha = alpha;
    s.dim = dim;
    s.kernel = make_separable(
        {{[c0, c1, omega](const Point& x) { return c0 + c1 * std::sin(omega * x[0]); }, profile_constant(1.0)}});
    s.kernel.x_independent = c1 == 0.0;
    s.kappa0 = c0 - std::abs(c1);
    s.kappa1 = c0 + std::abs(c1);
    s.theta = theta;
    s.kappa2 = std::abs(c1) * std::pow(omega, theta) * std::pow(2.0, 1.0 - theta);
    return s;
}

ModelSpec sign_asymmetric_model(double alpha, int dim, double a) {
    ModelSpec s;
    s.name = "sign-asymmetric";
    s.alpha = alpha;
    s.dim = dim;
    s.kernel = make_separable({{constant_weight(1.0), profile_sign(a)}});
    s.kernel.x_independent = true;
    s.kappa0 = 1.0 - std::abs(a);
    s.kappa1 = 1.0 + std::abs(a);
    s.kappa2 = 0.0;
    s.theta = 0.5;
    return s;
}

ModelSpec even_cosine_model(double alpha, int dim, double c1, double theta) {
    ModelSpec s;
    s.name = "even-cosine";
    s.alpha = alpha;
    s.dim = dim;
    s.kernel = make_separable({{constant_weight(1.0), profile_constant(1.0)},
                               {[c1](const Point& x) { return c1 * std::sin(x[0]); }, profile_cosine(1.0)}});
    s.kernel.x_independent = c1 == 0.0;
    s.kappa0 = 1.0 - std::abs(c1);
    s.kappa1 = 1.0 + std::abs(c1);
    s.theta = theta;
    s.kappa2 = std::abs(c1) * std::pow(2.0, 1.0 - theta);
    return s;
}

ModelSpec step_holder_model(double alpha, int dim, double c, double theta) {
    ModelSpec s;
    s.name = "step-holder";
    s.alpha = alpha;
    s.dim = dim;
    s.kernel = make_separable({{constant_weight(1.0), profile_constant(1.0)},
                               {[c, theta](const Point& x) { return c * std::pow(std::abs(std::sin(x[0])), theta); },
                                profile_ball(1.0)}});
    s.kernel.x_independent = c == 0.0;
    s.kappa0 = std::min(1.0, 1.0 + c);
    s.kappa1 = std::max(1.0, 1.0 + c);
    s.theta = theta;
    s.kappa2 = std::abs(c);
    return s;
}

ModelSpec with_constant_drift(ModelSpec spec, double b0) {
    if (b0 == 0.0) {
        spec.drift = nullptr;
        spec.kappa3 = 0.0;
        return spec;
    }
    spec.drift = [b0](const Point&) { return Point{b0, 0.0}; };
    spec.kappa3 = std::abs(b0);
    return spec;
}

ParamMap preset_defaults(const std::string& name) {
    if (name == "constant") return {{"alpha", 1.5}, {"dim", 1}, {"c", 1.0}, {"drift", 0.0}, {"scale", 1.0}};
    if (name == "constant-cauchy") return {{"alpha", 1.0}, {"dim", 1}, {"c", 1.0}, {"scale", 1.0}};
    if (name == "sinusoidal" || name == "sinusoidal-drift")
        return {{"alpha", 1.5}, {"dim", 1},     {"c0", 1.0},    {"c1", 0.4},
                {"omega", 1.0}, {"theta", 0.5}, {"drift", name == "sinusoidal" ? 0.0 : 0.3}, {"scale", 1.0}};
    if (name == "sign-asymmetric") return {{"alpha", 1.0}, {"dim", 1}, {"a", 0.5}, {"drift", 0.0}, {"scale", 1.0}};
    if (name == "even-cosine")
        return {{"alpha", 1.0}, {"dim", 1}, {"c1", 0.4}, {"theta", 0.5}, {"drift", 0.0}, {"scale", 1.0}};
    if (name == "step-holder")
        return {{"alpha", 1.5}, {"dim", 1}, {"c", 0.3}, {"theta", 0.5}, {"drift", 0.0}, {"scale", 1.0}};
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"constant", "constant-cauchy", "sinusoidal", "sinusoidal-drift", "sign-asymmetric", "even-cosine", "step-holder"};
}

ModelSpec make_preset(const std::string& name, const ParamMap& params) {
    ParamMap p = preset_defaults(name);
    for (const auto& [k, v] : params) {
        auto it = p.find(k);
        if (it == p.end()) throw ConfigError("preset '" + name + "' has no parameter '" + k + "'");
        it->second = v;
    }
    const double alpha = p.at("alpha");
    const int dim = static_cast<int>(p.at("dim"));
    if (dim != 1 && dim != 2) throw ConfigError("preset '" + name + "': dim must be 1 or 2");
    ModelSpec s;
    if (name == "constant" || name == "constant-cauchy") {
        s = constant_model(alpha, dim, p.at("c"));
    } else if (name == "sinusoidal" || name == "sinusoidal-drift") {
        s = sinusoidal_model(alpha, dim, p.at("c0"), p.at("c1"), p.at("omega"), p.at("theta"));
    } else if (name == "sign-asymmetric") {
        s = sign_asymmetric_model(alpha, dim, p.at("a"));
    } else if (name == "even-cosine") {
        s = even_cosine_model(alpha, dim, p.at("c1"), p.at("theta"));
    } else {
        s = step_holder_model(alpha, dim, p.at("c"), p.at("theta"));
    }
    s.name = name;
    if (auto it = p.find("drift"); it != p.end()) s = with_constant_drift(std::move(s), it->second);
    check_spec_fields(s);
    if (p.at("scale") != 1.0) s = rescale(s, p.at("scale"));
    return s;
}

}  // namespace stablekernel
