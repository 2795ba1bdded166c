#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace stablekernel {

/// A point of R^d, d in {1,2}; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

inline double norm(const Point& p, int dim) {
    return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

/// One term A cos(omega r) + B sin(omega r) of a kernel's far-field profile along a ray.
struct TailMode {
    double omega = 0.0;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

/// Jump kernel n(x,h).
///
/// Besides the pointwise evaluator the kernel declares how it behaves along rays
/// h = r e for large r: beyond `tail_radius` it must equal the finite trigonometric
/// sum returned by `tail(x, e)`. Symbol and operator quadratures integrate the far
/// field in closed form from that description. Kernels with an exact separable
/// form sum_k w_k(x) m_k(h) also list the terms, which lets symbol tables be built
/// once per profile instead of once per base point.
struct JumpKernel {
    struct Term {
        std::function<double(const Point&)> weight;
        std::shared_ptr<const JumpKernel> profile;
    };

    std::function<double(const Point& x, const Point& h)> eval;
    std::function<std::vector<TailMode>(const Point& x, const Point& dir)> tail;
    double tail_radius = 0.0;
    std::vector<double> radial_breaks;   ///< radii where n(x, r e) is not smooth
    std::vector<double> angular_breaks;  ///< d=2 only: angles in [0, 2pi) where n jumps
    double resolution = 1.0;             ///< longest radial panel that resolves n
    bool x_independent = false;
    std::vector<Term> terms;

    double operator()(const Point& x, const Point& h) const { return eval(x, h); }
    bool has_tail_model() const { return static_cast<bool>(tail); }
};

/// Build a kernel from separable terms; evaluator, tail model and breaks are derived.
JumpKernel make_separable(std::vector<JumpKernel::Term> terms);

using DriftField = std::function<Point(const Point&)>;

/// The operator data: index alpha, dimension, kernel n, drift b and the declared constants.
struct ModelSpec {
    std::string name = "custom";
    double alpha = 1.5;
    int dim = 1;
    JumpKernel kernel;
    DriftField drift;  ///< empty means b = 0
    double kappa0 = 1.0;
    double kappa1 = 1.0;
    double kappa2 = 0.0;
    double theta = 0.5;
    double kappa3 = 0.0;

    double theta_hat() const { return std::min(theta, alpha / 4.0); }
    bool unit_index() const { return alpha == 1.0; }
    /// chi_alpha(h) as a function of r = |h|.
    bool compensated(double r) const { return alpha > 1.0 || (alpha == 1.0 && r <= 1.0); }
    bool has_drift() const { return alpha > 1.0 && static_cast<bool>(drift); }
    Point drift_at(const Point& x) const { return has_drift() ? drift(x) : Point{0.0, 0.0}; }
};

/// Throws ConfigError if the declared scalars are out of range.
void check_spec_fields(const ModelSpec& spec);

/// Rescaled model of Y_t = a X_{a^{-alpha} t}: kernel n(x/a, h/a), drift a^{1-alpha} b(x/a).
ModelSpec rescale(const ModelSpec& spec, double a);

struct NamedValue {
    std::string name;
    double value = 0.0;
};

enum class CheckStatus { pass, fail, info };
const char* to_string(CheckStatus s);

/// Sampling lattice for the assumption audit.
struct ValidationLattice {
    int n_points = 33;
    int n_directions = 65;
    int n_radii = 8;
    double r_min = 1e-3;
    double r_max = 1e3;
    double x_extent = 2.0 * std::numbers::pi;  ///< points sampled in [-x_extent, x_extent]^d
    int sphere_nodes = 256;
    double bound_tol = 1e-9;
    double moment_tol = 1e-6;
};

struct AssumptionCheck {
    std::string assumption;
    CheckStatus status = CheckStatus::pass;
    double worst_violation = 0.0;
    std::vector<NamedValue> witness;
    std::string note;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool passed() const;
    const AssumptionCheck* find(const std::string& assumption) const;
};

ValidationReport validate_model(const ModelSpec& spec, const ValidationLattice& lattice = {});

}  // namespace stablekernel
