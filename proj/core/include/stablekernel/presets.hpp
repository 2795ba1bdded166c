#pragma once

#include <map>
#include <string>
#include <vector>

#include "stablekernel/model.hpp"

namespace stablekernel {

using ParamMap = std::map<std::string, double>;

/// n(x,h) = c.
ModelSpec constant_model(double alpha, int dim = 1, double c = 1.0);

/// n(x,h) = c0 + c1 sin(omega x_1), independent of h.
ModelSpec sinusoidal_model(double alpha, int dim = 1, double c0 = 1.0, double c1 = 0.4,
                           double omega = 1.0, double theta = 0.5);

/// n(x,h) = 1 + a sign(h_1); violates the odd-moment condition when alpha = 1.
ModelSpec sign_asymmetric_model(double alpha, int dim = 1, double a = 0.5);

/// n(x,h) = 1 + c1 sin(x_1) cos(|h|), even in h.
ModelSpec even_cosine_model(double alpha, int dim = 1, double c1 = 0.4, double theta = 0.5);

/// n(x,h) = 1 + c |sin x_1|^theta 1_{|h| <= 1}: Hoelder of order theta in x, a jump in |h|.
ModelSpec step_holder_model(double alpha, int dim = 1, double c = 0.3, double theta = 0.5);

/// Attach the constant drift b = (b0, 0); kappa3 = |b0|.
ModelSpec with_constant_drift(ModelSpec spec, double b0);

/// Named presets: constant, constant-cauchy, sinusoidal, sinusoidal-drift, sign-asymmetric,
/// even-cosine, step-holder. Parameters override the preset defaults; unknown keys throw.
ModelSpec make_preset(const std::string& name, const ParamMap& params = {});
std::vector<std::string> preset_names();
/// Parameter keys accepted by a preset together with their defaults.
ParamMap preset_defaults(const std::string& name);

}  // namespace stablekernel
