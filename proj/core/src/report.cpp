#include "stablekernel/report.hpp"

#include <algorithm>
#include <cmath>

namespace stablekernel {

double BoundReport::constant(const std::string& name) const {
    for (const auto& c : constants)
        if (c.name == name) return c.value;
    return std::numeric_limits<double>::quiet_NaN();
}

double relative_change(double a, double b) {
    const double scale = std::max(std::abs(a), 1e-300);
    return std::abs(b - a) / scale;
}

void finalize(BoundReport& report, const std::vector<std::string>& must_be_positive) {
    bool ok = !report.constants.empty();
    for (const auto& c : report.constants) ok = ok && std::isfinite(c.value);
    for (const auto& name : must_be_positive) ok = ok && report.constant(name) > 0.0;
    if (!std::isnan(report.stability_delta)) ok = ok && report.stability_delta <= report.stability_threshold;
    report.status = ok ? CheckStatus::pass : CheckStatus::fail;
}

BoundReport merge_refinement(const BoundReport& coarse, const BoundReport& fine,
                             const std::vector<std::string>& must_be_positive, double threshold) {
    BoundReport r = fine;
    r.stability_threshold = threshold;
    double delta = 0.0;
    for (const auto& c : coarse.constants) {
        const double f = fine.constant(c.name);
        r.constants.push_back({c.name + "_coarse", c.value});
        delta = std::max(delta, relative_change(c.value, f));
    }
    r.stability_delta = delta;
    finalize(r, must_be_positive);
    return r;
}

}  // namespace stablekernel
