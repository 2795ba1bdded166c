#pragma once

#include <limits>
#include <string>
#include <vector>

#include "stablekernel/model.hpp"

namespace stablekernel {

/// Measured counterpart of one inequality or identity.
///
/// `constants` holds the empirical constants (sup/inf ratios, residuals). When a refined
/// measurement exists, `stability_delta` is the largest relative change between the two
/// and must not exceed `stability_threshold` for the report to pass.
struct BoundReport {
    std::string id;
    std::vector<NamedValue> constants;
    double stability_delta = std::numeric_limits<double>::quiet_NaN();
    double stability_threshold = 0.05;
    CheckStatus status = CheckStatus::info;
    std::vector<NamedValue> witness;
    std::string note;

    double constant(const std::string& name) const;
    bool passed() const { return status == CheckStatus::pass; }
};

/// Relative change |b - a| / max(|a|, tiny).
double relative_change(double a, double b);

/// Set status from finiteness of all constants, optional positivity of named ones and the
/// stability delta (NaN delta means no refinement was measured).
void finalize(BoundReport& report, const std::vector<std::string>& must_be_positive = {});

/// Combine a coarse and a refined measurement of the same quantities.
BoundReport merge_refinement(const BoundReport& coarse, const BoundReport& fine,
                             const std::vector<std::string>& must_be_positive = {},
                             double threshold = 0.05);

}  // namespace stablekernel
