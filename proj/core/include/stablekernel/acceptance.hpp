#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stablekernel/model.hpp"

namespace stablekernel {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<NamedValue> values;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::function<void(const CriterionResult&)> on_result;  ///< called as each criterion finishes
    std::function<void(const std::string&)> on_progress;
    std::size_t mc_paths = 200000;
    std::uint64_t seed = 20240611;
};

/// The acceptance criteria 1..12 with their pinned tolerances. Criteria share the expensive
/// parametrix runs, so running several at once is cheaper than one at a time.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opt = {});
const std::vector<std::string>& acceptance_names();

}  // namespace stablekernel
