#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "stablekernel/acceptance.hpp"

// Prints one line per acceptance criterion; exits nonzero if any criterion fails.
int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int i = 1; i <= 12; ++i) ids.push_back(i);

    stablekernel::AcceptanceOptions opt;
    opt.on_result = [](const stablekernel::CriterionResult& r) {
        std::printf("AC%-2d %-34s %s  (%.1fs)", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
        for (const auto& v : r.values) std::printf("  %s=%.4g", v.name.c_str(), v.value);
        if (!r.detail.empty()) std::printf("  [%s]", r.detail.c_str());
        std::printf("\n");
        std::fflush(stdout);
    };
    int failed = 0;
    for (const auto& r : stablekernel::run_acceptance(ids, opt))
        if (!r.pass) ++failed;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
    return failed == 0 ? 0 : 1;
}
