#include "collapse_kaon/validation.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

using namespace collapse_kaon::validation;

int main(int argc, char** argv) {
    ValidationOptions options;
    // optional: acceptance [trajectories]
    if (argc > 1) options.mc_trajectories = std::stoull(argv[1]);

    std::vector<CriterionResult> results;
    for (int id = 1; id <= kCriterionCount; ++id) {
        results.push_back(run_criterion(id, options));
        std::cout << format_line(results.back()) << std::endl;
    }
    const bool ok = all_passed(results);
    std::cout << (ok ? "acceptance: all " : "acceptance: NOT all ") << kCriterionCount
              << " criteria passed" << std::endl;
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
