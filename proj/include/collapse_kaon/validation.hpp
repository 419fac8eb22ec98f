#pragma once

#include "collapse_kaon/table.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace collapse_kaon::validation {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    /// Trajectories per scheme for the scheme/theta0 correspondence check.
    std::size_t mc_trajectories = 100000;
    /// 0 = COLLAPSE_KAON_THREADS or hardware concurrency.
    unsigned threads = 0;
};

inline constexpr int kCriterionCount = 8;

/// Runs one criterion (1..8). Exceptions are caught and reported as failures.
CriterionResult run_criterion(int id, const ValidationOptions& options = {});

std::vector<CriterionResult> run_all(const ValidationOptions& options = {});

bool all_passed(const std::vector<CriterionResult>& results);

/// One line per criterion: "PASS  [1] name (0.42 s): detail".
std::string format_line(const CriterionResult& r);

Table summary_table(const std::vector<CriterionResult>& results);

/// {"passed": bool, "criteria": [...], "failures": [...]}
std::string report_json(const std::vector<CriterionResult>& results);

}  // namespace collapse_kaon::validation
