#pragma once

#include "collapse_kaon/config.hpp"
#include "collapse_kaon/table.hpp"

#include <optional>

namespace collapse_kaon::cli {

/// Scheme used for a theta0 row: the configured one, or in auto mode the scheme
/// realizing theta0 (none for theta0 outside {0, 1/2, 1}).
std::optional<montecarlo::Scheme> scheme_for(const RunConfig& config, double theta0);

/**
 * Analytic formula, assembled series and Monte Carlo side by side, one row per
 * (theta0, t). Oscillation columns are NaN when m_L == m_S, MC columns are NaN
 * when no scheme realizes theta0. Throws montecarlo::OverflowError if any
 * trajectory diverged.
 */
Table cmd_compare(const RunConfig& config);

/// Per-term breakdown of the assembled series at every (theta0, t): each Dyson
/// cross term's exact polynomial and its value.
Table compare_breakdown(const RunConfig& config);

/// MC time series of every observable (mean and standard error) per scheme.
Table cmd_simulate(const RunConfig& config);

/// Survival and interference coefficients plus probabilities at t_max per theta0.
Table cmd_sweep_theta(const RunConfig& config);

/// Every layout with 2 <= a + b <= max_order, every pairing, and the nonzero
/// coefficients of its integral; zero integrals get a single "0/1" row.
Table cmd_wick_table(int max_order);

std::string render(const Table& table, OutputFormat format);

}  // namespace collapse_kaon::cli
