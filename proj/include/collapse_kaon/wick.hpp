#pragma once

#include "collapse_kaon/theta_polynomial.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace collapse_kaon::wick {

/**
 * @brief Time variables of one Dyson cross term.
 *
 * The ket chain is ordered t >= t_1 >= ... >= t_{n_ket} >= 0 and the bra chain
 * t >= s_1 >= ... >= s_{n_bra} >= 0 independently. Variables are labelled
 * 0..n_ket-1 for the ket chain followed by n_ket..n-1 for the bra chain.
 */
struct BranchLayout {
    int n_ket = 0;
    int n_bra = 0;

    int total() const { return n_ket + n_bra; }
    bool is_ket(int label) const { return label < n_ket; }

    /// Chain parent (the enclosing upper limit) of a variable, or -1 for t.
    int parent(int label) const;

    /// "(4,0)"
    std::string to_string() const;

    bool operator==(const BranchLayout&) const = default;
};

/// A perfect matching of the layout's variables; each pair is (lower, higher) label.
struct WickPairing {
    std::vector<std::pair<int, int>> pairs;

    /// "(12)(34)" with 1-based labels; labels are comma separated when n > 9.
    std::string to_string() const;

    bool operator==(const WickPairing&) const = default;
};

/// All (n-1)!! pairings in lexicographic order of their sorted pair lists.
/// Odd totals have no pairings.
std::vector<WickPairing> enumerate_pairings(const BranchLayout& layout);

/// Throws std::invalid_argument unless the pairing is a perfect matching of the layout.
void check_pairing(const BranchLayout& layout, const WickPairing& pairing);

/**
 * @brief Exact nested integral of a product of deltas over the branch simplices.
 *
 * Integrates innermost variables first. A delta pinning a variable strictly
 * inside its range contributes 1, at a range endpoint theta0, and outside 0.
 * Non-delta variables are integrated exactly over piecewise-polynomial
 * integrands; sets pinned to measure zero without delta support vanish.
 */
ThetaPolynomial evaluate_simplex_delta_integral(const BranchLayout& layout,
                                                const WickPairing& pairing);

/// Sum of evaluate_simplex_delta_integral over every pairing of the layout.
ThetaPolynomial wick_sum(const BranchLayout& layout);

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Numerical value of the same integral with every delta replaced by the
 * asymmetric bump (theta0/eps) 1[0 < x < eps] + ((1 - theta0)/eps) 1[-eps < x <= 0],
 * where x is (first label) - (second label) of the pair.
 *
 * Nested Gauss-Legendre quadrature on pieces cut at every fixed value offset by
 * multiples of eps, so the regularized integral is resolved to roundoff.
 */
double quadrature_oracle(const BranchLayout& layout, const WickPairing& pairing, double theta0,
                         double t, double epsilon);

struct OracleOptions {
    /// Largest bump width as a fraction of t.
    double relative_epsilon = 1e-2;
    /// Allowed relative disagreement between successive extrapolations.
    double tolerance = 1e-9;
};

struct OracleEstimate {
    double value = 0.0;
    double previous = 0.0;               ///< extrapolation with one level fewer
    std::vector<double> epsilons;
    std::vector<double> raw;             ///< oracle value at each epsilon
};

/**
 * The regularized integral is a polynomial of degree n/2 in eps for small eps,
 * so polynomial extrapolation to eps = 0 over halving bump widths removes the
 * regularization. Throws ConvergenceError when two successive extrapolations
 * disagree beyond the tolerance.
 */
OracleEstimate extrapolated_oracle(const BranchLayout& layout, const WickPairing& pairing,
                                   double theta0, double t, const OracleOptions& options = {});

}  // namespace collapse_kaon::wick
