#pragma once

#include "collapse_kaon/core.hpp"
#include "collapse_kaon/theta_polynomial.hpp"

#include <vector>

namespace collapse_kaon::assembly {

/// <q^n> for the packet density (pi alpha)^(-1/2) exp(-q^2/alpha): zero for odd n,
/// (n-1)!! (alpha/2)^(n/2) for even n.
Rational gaussian_moment(int n, const Rational& alpha);
double gaussian_moment(int n, double alpha);

/// One product E[T^(a) T^(b)*] of Dyson amplitudes on the (ket, bra) mass branches.
struct DysonCrossTerm {
    int ket_order = 0;
    int bra_order = 0;
    MassState ket_mass = MassState::S;
    MassState bra_mass = MassState::S;
};

/**
 * @brief Contribution of one Dyson cross term, summed over final momenta.
 *
 * (-i)^a (+i)^b lambda^((a+b)/2) (m_ket/m_0)^a (m_bra/m_0)^b <q^(a+b)> times the
 * Wick sum over pairings of layout (a, b). Momentum completeness turns the
 * final-state sum into the packet moment <q^(a+b)>. Odd a+b gives zero.
 */
ThetaPolynomial assemble_cross_term(const DysonCrossTerm& term, const PhysicalParams& params);

/// Sum of all cross terms with a + b <= max_order on one branch pair.
ThetaPolynomial branch_polynomial(MassState ket, MassState bra, const PhysicalParams& params,
                                  int max_order = 4);

/// weight * cos(frequency t) * poly(theta0, t) * exp(-decay_rate t)
struct SeriesComponent {
    Rational weight;
    double frequency = 0.0;
    double decay_rate = 0.0;
    ThetaPolynomial poly;
};

class ProbabilitySeries {
public:
    ProbabilitySeries() = default;
    explicit ProbabilitySeries(std::vector<SeriesComponent> components)
        : components_(std::move(components)) {}

    const std::vector<SeriesComponent>& components() const { return components_; }

    double evaluate(double theta0, double t) const;

    /// Folds weights into polynomials and merges components sharing
    /// (|frequency|, decay_rate); zero components are dropped.
    ProbabilitySeries simplified() const;

    ProbabilitySeries substitute_theta(const Rational& theta0) const;

    friend ProbabilitySeries operator+(const ProbabilitySeries& a, const ProbabilitySeries& b);

private:
    std::vector<SeriesComponent> components_;
};

/// P(K_mu -> K_mu) to second order in lambda with decay envelope exp(-Gamma_mu t).
ProbabilitySeries assemble_survival(MassState mu, const PhysicalParams& params);

/// P(initial -> final) for strangeness states. Throws std::domain_error if m_L == m_S.
ProbabilitySeries assemble_oscillation(Flavor initial, Flavor final, const PhysicalParams& params);

}  // namespace collapse_kaon::assembly
