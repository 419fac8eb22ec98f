#pragma once

#include "collapse_kaon/core.hpp"
#include "collapse_kaon/theta_polynomial.hpp"

namespace collapse_kaon::analytic {

// Closed-form second-order probabilities. Values are not clamped to [0, 1]:
// for theta0 != 1/2 the noise creates or destroys probability.

/// e^{-Gamma_mu t} [1 - (alpha/2)(lambda m^2/m_0^2)(2 theta0 - 1) t
///                  + (3 alpha^2/4)(lambda^2 m^4/m_0^4)(2 theta0 (theta0 - 1) + 1/2) t^2]
double survival_probability(MassState mu, const PhysicalParams& params, double theta0, double t);

/// P(K0 -> final) for final in {K0, K0bar}. Throws std::domain_error if m_L == m_S.
double oscillation_probability(Flavor final, const PhysicalParams& params, double theta0, double t);

/// Bracket of the survival formula as an exact polynomial in (theta0, t).
ThetaPolynomial survival_bracket(MassState mu, const PhysicalParams& params);

/// Bracket multiplying cos(delta_m t) in the oscillation formula.
ThetaPolynomial interference_bracket(const PhysicalParams& params);

/// Linear-in-t coefficient of the survival bracket, -(alpha/2)(lambda m^2/m_0^2)(2 theta0 - 1).
double survival_linear_coefficient(MassState mu, const PhysicalParams& params, double theta0);

/// t^2 coefficient of the survival bracket.
double survival_quadratic_coefficient(MassState mu, const PhysicalParams& params, double theta0);

}  // namespace collapse_kaon::analytic
