#include "collapse_kaon/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace collapse_kaon::analytic {

double survival_linear_coefficient(MassState mu, const PhysicalParams& p, double theta0) {
    const double m = mass_of(mu, p);
    return -(p.alpha / 2.0) * (p.lambda * m * m / (p.m_0 * p.m_0)) * (2.0 * theta0 - 1.0);
}

double survival_quadratic_coefficient(MassState mu, const PhysicalParams& p, double theta0) {
    const double m2 = mass_of(mu, p) * mass_of(mu, p);
    const double m02 = p.m_0 * p.m_0;
    return (3.0 * p.alpha * p.alpha / 4.0) * (p.lambda * p.lambda * m2 * m2 / (m02 * m02)) *
           (2.0 * theta0 * (theta0 - 1.0) + 0.5);
}

double survival_probability(MassState mu, const PhysicalParams& p, double theta0, double t) {
    if (t < 0) throw std::invalid_argument("survival_probability: t < 0");
    const double bracket = 1.0 + survival_linear_coefficient(mu, p, theta0) * t +
                           survival_quadratic_coefficient(mu, p, theta0) * t * t;
    return bracket * std::exp(-width_of(mu, p) * t);
}

double oscillation_probability(Flavor final, const PhysicalParams& p, double theta0, double t) {
    if (t < 0) throw std::invalid_argument("oscillation_probability: t < 0");
    if (final != Flavor::K0 && final != Flavor::K0bar) {
        throw std::invalid_argument("oscillation_probability: final must be K0 or K0bar");
    }
    if (p.m_L == p.m_S) {
        throw std::domain_error("oscillation_probability: m_L == m_S, no oscillation");
    }
    const double mL = p.m_L;
    const double mS = p.m_S;
    const double m02 = p.m_0 * p.m_0;
    const double eL = std::exp(-p.Gamma_L * t);
    const double eS = std::exp(-p.Gamma_S * t);
    const double th = theta0;
    const double sign = final == Flavor::K0 ? 1.0 : -1.0;

    const double diagonal =
        eL + eS -
        0.5 * (p.lambda / m02) * p.alpha * t * (mL * mL * eL + mS * mS * eS) * (2.0 * th - 1.0) +
        0.75 * (p.lambda * p.lambda / (m02 * m02)) * p.alpha * p.alpha * t * t *
            (std::pow(mL, 4) * eL + std::pow(mS, 4) * eS) * (2.0 * th * (th - 1.0) + 0.5);

    const double bracket =
        1.0 - 0.5 * (p.lambda / m02) * p.alpha * t * ((mL * mL + mS * mS) * th - mL * mS) +
        0.375 * (p.lambda * p.lambda / (m02 * m02)) * p.alpha * p.alpha * t * t *
            ((std::pow(mL, 4) + std::pow(mS, 4)) * th * th -
             2.0 * mL * mS * (mL * mL + mS * mS) * th + 2.0 * mL * mL * mS * mS * (th * th + 0.5));

    const double interference =
        2.0 * bracket * std::cos((mL - mS) * t) * std::exp(-0.5 * (p.Gamma_L + p.Gamma_S) * t);
    return 0.25 * (diagonal + sign * interference);
}

ThetaPolynomial survival_bracket(MassState mu, const PhysicalParams& params) {
    const ExactParams p = ExactParams::from(params);
    const Rational& m = mu == MassState::S ? p.m_S : p.m_L;
    const Rational m2 = m * m / (p.m_0 * p.m_0);
    const auto th = ThetaPolynomial::theta();
    const auto t = ThetaPolynomial::t();

    ThetaPolynomial linear = (th * Rational(2) - Rational(1)) * t *
                             (-(p.alpha / 2) * p.lambda * m2);
    ThetaPolynomial quadratic = (th * (th - Rational(1)) * Rational(2) + Rational(1, 2)) * t * t *
                                (Rational(3) * p.alpha * p.alpha / 4 * p.lambda * p.lambda * m2 * m2);
    return ThetaPolynomial(1) + linear + quadratic;
}

ThetaPolynomial interference_bracket(const PhysicalParams& params) {
    const ExactParams p = ExactParams::from(params);
    const Rational& mL = p.m_L;
    const Rational& mS = p.m_S;
    const Rational m02 = p.m_0 * p.m_0;
    const auto th = ThetaPolynomial::theta();
    const auto t = ThetaPolynomial::t();

    ThetaPolynomial linear = (th * (mL * mL + mS * mS) - ThetaPolynomial(mL * mS)) * t *
                             (-Rational(1, 2) * p.lambda / m02 * p.alpha);
    ThetaPolynomial inner = th * th * (mL * mL * mL * mL + mS * mS * mS * mS) -
                            th * (Rational(2) * mL * mS * (mL * mL + mS * mS)) +
                            (th * th + Rational(1, 2)) * (Rational(2) * mL * mL * mS * mS);
    ThetaPolynomial quadratic =
        inner * t * t * (Rational(3, 8) * p.lambda * p.lambda / (m02 * m02) * p.alpha * p.alpha);
    return ThetaPolynomial(1) + linear + quadratic;
}

}  // namespace collapse_kaon::analytic
