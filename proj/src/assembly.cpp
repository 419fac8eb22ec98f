#include "collapse_kaon/assembly.hpp"

#include "collapse_kaon/wick.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace collapse_kaon::assembly {

namespace {

Rational power(const Rational& base, int exponent) {
    Rational r(1);
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

const Rational& mass_of(MassState m, const ExactParams& p) { return m == MassState::S ? p.m_S : p.m_L; }

bool is_strangeness(Flavor f) { return f == Flavor::K0 || f == Flavor::K0bar; }

}  // namespace

Rational gaussian_moment(int n, const Rational& alpha) {
    if (n < 0) throw std::invalid_argument("gaussian_moment: negative order");
    if (alpha <= 0) throw std::invalid_argument("gaussian_moment: alpha must be > 0");
    if (n % 2 != 0) return Rational(0);
    Rational r(1);
    for (int k = n - 1; k > 0; k -= 2) r *= k;
    return r * power(alpha / 2, n / 2);
}

double gaussian_moment(int n, double alpha) {
    if (n < 0) throw std::invalid_argument("gaussian_moment: negative order");
    if (!(alpha > 0)) throw std::invalid_argument("gaussian_moment: alpha must be > 0");
    if (n % 2 != 0) return 0.0;
    double r = 1.0;
    for (int k = n - 1; k > 0; k -= 2) r *= k;
    return r * std::pow(alpha / 2.0, n / 2);
}

ThetaPolynomial assemble_cross_term(const DysonCrossTerm& term, const PhysicalParams& params) {
    const int a = term.ket_order;
    const int b = term.bra_order;
    if (a < 0 || b < 0) throw std::invalid_argument("assemble_cross_term: negative Dyson order");
    if ((a + b) % 2 != 0) return {};

    const ExactParams p = ExactParams::from(params);
    // (-i)^a (+i)^b = (-i)^(a-b) is real because a - b is even
    const int phase = ((a - b) / 2) % 2 == 0 ? 1 : -1;
    Rational prefactor = Rational(phase) * power(p.lambda, (a + b) / 2) *
                         power(mass_of(term.ket_mass, p) / p.m_0, a) *
                         power(mass_of(term.bra_mass, p) / p.m_0, b) *
                         gaussian_moment(a + b, p.alpha);
    if (prefactor == 0) return {};
    return wick::wick_sum({a, b}) * prefactor;
}

ThetaPolynomial branch_polynomial(MassState ket, MassState bra, const PhysicalParams& params,
                                  int max_order) {
    ThetaPolynomial sum;
    for (int a = 0; a <= max_order; ++a) {
        for (int b = 0; a + b <= max_order; ++b) {
            if ((a + b) % 2 != 0) continue;
            sum += assemble_cross_term({a, b, ket, bra}, params);
        }
    }
    return sum;
}

double ProbabilitySeries::evaluate(double theta0, double t) const {
    double sum = 0.0;
    for (const auto& c : components_) {
        sum += to_double(c.weight) * std::cos(c.frequency * t) * c.poly.evaluate(theta0, t) *
               std::exp(-c.decay_rate * t);
    }
    return sum;
}

ProbabilitySeries ProbabilitySeries::simplified() const {
    std::map<std::pair<double, double>, ThetaPolynomial> merged;
    for (const auto& c : components_) {
        merged[{std::abs(c.frequency), c.decay_rate}] += c.poly * c.weight;
    }
    std::vector<SeriesComponent> out;
    for (auto& [key, poly] : merged) {
        if (poly.is_zero()) continue;
        out.push_back({Rational(1), key.first, key.second, std::move(poly)});
    }
    return ProbabilitySeries(std::move(out));
}

ProbabilitySeries ProbabilitySeries::substitute_theta(const Rational& theta0) const {
    auto out = components_;
    for (auto& c : out) c.poly = c.poly.substitute_theta(theta0);
    return ProbabilitySeries(std::move(out));
}

ProbabilitySeries operator+(const ProbabilitySeries& a, const ProbabilitySeries& b) {
    auto out = a.components_;
    out.insert(out.end(), b.components_.begin(), b.components_.end());
    return ProbabilitySeries(std::move(out));
}

ProbabilitySeries assemble_survival(MassState mu, const PhysicalParams& params) {
    params.validate();
    return ProbabilitySeries(
        {{Rational(1), 0.0, width_of(mu, params), branch_polynomial(mu, mu, params)}});
}

ProbabilitySeries assemble_oscillation(Flavor initial, Flavor final, const PhysicalParams& params) {
    params.validate();
    if (!is_strangeness(initial) || !is_strangeness(final)) {
        throw std::invalid_argument("assemble_oscillation: initial and final must be K0 or K0bar");
    }
    if (params.m_L == params.m_S) {
        throw std::domain_error("assemble_oscillation: m_L == m_S, no oscillation");
    }
    // c_mu, d_mu are real +-1/sqrt2, so every weight d_mu c_mu d_nu c_nu is +-1/4
    auto sign = [](Flavor f, MassState m) {
        return (f == Flavor::K0bar && m == MassState::L) ? -1 : 1;
    };
    std::vector<SeriesComponent> components;
    for (MassState mu : {MassState::S, MassState::L}) {
        for (MassState nu : {MassState::S, MassState::L}) {
            const int s = sign(initial, mu) * sign(final, mu) * sign(initial, nu) * sign(final, nu);
            components.push_back({Rational(s, 4), mass_of(mu, params) - mass_of(nu, params),
                                  0.5 * (width_of(mu, params) + width_of(nu, params)),
                                  branch_polynomial(mu, nu, params)});
        }
    }
    return ProbabilitySeries(std::move(components));
}

}  // namespace collapse_kaon::assembly
