#include "collapse_kaon/analytic.hpp"
#include "collapse_kaon/assembly.hpp"

#include <catch_amalgamated.hpp>

using namespace collapse_kaon;
using namespace collapse_kaon::assembly;

namespace {

ThetaPolynomial th() { return ThetaPolynomial::theta(); }
ThetaPolynomial t() { return ThetaPolynomial::t(); }

PhysicalParams unit_params() {
    PhysicalParams p;
    p.m_S = 1.0;
    p.m_L = 1.5;
    p.m_0 = 1.0;
    p.lambda = 0.5;
    p.alpha = 1.0;
    return p;
}

}  // namespace

TEST_CASE("gaussian moments", "[assembly]") {
    CHECK(gaussian_moment(0, Rational(1)) == 1);
    CHECK(gaussian_moment(3, Rational(1)) == 0);
    CHECK(gaussian_moment(2, Rational(1)) == Rational(1, 2));
    CHECK(gaussian_moment(4, Rational(1)) == Rational(3, 4));
    CHECK(gaussian_moment(4, Rational(2)) == Rational(3));
    CHECK(gaussian_moment(2, 1.0) == 0.5);

    // against a plain Riemann sum of x^n (pi alpha)^(-1/2) exp(-x^2/alpha)
    for (int n : {2, 4, 6}) {
        const double alpha = 0.7;
        double sum = 0.0;
        const double h = 1e-3;
        for (double x = -12.0; x <= 12.0; x += h) {
            sum += std::pow(x, n) * std::exp(-x * x / alpha);
        }
        sum *= h / std::sqrt(M_PI * alpha);
        CHECK(gaussian_moment(n, alpha) == Catch::Approx(sum).epsilon(1e-9));
    }
}

TEST_CASE("cross term examples", "[assembly]") {
    const auto p = unit_params();  // m_S / m_0 = 1, lambda = 1/2, alpha = 1
    const Rational coupling = Rational(1, 2) * Rational(1, 2);  // lambda * <q^2>
    CHECK(assemble_cross_term({2, 0, MassState::S, MassState::S}, p) == -(th() * t()) * coupling);
    CHECK(assemble_cross_term({1, 1, MassState::S, MassState::S}, p) == t() * coupling);
    CHECK(assemble_cross_term({0, 0, MassState::S, MassState::S}, p) == ThetaPolynomial(1));
    CHECK(assemble_cross_term({1, 0, MassState::S, MassState::S}, p).is_zero());
    CHECK(assemble_cross_term({2, 1, MassState::S, MassState::L}, p).is_zero());
}

TEST_CASE("survival series equals the closed form exactly", "[assembly]") {
    for (const auto& p : {PhysicalParams{}, unit_params()}) {
        for (MassState mu : {MassState::S, MassState::L}) {
            const auto series = assemble_survival(mu, p);
            REQUIRE(series.components().size() == 1);
            const auto& c = series.components()[0];
            CHECK(c.poly == analytic::survival_bracket(mu, p));
            CHECK(c.decay_rate == width_of(mu, p));
            CHECK(c.frequency == 0.0);
        }
    }
}

TEST_CASE("survival boxed cases", "[assembly]") {
    const PhysicalParams p;
    const auto s = assemble_survival(MassState::S, p);
    for (double tt : {0.0, 0.5, 1.0, 3.0}) {
        CHECK(s.evaluate(0.5, tt) == Catch::Approx(std::exp(-p.Gamma_S * tt)).epsilon(1e-15));
    }
    // theta0 = 0: 1 + (1/2)(lambda m^2/m_0^2) alpha t + (3/8)(lambda^2 m^4/m_0^4) alpha^2 t^2
    const auto poly = s.components()[0].poly.substitute_theta(0);
    const ExactParams e = ExactParams::from(p);
    const Rational k = e.lambda * e.m_S * e.m_S / (e.m_0 * e.m_0);
    CHECK(poly == ThetaPolynomial(1) + t() * (k * e.alpha / 2) +
                      t() * t() * (Rational(3, 8) * k * k * e.alpha * e.alpha));

    PhysicalParams free = p;
    free.lambda = 0.0;
    CHECK(assemble_survival(MassState::L, free).components()[0].poly == ThetaPolynomial(1));
}

TEST_CASE("oscillation series", "[assembly]") {
    const PhysicalParams p;
    const auto same = assemble_oscillation(Flavor::K0, Flavor::K0, p);
    const auto other = assemble_oscillation(Flavor::K0, Flavor::K0bar, p);
    for (double theta0 : {0.0, 0.5, 1.0}) {
        CHECK(same.evaluate(theta0, 0.0) == Catch::Approx(1.0).epsilon(1e-15));
        CHECK(other.evaluate(theta0, 0.0) == Catch::Approx(0.0).margin(1e-15));
        for (double tt : {0.3, 1.0, 4.0}) {
            CHECK(same.evaluate(theta0, tt) ==
                  Catch::Approx(analytic::oscillation_probability(Flavor::K0, p, theta0, tt))
                      .epsilon(1e-13));
            CHECK(other.evaluate(theta0, tt) ==
                  Catch::Approx(analytic::oscillation_probability(Flavor::K0bar, p, theta0, tt))
                      .margin(1e-13));
        }
    }
    // K0bar start mirrors K0 start
    CHECK(assemble_oscillation(Flavor::K0bar, Flavor::K0bar, p).evaluate(0.3, 2.0) ==
          Catch::Approx(same.evaluate(0.3, 2.0)).epsilon(1e-14));

    PhysicalParams degenerate = p;
    degenerate.m_L = degenerate.m_S;
    CHECK_THROWS_AS(assemble_oscillation(Flavor::K0, Flavor::K0, degenerate), std::domain_error);
    CHECK_THROWS_AS(assemble_oscillation(Flavor::K0, Flavor::K_S, p), std::invalid_argument);
}

TEST_CASE("theta0 = 1/2 reductions of the interference bracket", "[assembly]") {
    const PhysicalParams p;
    const ExactParams e = ExactParams::from(p);
    const auto poly =
        branch_polynomial(MassState::S, MassState::L, p).substitute_theta(Rational(1, 2));
    const Rational dm = e.m_L - e.m_S;
    CHECK(poly.coefficient(1, 0) == -Rational(1, 4) * e.lambda * e.alpha * dm * dm);
    CHECK(poly.coefficient(2, 0) ==
          Rational(3, 8) * e.lambda * e.lambda * e.alpha * e.alpha * dm * dm * dm * dm / 4);
}

TEST_CASE("conservation at theta0 = 1/2 and the lambda = 0 sum rule", "[assembly]") {
    PhysicalParams p;
    p.Gamma_S = p.Gamma_L = 0.0;
    const auto sum = (assemble_oscillation(Flavor::K0, Flavor::K0, p) +
                      assemble_oscillation(Flavor::K0, Flavor::K0bar, p))
                         .substitute_theta(Rational(1, 2))
                         .simplified();
    REQUIRE(sum.components().size() == 1);
    CHECK(sum.components()[0].poly * sum.components()[0].weight == ThetaPolynomial(1));

    PhysicalParams q;
    q.lambda = 0.0;
    const auto total = assemble_oscillation(Flavor::K0, Flavor::K0, q) +
                       assemble_oscillation(Flavor::K0, Flavor::K0bar, q);
    for (double tt : {0.0, 0.7, 5.0, 20.0}) {
        CHECK(total.evaluate(0.2, tt) ==
              Catch::Approx(0.5 * (std::exp(-q.Gamma_S * tt) + std::exp(-q.Gamma_L * tt)))
                  .epsilon(1e-14));
    }
}

TEST_CASE("real cross terms pair with their conjugates", "[assembly]") {
    // (a, b) and (b, a) on the same branch give the same real polynomial
    const PhysicalParams p;
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; a + b <= 4; ++b) {
            CHECK(assemble_cross_term({a, b, MassState::S, MassState::S}, p) ==
                  assemble_cross_term({b, a, MassState::S, MassState::S}, p));
        }
    }
}
