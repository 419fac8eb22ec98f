#include "collapse_kaon/core.hpp"
#include "collapse_kaon/theta_polynomial.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace collapse_kaon;

TEST_CASE("mass basis coefficients", "[core]") {
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(to_mass_basis(Flavor::K_S) == std::array<Complex, 2>{1.0, 0.0});
    CHECK(to_mass_basis(Flavor::K_L) == std::array<Complex, 2>{0.0, 1.0});
    CHECK(to_mass_basis(Flavor::K0) == std::array<Complex, 2>{h, h});
    CHECK(to_mass_basis(Flavor::K0bar) == std::array<Complex, 2>{h, -h});
    for (Flavor f : {Flavor::K_S, Flavor::K_L, Flavor::K0, Flavor::K0bar}) {
        const auto c = to_mass_basis(f);
        CHECK(std::norm(c[0]) + std::norm(c[1]) == Catch::Approx(1.0).epsilon(1e-15));
        CHECK(parse_flavor(to_string(f)) == f);
    }
}

TEST_CASE("flavor transform is unitary", "[core]") {
    const auto k0 = to_mass_basis(Flavor::K0);
    const auto k0bar = to_mass_basis(Flavor::K0bar);
    // project K0 back onto the flavor basis
    const Complex on_k0 = std::conj(k0[0]) * k0[0] + std::conj(k0[1]) * k0[1];
    const Complex on_k0bar = std::conj(k0bar[0]) * k0[0] + std::conj(k0bar[1]) * k0[1];
    CHECK(std::abs(on_k0 - 1.0) < 1e-15);
    CHECK(std::abs(on_k0bar) < 1e-15);
}

TEST_CASE("parameter validation", "[core]") {
    PhysicalParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.delta_m() == Catch::Approx(0.1));
    p.m_S = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.lambda = -1e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.Gamma_L = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.m_L = p.m_S;  // allowed here, only oscillation rejects it
    CHECK_NOTHROW(p.validate());

    CHECK_THROWS_AS(HeavisideConvention(1.5), std::invalid_argument);
    CHECK_THROWS_AS(HeavisideConvention(-0.1), std::invalid_argument);
    CHECK(HeavisideConvention::half().value() == 0.5);
}

TEST_CASE("rational helpers", "[core]") {
    CHECK(to_rational(0.75) == Rational(3, 4));
    CHECK(to_rational(-0.1) != Rational(-1, 10));
    CHECK(to_double(to_rational(0.1)) == 0.1);
    CHECK(to_fraction_string(Rational(-6, 4)) == "-3/2");
    CHECK(to_fraction_string(Rational(5)) == "5/1");
    CHECK(parse_fraction("3/9") == Rational(1, 3));
    CHECK(parse_fraction("-7") == Rational(-7));
    CHECK_THROWS_AS(parse_fraction("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_fraction("x"), std::invalid_argument);
}

TEST_CASE("theta polynomial evaluation examples", "[core]") {
    const auto p = ThetaPolynomial::monomial(Rational(1, 2), 2, 2);
    CHECK(p.evaluate(1.0, 2.0) == 2.0);
    CHECK(p.evaluate(0.5, 2.0) == 0.5);
    CHECK(p.evaluate_exact(Rational(1, 3), Rational(3)) == Rational(1, 2));
    const ThetaPolynomial zero;
    CHECK(zero.is_zero());
    CHECK(zero.evaluate(0.3, 7.0) == 0.0);
    CHECK(p.to_string() == "1/2*th^2*t^2");
}

TEST_CASE("theta polynomial calculus", "[core]") {
    const auto t = ThetaPolynomial::t();
    const auto th = ThetaPolynomial::theta();
    const auto p = th * t + ThetaPolynomial(3);
    CHECK(p.integrate_t() == th * t * t * Rational(1, 2) + t * Rational(3));
    CHECK(p.substitute_theta(Rational(1, 2)) == t * Rational(1, 2) + ThetaPolynomial(3));
    CHECK(p.t_coefficient(1) == th);
    CHECK(p.t_degree() == 1);
    CHECK(p.theta_degree() == 1);
    CHECK((p - p).is_zero());
    CHECK(p.coefficient(0, 0) == 3);
}

namespace {

ThetaPolynomial random_polynomial(std::mt19937& rng) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<int> power(0, 3);
    ThetaPolynomial p;
    for (int i = 0; i < 4; ++i) {
        p += ThetaPolynomial::monomial(Rational(coeff(rng), den(rng)), power(rng), power(rng));
    }
    return p;
}

}  // namespace

TEST_CASE("theta polynomial ring laws hold exactly", "[core]") {
    std::mt19937 rng(12345);
    const ThetaPolynomial one(1);
    const ThetaPolynomial zero;
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_polynomial(rng);
        const auto b = random_polynomial(rng);
        const auto c = random_polynomial(rng);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK(a + zero == a);
        CHECK(a * one == a);
        CHECK((a * zero).is_zero());
        CHECK((a + (-a)).is_zero());
        // evaluation is a ring homomorphism
        const Rational th(1, 3), t(5, 2);
        CHECK((a * b).evaluate_exact(th, t) == a.evaluate_exact(th, t) * b.evaluate_exact(th, t));
    }
}
