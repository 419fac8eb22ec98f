#include "collapse_kaon/wick.hpp"

#include <catch_amalgamated.hpp>

using namespace collapse_kaon;
using namespace collapse_kaon::wick;

namespace {

long double_factorial(int n) { return n <= 1 ? 1 : n * double_factorial(n - 2); }

ThetaPolynomial th() { return ThetaPolynomial::theta(); }
ThetaPolynomial t() { return ThetaPolynomial::t(); }

}  // namespace

TEST_CASE("pairing counts", "[wick]") {
    for (int n = 0; n <= 8; ++n) {
        for (int n_ket = 0; n_ket <= n; ++n_ket) {
            const auto pairings = enumerate_pairings({n_ket, n - n_ket});
            const std::size_t expected = n % 2 ? 0 : static_cast<std::size_t>(double_factorial(n - 1));
            CHECK(pairings.size() == expected);
            for (const auto& p : pairings) CHECK_NOTHROW(check_pairing({n_ket, n - n_ket}, p));
        }
    }
    CHECK(enumerate_pairings({1, 0}).empty());
    CHECK(enumerate_pairings({2, 0}).size() == 1);
}

TEST_CASE("pairings are in lexicographic order", "[wick]") {
    const auto p = enumerate_pairings({4, 0});
    REQUIRE(p.size() == 3);
    CHECK(p[0].to_string() == "(12)(34)");
    CHECK(p[1].to_string() == "(13)(24)");
    CHECK(p[2].to_string() == "(14)(23)");
    CHECK(BranchLayout{3, 1}.to_string() == "(3,1)");
}

TEST_CASE("inconsistent pairings are rejected", "[wick]") {
    const BranchLayout layout{2, 2};
    CHECK_THROWS_AS(check_pairing(layout, WickPairing{{{0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(check_pairing(layout, WickPairing{{{0, 1}, {1, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(check_pairing(layout, WickPairing{{{0, 1}, {2, 4}}}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_simplex_delta_integral(layout, WickPairing{{{0, 0}, {2, 3}}}),
                    std::invalid_argument);
}

TEST_CASE("delta integral examples", "[wick]") {
    CHECK(evaluate_simplex_delta_integral({4, 0}, WickPairing{{{0, 1}, {2, 3}}}) ==
          th() * th() * t() * t() * Rational(1, 2));
    CHECK(evaluate_simplex_delta_integral({1, 1}, WickPairing{{{0, 1}}}) == t());
    CHECK(evaluate_simplex_delta_integral({2, 0}, WickPairing{{{0, 1}}}) == th() * t());
    CHECK(evaluate_simplex_delta_integral({4, 0}, WickPairing{{{0, 2}, {1, 3}}}).is_zero());
    CHECK(evaluate_simplex_delta_integral({0, 0}, WickPairing{}) == ThetaPolynomial(1));
}

TEST_CASE("wick sums per layout", "[wick]") {
    const auto half = ThetaPolynomial(Rational(1, 2));
    CHECK(wick_sum({2, 0}) == th() * t());
    CHECK(wick_sum({0, 2}) == th() * t());
    CHECK(wick_sum({1, 1}) == t());
    CHECK(wick_sum({4, 0}) == th() * th() * t() * t() * half);
    CHECK(wick_sum({3, 1}) == th() * t() * t());
    CHECK(wick_sum({2, 2}) == th() * th() * t() * t() + t() * t() * half);
    CHECK(wick_sum({1, 3}) == th() * t() * t());
    CHECK(wick_sum({0, 4}) == th() * th() * t() * t() * half);
    CHECK(wick_sum({3, 0}).is_zero());
}

TEST_CASE("integrals are homogeneous of degree n/2 in t", "[wick]") {
    for (int n : {2, 4, 6}) {
        for (int n_ket = 0; n_ket <= n; ++n_ket) {
            const BranchLayout layout{n_ket, n - n_ket};
            for (const auto& p : enumerate_pairings(layout)) {
                const auto poly = evaluate_simplex_delta_integral(layout, p);
                for (double theta0 : {0.25, 0.5, 1.0}) {
                    const double a = poly.evaluate(theta0, 0.7);
                    const double b = poly.evaluate(theta0, 1.4);
                    CHECK(b == Catch::Approx(a * std::pow(2.0, n / 2)).margin(1e-15));
                }
            }
        }
    }
}

TEST_CASE("oracle examples", "[wick]") {
    CHECK(extrapolated_oracle({2, 0}, WickPairing{{{0, 1}}}, 0.5, 1.0).value ==
          Catch::Approx(0.5).epsilon(1e-6));
    CHECK(extrapolated_oracle({4, 0}, WickPairing{{{0, 1}, {2, 3}}}, 1.0, 1.0).value ==
          Catch::Approx(0.5).epsilon(1e-6));
    for (double theta0 : {0.0, 0.3, 1.0}) {
        CHECK(extrapolated_oracle({1, 1}, WickPairing{{{0, 1}}}, theta0, 1.0).value ==
              Catch::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("raw oracle approaches the limit as the bump narrows", "[wick]") {
    const BranchLayout layout{2, 0};
    const WickPairing pairing{{{0, 1}}};
    const double coarse = std::abs(quadrature_oracle(layout, pairing, 0.25, 1.0, 1e-2) - 0.25);
    const double fine = std::abs(quadrature_oracle(layout, pairing, 0.25, 1.0, 1e-3) - 0.25);
    CHECK(fine < coarse);
}

TEST_CASE("symbolic integrals agree with the oracle up to order 4", "[wick]") {
    for (int n : {2, 4}) {
        for (int n_ket = 0; n_ket <= n; ++n_ket) {
            const BranchLayout layout{n_ket, n - n_ket};
            for (const auto& p : enumerate_pairings(layout)) {
                const auto exact = evaluate_simplex_delta_integral(layout, p);
                for (double theta0 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                    for (double tt : {0.5, 1.0, 2.0}) {
                        const double e = exact.evaluate(theta0, tt);
                        const double o = extrapolated_oracle(layout, p, theta0, tt).value;
                        const double scale = std::max(std::abs(e), std::pow(tt, n / 2));
                        INFO(layout.to_string() << " " << p.to_string() << " theta0=" << theta0
                                                << " t=" << tt);
                        CHECK(std::abs(o - e) <= 1e-3 * scale);
                    }
                }
            }
        }
    }
}

TEST_CASE("wick sums match the Gaussian generating function to order 8", "[wick]") {
    // sum_{a,b} (i k1 x)^a (-i k2 x)^b W(a,b) = exp(t x^2 [k1 k2 - theta0 (k1^2 + k2^2)]), so
    // W(a,b) = t^k/k! sum over p+q+r=k, 2p+r=a, 2q+r=b of k!/(p! q! r!) theta0^(p+q)
    auto factorial = [](int n) {
        Rational f(1);
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    for (int k = 1; k <= 4; ++k) {
        for (int a = 0; a <= 2 * k; ++a) {
            const int b = 2 * k - a;
            ThetaPolynomial expected;
            for (int r = 0; r <= k; ++r) {
                if ((a - r) % 2 || (b - r) % 2 || a < r || b < r) continue;
                const int p = (a - r) / 2, q = (b - r) / 2;
                if (p + q + r != k) continue;
                expected += ThetaPolynomial::monomial(
                    factorial(k) / (factorial(p) * factorial(q) * factorial(r)) / factorial(k), k,
                    p + q);
            }
            INFO("layout (" << a << "," << b << ")");
            CHECK(wick_sum({a, b}) == expected);
        }
    }
}
