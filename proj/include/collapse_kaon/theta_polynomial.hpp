#pragma once

#include "collapse_kaon/core.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace collapse_kaon {

/**
 * @brief Exact polynomial in time t whose coefficients are polynomials in theta0.
 *
 * value = sum over (k, j) of c[k][j] * theta0^j * t^k with rational c.
 * Zero coefficients are never stored, so structural equality is polynomial
 * equality.
 */
class ThetaPolynomial {
public:
    /// (t power k, theta0 power j)
    using Key = std::pair<int, int>;

    ThetaPolynomial() = default;
    ThetaPolynomial(Rational constant);  // NOLINT: implicit from scalars is convenient

    static ThetaPolynomial monomial(Rational c, int t_power, int theta_power);
    static ThetaPolynomial t() { return monomial(1, 1, 0); }
    static ThetaPolynomial theta() { return monomial(1, 0, 1); }

    const std::map<Key, Rational>& terms() const { return terms_; }
    Rational coefficient(int t_power, int theta_power) const;

    /// Coefficient of t^k as a theta0 polynomial.
    ThetaPolynomial t_coefficient(int t_power) const;

    bool is_zero() const { return terms_.empty(); }
    int t_degree() const;
    int theta_degree() const;

    ThetaPolynomial& operator+=(const ThetaPolynomial& rhs);
    ThetaPolynomial& operator-=(const ThetaPolynomial& rhs);
    ThetaPolynomial& operator*=(const ThetaPolynomial& rhs);
    ThetaPolynomial& operator*=(const Rational& s);

    friend ThetaPolynomial operator+(ThetaPolynomial a, const ThetaPolynomial& b) { return a += b; }
    friend ThetaPolynomial operator-(ThetaPolynomial a, const ThetaPolynomial& b) { return a -= b; }
    friend ThetaPolynomial operator*(ThetaPolynomial a, const ThetaPolynomial& b) { return a *= b; }
    friend ThetaPolynomial operator*(ThetaPolynomial a, const Rational& s) { return a *= s; }
    friend ThetaPolynomial operator*(const Rational& s, ThetaPolynomial a) { return a *= s; }
    ThetaPolynomial operator-() const { return *this * Rational(-1); }

    bool operator==(const ThetaPolynomial&) const = default;

    /// Definite integral in t from 0 to t.
    ThetaPolynomial integrate_t() const;

    /// Substitutes a fixed theta0, leaving a polynomial in t only.
    ThetaPolynomial substitute_theta(const Rational& theta0) const;

    Rational evaluate_exact(const Rational& theta0, const Rational& t) const;

    /// Exact evaluation of the double inputs, rounded once at the end.
    double evaluate(double theta0, double t) const;

    /// Human-readable form, e.g. "1/2*th^2*t^2 + t".
    std::string to_string() const;

private:
    void add_term(const Key& key, const Rational& c);

    std::map<Key, Rational> terms_;
};

}  // namespace collapse_kaon
