#include "collapse_kaon/theta_polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace collapse_kaon {

namespace {

Rational power(const Rational& base, int exponent) {
    Rational r(1);
    for (int i = 0; i < exponent; ++i) {
        r *= base;
    }
    return r;
}

}  // namespace

ThetaPolynomial::ThetaPolynomial(Rational constant) { add_term({0, 0}, constant); }

ThetaPolynomial ThetaPolynomial::monomial(Rational c, int t_power, int theta_power) {
    ThetaPolynomial p;
    p.add_term({t_power, theta_power}, c);
    return p;
}

void ThetaPolynomial::add_term(const Key& key, const Rational& c) {
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

Rational ThetaPolynomial::coefficient(int t_power, int theta_power) const {
    auto it = terms_.find({t_power, theta_power});
    return it == terms_.end() ? Rational(0) : it->second;
}

ThetaPolynomial ThetaPolynomial::t_coefficient(int t_power) const {
    ThetaPolynomial out;
    for (const auto& [key, c] : terms_) {
        if (key.first == t_power) {
            out.add_term({0, key.second}, c);
        }
    }
    return out;
}

int ThetaPolynomial::t_degree() const {
    int d = -1;
    for (const auto& [key, c] : terms_) d = std::max(d, key.first);
    return d;
}

int ThetaPolynomial::theta_degree() const {
    int d = -1;
    for (const auto& [key, c] : terms_) d = std::max(d, key.second);
    return d;
}

ThetaPolynomial& ThetaPolynomial::operator+=(const ThetaPolynomial& rhs) {
    for (const auto& [key, c] : rhs.terms_) add_term(key, c);
    return *this;
}

ThetaPolynomial& ThetaPolynomial::operator-=(const ThetaPolynomial& rhs) {
    for (const auto& [key, c] : rhs.terms_) add_term(key, -c);
    return *this;
}

ThetaPolynomial& ThetaPolynomial::operator*=(const ThetaPolynomial& rhs) {
    ThetaPolynomial out;
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : rhs.terms_) {
            out.add_term({ka.first + kb.first, ka.second + kb.second}, ca * cb);
        }
    }
    *this = std::move(out);
    return *this;
}

ThetaPolynomial& ThetaPolynomial::operator*=(const Rational& s) {
    if (s == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, c] : terms_) c *= s;
    return *this;
}

ThetaPolynomial ThetaPolynomial::integrate_t() const {
    ThetaPolynomial out;
    for (const auto& [key, c] : terms_) {
        out.add_term({key.first + 1, key.second}, c / (key.first + 1));
    }
    return out;
}

ThetaPolynomial ThetaPolynomial::substitute_theta(const Rational& theta0) const {
    ThetaPolynomial out;
    for (const auto& [key, c] : terms_) {
        out.add_term({key.first, 0}, c * power(theta0, key.second));
    }
    return out;
}

Rational ThetaPolynomial::evaluate_exact(const Rational& theta0, const Rational& t) const {
    Rational sum(0);
    for (const auto& [key, c] : terms_) {
        sum += c * power(theta0, key.second) * power(t, key.first);
    }
    return sum;
}

double ThetaPolynomial::evaluate(double theta0, double t) const {
    return to_double(evaluate_exact(to_rational(theta0), to_rational(t)));
}

std::string ThetaPolynomial::to_string() const {
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    // highest t power first reads more naturally
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [key, c] = *it;
        const bool negative = c < 0;
        const Rational mag = negative ? Rational(-c) : c;
        if (first) {
            if (negative) os << "-";
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        const bool unit = (mag == 1);
        bool need_star = false;
        if (!unit || (key.first == 0 && key.second == 0)) {
            os << mag.str();
            need_star = true;
        }
        if (key.second > 0) {
            os << (need_star ? "*" : "") << "th";
            if (key.second > 1) os << "^" << key.second;
            need_star = true;
        }
        if (key.first > 0) {
            os << (need_star ? "*" : "") << "t";
            if (key.first > 1) os << "^" << key.first;
        }
    }
    return os.str();
}

}  // namespace collapse_kaon
