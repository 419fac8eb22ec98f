#include "collapse_kaon/core.hpp"

#include <cmath>
#include <stdexcept>

namespace collapse_kaon {

namespace mp = boost::multiprecision;

Rational to_rational(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("to_rational: non-finite value");
    }
    if (x == 0.0) {
        return Rational(0);
    }
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    Rational r{mp::cpp_int(scaled)};
    const int shift = exponent - 53;
    mp::cpp_int pow2 = mp::cpp_int(1) << std::abs(shift);
    if (shift >= 0) {
        r *= Rational(pow2);
    } else {
        r /= Rational(pow2);
    }
    return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_fraction_string(const Rational& r) {
    return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

Rational parse_fraction(std::string_view text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos) {
            return Rational(mp::cpp_int(std::string(text)));
        }
        mp::cpp_int num(std::string(text.substr(0, slash)));
        mp::cpp_int den(std::string(text.substr(slash + 1)));
        if (den == 0) {
            throw std::invalid_argument("zero denominator");
        }
        return Rational(num, den);
    } catch (const std::exception& e) {
        throw std::invalid_argument("parse_fraction: bad rational '" + std::string(text) +
                                    "': " + e.what());
    }
}

void PhysicalParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("invalid parameter: ") + what);
        }
    };
    const double all[] = {m_S, m_L, m_0, Gamma_S, Gamma_L, lambda, alpha, p_i};
    for (double v : all) {
        require(std::isfinite(v), "all parameters must be finite");
    }
    require(m_S > 0, "m_S must be > 0");
    require(m_L > 0, "m_L must be > 0");
    require(m_0 > 0, "m_0 must be > 0");
    require(lambda >= 0, "lambda must be >= 0");
    require(alpha > 0, "alpha must be > 0");
    require(Gamma_S >= 0, "Gamma_S must be >= 0");
    require(Gamma_L >= 0, "Gamma_L must be >= 0");
}

ExactParams ExactParams::from(const PhysicalParams& p) {
    return {to_rational(p.m_S), to_rational(p.m_L), to_rational(p.m_0), to_rational(p.lambda),
            to_rational(p.alpha)};
}

HeavisideConvention::HeavisideConvention(double theta0) : theta0_(theta0) {
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) {
        throw std::invalid_argument("theta0 must lie in [0, 1]");
    }
}

std::string_view to_string(MassState m) { return m == MassState::S ? "S" : "L"; }

std::string_view to_string(Flavor f) {
    switch (f) {
        case Flavor::K_S: return "K_S";
        case Flavor::K_L: return "K_L";
        case Flavor::K0: return "K0";
        case Flavor::K0bar: return "K0bar";
    }
    return "?";
}

Flavor parse_flavor(std::string_view name) {
    if (name == "K_S") return Flavor::K_S;
    if (name == "K_L") return Flavor::K_L;
    if (name == "K0") return Flavor::K0;
    if (name == "K0bar") return Flavor::K0bar;
    throw std::invalid_argument("unknown flavor '" + std::string(name) + "'");
}

double mass_of(MassState m, const PhysicalParams& p) { return m == MassState::S ? p.m_S : p.m_L; }

double width_of(MassState m, const PhysicalParams& p) {
    return m == MassState::S ? p.Gamma_S : p.Gamma_L;
}

std::array<Complex, 2> to_mass_basis(Flavor f) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (f) {
        case Flavor::K_S: return {Complex(1.0), Complex(0.0)};
        case Flavor::K_L: return {Complex(0.0), Complex(1.0)};
        case Flavor::K0: return {Complex(h), Complex(h)};
        case Flavor::K0bar: return {Complex(h), Complex(-h)};
    }
    throw std::invalid_argument("to_mass_basis: invalid flavor");
}

}  // namespace collapse_kaon
