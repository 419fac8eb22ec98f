#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <complex>
#include <string>
#include <string_view>

namespace collapse_kaon {

/// Exact rational with arbitrary-precision numerator and denominator.
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

/// Exact rational value of a finite double (every double is a dyadic rational).
Rational to_rational(double x);

/// Rounds to the nearest double.
double to_double(const Rational& r);

/// "num/den" form; integers are printed as "num/1".
std::string to_fraction_string(const Rational& r);

/// Parses "num/den" or "num".
Rational parse_fraction(std::string_view text);

/**
 * @brief Physical parameters of the two-state kaon system (hbar = c = 1).
 *
 * Masses are in energy units, widths in inverse time, lambda in
 * 1/(length^2 time) and alpha (the squared wave-packet width) in length^2.
 * The defaults are a dimensionless desk-scale set; real kaon masses differ
 * by one part in 10^14 and are useless at double precision.
 */
struct PhysicalParams {
    double m_S = 0.95;
    double m_L = 1.05;
    double m_0 = 1.0;
    double Gamma_S = 0.6;
    double Gamma_L = 0.001;
    double lambda = 0.1;
    double alpha = 1.0;
    double p_i = 0.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// m_L - m_S
    double delta_m() const { return m_L - m_S; }

    bool operator==(const PhysicalParams&) const = default;
};

/// Exact images of the parameters used by the symbolic paths.
struct ExactParams {
    Rational m_S, m_L, m_0, lambda, alpha;

    static ExactParams from(const PhysicalParams& p);
};

/**
 * @brief The value theta0 assigned to the Heaviside step at zero.
 *
 * Equivalently the mass a delta function assigns to the positive half-line
 * when it sits on an integration endpoint.
 */
class HeavisideConvention {
public:
    explicit HeavisideConvention(double theta0);

    static HeavisideConvention zero() { return HeavisideConvention(0.0); }
    static HeavisideConvention half() { return HeavisideConvention(0.5); }
    static HeavisideConvention one() { return HeavisideConvention(1.0); }

    double value() const { return theta0_; }

private:
    double theta0_;
};

enum class MassState { S, L };
enum class Flavor { K_S, K_L, K0, K0bar };

std::string_view to_string(MassState m);
std::string_view to_string(Flavor f);
Flavor parse_flavor(std::string_view name);

/// Mass of a mass eigenstate.
double mass_of(MassState m, const PhysicalParams& p);
double width_of(MassState m, const PhysicalParams& p);

/// Coefficients (c_S, c_L) of a flavor state in the {K_S, K_L} basis.
/// Uses K0 = (K_S + K_L)/sqrt2 and K0bar = (K_S - K_L)/sqrt2.
std::array<Complex, 2> to_mass_basis(Flavor f);

}  // namespace collapse_kaon
