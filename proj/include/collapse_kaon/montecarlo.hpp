#pragma once

#include "collapse_kaon/core.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace collapse_kaon::montecarlo {

/**
 * Stochastic integration schemes for the random-Hamiltonian equation.
 *
 * The noise factor is evaluated at the left point (Ito, theta0 = 0), as the
 * exact unitary exponential (midpoint/Stratonovich, theta0 = 1/2) or
 * implicitly at the right point (theta0 = 1). ExactCharacteristic samples
 * the closed-form solution directly.
 */
enum class Scheme { LeftPoint, MidpointUnitary, RightPoint, ExactCharacteristic };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Heaviside value the scheme realizes.
double theta0_of(Scheme s);

struct GridSpec {
    int points = 512;
    /// Total extent; 0 selects 12 sqrt(alpha).
    double extent = 0.0;

    bool operator==(const GridSpec&) const = default;
};

/// Uniform midpoint grid over [-L/2, L/2] with the packet density sampled on it.
class Grid {
public:
    /// Throws std::invalid_argument unless dx <= sqrt(alpha)/10 and L >= 10 sqrt(alpha).
    Grid(const GridSpec& spec, const PhysicalParams& params);

    int size() const { return static_cast<int>(x_.size()); }
    double dx() const { return dx_; }
    double x(int g) const { return x_[g]; }
    const std::vector<double>& positions() const { return x_; }
    /// Unit-normalized packet (pi alpha)^(-1/4) exp(-x^2/(2 alpha)) exp(i p_i x).
    const std::vector<Complex>& packet() const { return packet_; }
    /// |packet|^2 dx
    const std::vector<double>& density() const { return density_; }

private:
    double dx_;
    std::vector<double> x_;
    std::vector<Complex> packet_;
    std::vector<double> density_;
};

struct TrajectoryState {
    std::vector<Complex> psi_S;
    std::vector<Complex> psi_L;
    double t = 0.0;
};

/// psi_mu(x) = c_mu packet(x) with (c_S, c_L) from the flavor.
TrajectoryState initial_state(const Grid& grid, Flavor flavor);

/// Sum |psi_S|^2 dx + |psi_L|^2 dx.
double norm2(const TrajectoryState& state, const Grid& grid);

class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Norm^2 above which a trajectory is treated as diverged.
inline constexpr double kOverflowNorm2 = 1e6;

/**
 * One time step with Wiener increment dW. The noise generator on flavor mu is
 * beta_mu(x) = sqrt(lambda) (m_mu/m_0) x, applied pointwise:
 *   LeftPoint        (1 + i beta dW)
 *   MidpointUnitary  exp(i beta dW)
 *   RightPoint       (1 - i beta dW)^(-1)
 * The rest-mass phase exp(-i m_mu dt) commutes with the noise and is applied
 * exactly. Throws OverflowError when the norm^2 exceeds kOverflowNorm2.
 * ExactCharacteristic is not a stepping scheme and is rejected.
 */
void step(TrajectoryState& state, const Grid& grid, Scheme scheme, double dW, double dt,
          const PhysicalParams& params);

/// Per-trajectory observables. Probabilities include the decay envelopes.
enum class Observable { P_SS, P_LL, P_K0K0, P_K0K0bar, Norm2, InterferenceRe, InterferenceIm };
inline constexpr int kObservableCount = 7;
std::string_view to_string(Observable o);

using Observation = std::array<double, kObservableCount>;

/**
 * Observables built from the unit-normalized flavor components phi_S, phi_L
 * (interaction picture) at time t: flavor norms n_mu = sum |phi_mu|^2 dx and the
 * overlap I = exp(-i (m_S - m_L) t) sum conj(phi_L) phi_S dx.
 *   P_SS = n_S e^{-Gamma_S t},  P_LL = n_L e^{-Gamma_L t}
 *   P_K0K0(bar) = (P_SS + P_LL +- 2 Re I e^{-(Gamma_S+Gamma_L) t/2}) / 4
 *   Norm2 = (n_S + n_L) / 2, Interference = I
 */
Observation observe(const std::vector<Complex>& phi_S, const std::vector<Complex>& phi_L,
                    const Grid& grid, const PhysicalParams& params, double t);

/// Closed-form trajectory for a sampled Wiener value W_t:
/// phi_mu(x, t) = exp(i sqrt(lambda)(m_mu/m_0) x W_t) packet(x).
Observation exact_characteristic_trajectory(double W_t, double t, const Grid& grid,
                                            const PhysicalParams& params);

/// Noise average of the interference factor of the exact solution,
/// (1 + c alpha)^(-1/2) with c = lambda delta_m^2 t / (2 m_0^2).
double mean_interference_factor(const PhysicalParams& params, double t);

struct Stat {
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct EstimateRequest {
    Scheme scheme = Scheme::MidpointUnitary;
    PhysicalParams params;
    GridSpec grid;
    std::size_t trajectories = 1000;
    double dt = 1e-3;
    /// Observation times; each must be a multiple of dt for stepping schemes.
    std::vector<double> times;
    std::uint64_t master_seed = 1;
    /// 0 = COLLAPSE_KAON_THREADS or hardware concurrency.
    unsigned threads = 0;
};

struct TrajectoryEnsembleEstimate {
    Scheme scheme = Scheme::MidpointUnitary;
    std::uint64_t master_seed = 0;
    std::size_t trajectories = 0;  ///< successful trajectories entering the averages
    std::size_t failed = 0;        ///< trajectories dropped on overflow
    std::vector<double> times;
    std::array<std::vector<Stat>, kObservableCount> series;
    /// Linear coefficient of a {t, t^2, t^3} least-squares fit of Norm2 - 1,
    /// fitted per trajectory so its standard error is exact.
    Stat norm2_slope;
    /// Largest |norm^2 - 1| of either flavor component seen at any observation.
    double max_norm_deviation = 0.0;

    const std::vector<Stat>& operator[](Observable o) const {
        return series[static_cast<int>(o)];
    }
};

/// Runs the ensemble. Trajectory i draws from NormalStream(master_seed, i); partial
/// sums are merged in fixed trajectory-block order so output is bit-identical for
/// any thread count.
TrajectoryEnsembleEstimate estimate(const EstimateRequest& request);

/// Thread count from COLLAPSE_KAON_THREADS (0 or unset = hardware concurrency).
unsigned default_thread_count();

/// Exact noise average of the per-step norm^2 multiplier at a point where
/// beta^2 dt = a: 1 + a (left), 1 (midpoint), E[1/(1 + a Z^2)] (right).
double step_norm2_multiplier(Scheme scheme, double a);

/// E[norm^2] of a unit flavor component after `steps` steps of size dt, exactly
/// (no sampling error), for the mass m.
double discrete_mean_norm2(Scheme scheme, const Grid& grid, const PhysicalParams& params,
                           double mass, double dt, int steps);

/// The dt -> 0 limit: sum density exp(+-beta^2 t), or 1 for the midpoint scheme.
double continuum_mean_norm2(Scheme scheme, const Grid& grid, const PhysicalParams& params,
                            double mass, double t);

}  // namespace collapse_kaon::montecarlo
