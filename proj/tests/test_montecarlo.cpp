#include "collapse_kaon/analytic.hpp"
#include "collapse_kaon/montecarlo.hpp"
#include "collapse_kaon/rng.hpp"

#include <catch_amalgamated.hpp>

using namespace collapse_kaon;
using namespace collapse_kaon::montecarlo;

namespace {

PhysicalParams still_params() {
    PhysicalParams p;
    p.Gamma_S = p.Gamma_L = 0.0;
    return p;
}

EstimateRequest small_request(Scheme scheme, const PhysicalParams& p) {
    EstimateRequest req;
    req.scheme = scheme;
    req.params = p;
    req.grid = {128, 12.0};
    req.trajectories = 2000;
    req.dt = 1e-3;
    req.times = {0.0, 0.25, 0.5};
    req.master_seed = 2024;
    return req;
}

}  // namespace

TEST_CASE("Philox known-answer vectors", "[montecarlo][rng]") {
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("normal streams are reproducible and standard", "[montecarlo][rng]") {
    NormalStream a(7, 3), b(7, 3), c(7, 4);
    double sum = 0.0, sum2 = 0.0;
    bool differs = false;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        differs |= x != c.next();
        sum += x;
        sum2 += x * x;
    }
    CHECK(differs);
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(sum2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("scheme names and theta0", "[montecarlo]") {
    for (Scheme s : {Scheme::LeftPoint, Scheme::MidpointUnitary, Scheme::RightPoint,
                     Scheme::ExactCharacteristic}) {
        CHECK(parse_scheme(to_string(s)) == s);
    }
    CHECK(theta0_of(Scheme::LeftPoint) == 0.0);
    CHECK(theta0_of(Scheme::MidpointUnitary) == 0.5);
    CHECK(theta0_of(Scheme::RightPoint) == 1.0);
    CHECK_THROWS_AS(parse_scheme("ito"), std::invalid_argument);
}

TEST_CASE("grid resolution requirements", "[montecarlo]") {
    const PhysicalParams p;
    const Grid grid({512, 0.0}, p);
    double n = 0.0;
    for (double d : grid.density()) n += d;
    CHECK(std::abs(n - 1.0) < 1e-6);
    CHECK_THROWS_AS(Grid({64, 12.0}, p), std::invalid_argument);   // dx too coarse
    CHECK_THROWS_AS(Grid({512, 8.0}, p), std::invalid_argument);   // extent too small
    const auto s = initial_state(grid, Flavor::K0);
    CHECK(norm2(s, grid) == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("single-step multipliers", "[montecarlo]") {
    const PhysicalParams p;
    const Grid grid({128, 12.0}, p);
    const double dW = 0.03, dt = 1e-3;
    const auto start = initial_state(grid, Flavor::K_S);
    const double k = std::sqrt(p.lambda) * p.m_S / p.m_0;

    auto s = start;
    step(s, grid, Scheme::MidpointUnitary, dW, dt, p);
    for (int g = 0; g < grid.size(); ++g) {
        CHECK(std::abs(s.psi_S[g]) == Catch::Approx(std::abs(start.psi_S[g])).epsilon(1e-14));
    }
    CHECK(s.t == dt);

    s = start;
    step(s, grid, Scheme::LeftPoint, dW, dt, p);
    for (int g = 0; g < grid.size(); g += 17) {
        const double b = k * grid.x(g) * dW;
        CHECK(std::norm(s.psi_S[g]) ==
              Catch::Approx(std::norm(start.psi_S[g]) * (1.0 + b * b)).epsilon(1e-13));
    }

    s = start;
    step(s, grid, Scheme::RightPoint, dW, dt, p);
    for (int g = 0; g < grid.size(); g += 17) {
        const double b = k * grid.x(g) * dW;
        CHECK(std::norm(s.psi_S[g]) ==
              Catch::Approx(std::norm(start.psi_S[g]) / (1.0 + b * b)).epsilon(1e-13));
    }

    s = start;
    CHECK_THROWS_AS(step(s, grid, Scheme::ExactCharacteristic, dW, dt, p), std::invalid_argument);
    CHECK_THROWS_AS(step(s, grid, Scheme::LeftPoint, dW, 0.0, p), std::invalid_argument);
}

TEST_CASE("noise-averaged step multipliers", "[montecarlo]") {
    const double a = 0.01;
    CHECK(step_norm2_multiplier(Scheme::LeftPoint, a) == 1.0 + a);
    CHECK(step_norm2_multiplier(Scheme::MidpointUnitary, a) == 1.0);
    const double right = step_norm2_multiplier(Scheme::RightPoint, a);
    CHECK(right == Catch::Approx(1.0 - a + 3.0 * a * a).margin(20.0 * a * a * a));
}

TEST_CASE("left-point steps overflow loudly", "[montecarlo]") {
    PhysicalParams p;
    p.lambda = 1e6;
    const Grid grid({128, 12.0}, p);
    auto s = initial_state(grid, Flavor::K0);
    CHECK_THROWS_AS(step(s, grid, Scheme::LeftPoint, 10.0, 1e-3, p), OverflowError);

    EstimateRequest req = small_request(Scheme::LeftPoint, p);
    req.trajectories = 50;
    req.times = {0.0, 0.1};
    const auto est = estimate(req);
    CHECK(est.failed > 0);
    CHECK(est.failed + est.trajectories == 50);
}

TEST_CASE("noise-free ensembles are exact", "[montecarlo]") {
    PhysicalParams p;
    p.lambda = 0.0;
    for (Scheme s : {Scheme::LeftPoint, Scheme::MidpointUnitary, Scheme::RightPoint}) {
        auto req = small_request(s, p);
        req.trajectories = 20;
        const auto est = estimate(req);
        for (std::size_t k = 0; k < req.times.size(); ++k) {
            const double t = req.times[k];
            CHECK(est[Observable::P_SS][k].mean ==
                  Catch::Approx(std::exp(-p.Gamma_S * t)).epsilon(1e-12));
            CHECK(est[Observable::P_SS][k].stderr_ < 1e-14);
            CHECK(est[Observable::P_K0K0][k].mean ==
                  Catch::Approx(analytic::oscillation_probability(Flavor::K0, p, 0.5, t))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("midpoint scheme is unitary per trajectory", "[montecarlo]") {
    const auto est = estimate(small_request(Scheme::MidpointUnitary, still_params()));
    CHECK(est.failed == 0);
    CHECK(est.max_norm_deviation < 1e-10);
    for (const auto& s : est[Observable::P_SS]) CHECK(std::abs(s.mean - 1.0) < 1e-12);
}

TEST_CASE("flavor probabilities redistribute, never create", "[montecarlo]") {
    const auto est = estimate(small_request(Scheme::LeftPoint, still_params()));
    for (std::size_t k = 0; k < est.times.size(); ++k) {
        const double sum = est[Observable::P_K0K0][k].mean + est[Observable::P_K0K0bar][k].mean;
        const double half = 0.5 * (est[Observable::P_SS][k].mean + est[Observable::P_LL][k].mean);
        CHECK(sum == Catch::Approx(half).epsilon(1e-12));
    }
}

TEST_CASE("ensemble means match the exact discrete expectation", "[montecarlo]") {
    const auto p = still_params();
    const Grid grid({128, 12.0}, p);
    for (Scheme s : {Scheme::LeftPoint, Scheme::RightPoint}) {
        const auto est = estimate(small_request(s, p));
        const auto& pss = est[Observable::P_SS];
        const double expected = discrete_mean_norm2(s, grid, p, p.m_S, 1e-3, 500);
        INFO(to_string(s));
        CHECK(std::abs(pss[2].mean - expected) < 4.0 * pss[2].stderr_);
    }
}

TEST_CASE("schemes reproduce the analytic theta0 predictions", "[montecarlo]") {
    // |MC - analytic| <= 3 stderr + time-step bias + truncation of the series
    const auto p = still_params();
    const Grid grid({128, 12.0}, p);
    for (Scheme s : {Scheme::LeftPoint, Scheme::MidpointUnitary, Scheme::RightPoint}) {
        auto req = small_request(s, p);
        req.times = {0.5, 1.0, 2.0};
        req.dt = 2e-3;
        req.trajectories = 4000;
        const auto est = estimate(req);
        for (std::size_t k = 0; k < req.times.size(); ++k) {
            const double t = req.times[k];
            const int steps = static_cast<int>(std::lround(t / req.dt));
            const double analytic = analytic::survival_probability(MassState::L, p, theta0_of(s), t);
            const double bias = std::abs(discrete_mean_norm2(s, grid, p, p.m_L, req.dt, steps) -
                                         continuum_mean_norm2(s, grid, p, p.m_L, t));
            const double truncation = std::abs(continuum_mean_norm2(s, grid, p, p.m_L, t) - analytic);
            const auto& pll = est[Observable::P_LL][k];
            INFO(to_string(s) << " t=" << t);
            CHECK(std::abs(pll.mean - analytic) <= 3.0 * pll.stderr_ + bias + truncation + 1e-12);
        }
    }
}

TEST_CASE("exact characteristic and midpoint estimate the same law", "[montecarlo]") {
    const auto p = still_params();
    auto req = small_request(Scheme::MidpointUnitary, p);
    req.times = {2.0};
    req.dt = 1e-2;
    const auto mid = estimate(req);
    req.scheme = Scheme::ExactCharacteristic;
    req.master_seed = 99;
    const auto exact = estimate(req);
    for (Observable o : {Observable::InterferenceRe, Observable::InterferenceIm, Observable::P_K0K0}) {
        const auto& a = mid[o][0];
        const auto& b = exact[o][0];
        INFO(to_string(o));
        CHECK(std::abs(a.mean - b.mean) <=
              3.0 * std::hypot(a.stderr_, b.stderr_) + 1e-12);
    }
    const double factor = mean_interference_factor(p, 2.0);
    const double phase = p.delta_m() * 2.0;
    const auto& re = exact[Observable::InterferenceRe][0];
    CHECK(std::abs(re.mean - std::cos(phase) * factor) <= 4.0 * re.stderr_);
}

TEST_CASE("closed-form interference factor", "[montecarlo]") {
    PhysicalParams p;
    // c alpha = lambda dm^2 t alpha / 2 = 0.1 at t = 200
    CHECK(mean_interference_factor(p, 200.0) == Catch::Approx(0.95346).epsilon(1e-5));
    const Grid grid({512, 0.0}, p);
    // the grid quadrature of the Gaussian average agrees
    const double c = p.lambda * p.delta_m() * p.delta_m() * 200.0 / 2.0;
    double sum = 0.0;
    for (int g = 0; g < grid.size(); ++g) sum += grid.density()[g] * std::exp(-c * grid.x(g) * grid.x(g));
    CHECK(sum == Catch::Approx(mean_interference_factor(p, 200.0)).epsilon(1e-10));
}

TEST_CASE("initial momentum only contributes a global phase", "[montecarlo]") {
    auto p = PhysicalParams{};
    auto req = small_request(Scheme::RightPoint, p);
    req.trajectories = 300;
    const auto a = estimate(req);
    req.params.p_i = 2.3;
    const auto b = estimate(req);
    for (int o = 0; o < kObservableCount; ++o) {
        for (std::size_t k = 0; k < req.times.size(); ++k) {
            CHECK(a.series[o][k].mean == Catch::Approx(b.series[o][k].mean).margin(1e-12));
        }
    }
}

TEST_CASE("estimates are bit-identical for any thread count", "[montecarlo]") {
    auto req = small_request(Scheme::LeftPoint, PhysicalParams{});
    req.trajectories = 1000;  // several blocks
    req.threads = 1;
    const auto a = estimate(req);
    req.threads = 3;
    const auto b = estimate(req);
    req.threads = 8;
    const auto c = estimate(req);
    for (int o = 0; o < kObservableCount; ++o) {
        for (std::size_t k = 0; k < req.times.size(); ++k) {
            CHECK(a.series[o][k].mean == b.series[o][k].mean);
            CHECK(a.series[o][k].stderr_ == b.series[o][k].stderr_);
            CHECK(a.series[o][k].mean == c.series[o][k].mean);
        }
    }
    CHECK(a.norm2_slope.mean == c.norm2_slope.mean);
}

TEST_CASE("estimate rejects bad requests", "[montecarlo]") {
    auto req = small_request(Scheme::LeftPoint, PhysicalParams{});
    req.times = {0.0, 0.0015};
    CHECK_THROWS_AS(estimate(req), std::invalid_argument);
    req.times = {0.5, 0.25};
    CHECK_THROWS_AS(estimate(req), std::invalid_argument);
    req.times = {0.5};
    req.trajectories = 0;
    CHECK_THROWS_AS(estimate(req), std::invalid_argument);
}
