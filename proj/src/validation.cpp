#include "collapse_kaon/validation.hpp"

#include "collapse_kaon/analytic.hpp"
#include "collapse_kaon/assembly.hpp"
#include "collapse_kaon/commands.hpp"
#include "collapse_kaon/montecarlo.hpp"
#include "collapse_kaon/wick.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace collapse_kaon::validation {

namespace {

using montecarlo::Scheme;

std::string fmt(double v, int digits = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Collects failed checks; the criterion passes when none failed.
struct Checks {
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    int count = 0;

    void require(bool ok, const std::string& what) {
        ++count;
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }

    void finish(CriterionResult& r) const {
        r.passed = failures.empty();
        std::ostringstream os;
        os << count << " checks";
        for (const auto& n : notes) os << "; " << n;
        if (!failures.empty()) {
            os << "; " << failures.size() << " failed: " << failures.front();
            if (failures.size() > 1) os << " (+" << failures.size() - 1 << " more)";
        }
        r.detail = os.str();
    }
};

PhysicalParams alternate_params() {
    PhysicalParams p;
    p.m_S = 0.7;
    p.m_L = 1.3;
    p.m_0 = 1.1;
    p.lambda = 0.25;
    p.alpha = 0.8;
    p.Gamma_S = 0.3;
    p.Gamma_L = 0.02;
    return p;
}

// 1: symbolic delta integrals vs the regularized quadrature oracle
void wick_engine(Checks& c, const ValidationOptions&) {
    const auto start = std::chrono::steady_clock::now();
    const wick::BranchLayout nested{4, 0};
    const wick::WickPairing first{{{0, 1}, {2, 3}}};
    c.require(wick::evaluate_simplex_delta_integral(nested, first) ==
                  ThetaPolynomial::monomial(Rational(1, 2), 2, 2),
              "(4,0) (12)(34) != 1/2 th^2 t^2");

    double worst = 0.0;
    int compared = 0;
    for (int total = 2; total <= 4; total += 2) {
        for (int n_ket = total; n_ket >= 0; --n_ket) {
            const wick::BranchLayout layout{n_ket, total - n_ket};
            for (const auto& pairing : wick::enumerate_pairings(layout)) {
                const auto exact = wick::evaluate_simplex_delta_integral(layout, pairing);
                for (double theta0 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                    for (double t : {0.5, 1.0, 2.0}) {
                        const double e = exact.evaluate(theta0, t);
                        const double o = wick::extrapolated_oracle(layout, pairing, theta0, t).value;
                        const double scale = std::max(std::abs(e), std::pow(t, total / 2));
                        const double rel = std::abs(o - e) / scale;
                        worst = std::max(worst, rel);
                        ++compared;
                        c.require(rel < 1e-3, layout.to_string() + " " + pairing.to_string() +
                                                  " theta0=" + fmt(theta0) + " t=" + fmt(t) +
                                                  " rel " + fmt(rel));
                    }
                }
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 60.0, "runtime " + fmt(secs) + " s >= 60 s");
    c.note(std::to_string(compared) + " oracle comparisons, worst relative error " + fmt(worst));
}

// 2: assembled coefficients equal the closed-form brackets exactly
void coefficient_identity(Checks& c, const ValidationOptions&) {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& p : {PhysicalParams{}, alternate_params()}) {
        const ExactParams e = ExactParams::from(p);
        for (MassState mu : {MassState::S, MassState::L}) {
            const auto poly = assembly::branch_polynomial(mu, mu, p);
            const Rational& m = mu == MassState::S ? e.m_S : e.m_L;
            const Rational m2 = m * m / (e.m_0 * e.m_0);
            const auto th = ThetaPolynomial::theta();
            const auto linear = (th * Rational(2) - Rational(1)) * (-(e.alpha / 2) * e.lambda * m2);
            const auto quadratic = (th * (th - Rational(1)) * Rational(2) + Rational(1, 2)) *
                                   (Rational(3, 4) * e.alpha * e.alpha * e.lambda * e.lambda * m2 * m2);
            const std::string name = std::string("K_") + std::string(to_string(mu));
            c.require(poly.t_coefficient(1) == linear, name + " linear coefficient");
            c.require(poly.t_coefficient(2) == quadratic, name + " quadratic coefficient");
            c.require(poly == analytic::survival_bracket(mu, p), name + " survival bracket");
        }
        const auto bracket = analytic::interference_bracket(p);
        c.require(assembly::branch_polynomial(MassState::S, MassState::L, p) == bracket,
                  "S-L interference bracket");
        c.require(assembly::branch_polynomial(MassState::L, MassState::S, p) == bracket,
                  "L-S interference bracket");
        for (Flavor f : {Flavor::K0, Flavor::K0bar}) {
            const auto series = assembly::assemble_oscillation(Flavor::K0, f, p);
            for (const auto& comp : series.components()) {
                const bool diagonal = comp.frequency == 0.0;
                c.require(comp.weight == Rational(1, 4) || comp.weight == Rational(-1, 4),
                          "oscillation weight");
                if (!diagonal) {
                    c.require(comp.poly == bracket, "oscillation interference term");
                }
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 1.0, "runtime " + fmt(secs) + " s >= 1 s");
    c.note("exact rational equality on 2 parameter sets in " + fmt(secs) + " s");
}

// 3: probability conservation at theta0 = 1/2 without decay
void conservation(Checks& c, const ValidationOptions&) {
    for (auto p : {PhysicalParams{}, alternate_params()}) {
        p.Gamma_S = 0.0;
        p.Gamma_L = 0.0;
        const Rational half(1, 2);
        for (MassState mu : {MassState::S, MassState::L}) {
            const auto s = assembly::assemble_survival(mu, p).substitute_theta(half).simplified();
            c.require(s.components().size() == 1 && s.components()[0].weight == 1 &&
                          s.components()[0].poly == ThetaPolynomial(1) &&
                          s.components()[0].decay_rate == 0.0,
                      "P_" + std::string(to_string(mu)) + std::string(to_string(mu)) + " != 1");
        }
        const auto total = (assembly::assemble_oscillation(Flavor::K0, Flavor::K0, p) +
                            assembly::assemble_oscillation(Flavor::K0, Flavor::K0bar, p))
                               .substitute_theta(half)
                               .simplified();
        const auto& comps = total.components();
        c.require(comps.size() == 1 && comps[0].frequency == 0.0 && comps[0].decay_rate == 0.0 &&
                      comps[0].poly * comps[0].weight == ThetaPolynomial(1),
                  "P(K0->K0) + P(K0->K0bar) != 1");
        // away from 1/2 the noise does change the norm
        const auto off = assembly::assemble_survival(MassState::S, p)
                             .substitute_theta(Rational(1, 4))
                             .simplified();
        c.require(!(off.components().size() == 1 && off.components()[0].poly == ThetaPolynomial(1)),
                  "theta0 = 1/4 unexpectedly conserves probability");
    }
    c.note("zero polynomial residual on 2 parameter sets");
}

// 4: theta0 = 1/2 reductions of the interference bracket
void half_reductions(Checks& c, const ValidationOptions&) {
    // degree <= 4 in each mass: agreement on a 5 x 5 grid is a polynomial identity
    const double masses[] = {0.5, 0.75, 1.0, 1.25, 1.5};
    int points = 0;
    for (double lambda : {0.1, 0.375}) {
        for (double m_S : masses) {
            for (double m_L : masses) {
                PhysicalParams p;
                p.m_S = m_S;
                p.m_L = m_L;
                p.m_0 = 1.25;
                p.lambda = lambda;
                p.alpha = 0.5;
                const ExactParams e = ExactParams::from(p);
                const auto poly = assembly::branch_polynomial(MassState::S, MassState::L, p)
                                      .substitute_theta(Rational(1, 2));
                const Rational dm = e.m_L - e.m_S;
                const Rational m02 = e.m_0 * e.m_0;
                const Rational linear = -Rational(1, 4) * (e.lambda / m02) * e.alpha * dm * dm;
                const Rational prefactor =
                    Rational(3, 8) * e.lambda * e.lambda / (m02 * m02) * e.alpha * e.alpha;
                const std::string where = "m_S=" + fmt(m_S) + " m_L=" + fmt(m_L);
                c.require(poly.coefficient(1, 0) == linear, "linear reduction at " + where);
                c.require(poly.coefficient(2, 0) == prefactor * dm * dm * dm * dm / 4,
                          "quadratic reduction at " + where);
                c.require(poly.theta_degree() == 0 && poly.t_degree() <= 2,
                          "unexpected terms at " + where);
                ++points;
            }
        }
    }
    c.note(std::to_string(points) + " exact mass points");
}

// 5: trajectory schemes realize theta0 = 0, 1/2, 1
void scheme_correspondence(Checks& c, const ValidationOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    PhysicalParams p;
    p.m_S = p.m_L = p.m_0 = 1.0;
    p.Gamma_S = p.Gamma_L = 0.0;
    p.lambda = 0.1;
    p.alpha = 1.0;
    const montecarlo::GridSpec grid_spec{128, 12.0};
    const double dt = 1e-3;

    montecarlo::EstimateRequest req;
    req.params = p;
    req.grid = grid_spec;
    req.trajectories = opt.mc_trajectories;
    req.dt = dt;
    req.master_seed = 424242;
    req.threads = opt.threads;
    for (int k = 0; k <= 100; ++k) req.times.push_back(k * 0.01);

    const double expected = 0.5 * p.lambda * p.alpha;

    req.scheme = Scheme::MidpointUnitary;
    const auto mid = montecarlo::estimate(req);
    double worst_mid = mid.max_norm_deviation;
    for (const auto& s : mid[montecarlo::Observable::P_SS]) {
        worst_mid = std::max(worst_mid, std::abs(s.mean - 1.0));
    }
    c.require(mid.failed == 0 && worst_mid < 1e-10, "midpoint deviation " + fmt(worst_mid));
    c.note("midpoint max |P-1| " + fmt(worst_mid));

    for (auto [scheme, sign] : {std::pair{Scheme::LeftPoint, 1.0}, {Scheme::RightPoint, -1.0}}) {
        req.scheme = scheme;
        const auto est = montecarlo::estimate(req);
        const auto& slope = est.norm2_slope;
        const double z = (slope.mean - sign * expected) / slope.stderr_;
        const std::string name(montecarlo::to_string(scheme));
        c.require(est.failed == 0 && std::abs(z) <= 3.0,
                  name + " slope " + fmt(slope.mean, 6) + " is " + fmt(z) + " stderr from " +
                      fmt(sign * expected));
        c.note(name + " slope " + fmt(slope.mean, 6) + " +- " + fmt(slope.stderr_, 2));

        // residual weak bias of the scheme, computed without sampling noise
        montecarlo::Grid grid(grid_spec, p);
        auto bias = [&](double h) {
            double worst = 0.0;
            for (double t : {0.25, 0.5, 0.75, 1.0}) {
                const int steps = static_cast<int>(std::lround(t / h));
                worst = std::max(worst,
                                 std::abs(montecarlo::discrete_mean_norm2(scheme, grid, p, 1.0, h, steps) -
                                          montecarlo::continuum_mean_norm2(scheme, grid, p, 1.0, t)));
            }
            return worst;
        };
        const double b1 = bias(dt);
        const double b2 = bias(dt / 2);
        c.require(b2 < b1, name + " bias did not shrink: " + fmt(b1) + " -> " + fmt(b2));
        c.note(name + " bias " + fmt(b1) + " -> " + fmt(b2) + " on halving dt");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 300.0, "runtime " + fmt(secs) + " s >= 300 s");
    c.note("N=" + std::to_string(opt.mc_trajectories) + " in " + fmt(secs) + " s");
}

// 6: closed-form noise average vs the theta0 = 1/2 interference polynomial
void exact_characteristic(Checks& c, const ValidationOptions& opt) {
    const PhysicalParams p;  // c alpha = lambda dm^2 t alpha / (2 m_0^2) = 0.05 at t = 100
    const double t = 100.0;
    const double c_alpha = p.lambda * p.delta_m() * p.delta_m() * t * p.alpha / (2 * p.m_0 * p.m_0);
    const double factor = montecarlo::mean_interference_factor(p, t);
    c.require(std::abs(factor - 1.0 / std::sqrt(1.0 + c_alpha)) < 1e-15, "closed form");
    const double poly = assembly::branch_polynomial(MassState::S, MassState::L, p)
                            .substitute_theta(Rational(1, 2))
                            .evaluate(0.5, t);
    const double diff = std::abs(factor - poly);
    c.require(std::abs(c_alpha - 0.05) < 1e-12, "c alpha = " + fmt(c_alpha));
    c.require(diff < 5e-5, "|difference| " + fmt(diff));
    c.note("c alpha " + fmt(c_alpha) + ", |difference| " + fmt(diff));

    // sampled exact solutions reproduce the same average
    montecarlo::EstimateRequest req;
    req.scheme = Scheme::ExactCharacteristic;
    req.params = p;
    req.grid = {128, 12.0};
    req.trajectories = 20000;
    req.times = {t};
    req.master_seed = 77;
    req.threads = opt.threads;
    const auto est = montecarlo::estimate(req);
    const double phase = p.delta_m() * t;
    const auto& re = est[montecarlo::Observable::InterferenceRe][0];
    const auto& im = est[montecarlo::Observable::InterferenceIm][0];
    const double z_re = (re.mean - std::cos(phase) * factor) / re.stderr_;
    const double z_im = (im.mean - std::sin(phase) * factor) / im.stderr_;
    c.require(std::abs(z_re) < 4.0 && std::abs(z_im) < 4.0,
              "sampled interference off by " + fmt(z_re) + ", " + fmt(z_im) + " stderr");
    c.note("sampled factor within " + fmt(std::max(std::abs(z_re), std::abs(z_im))) + " stderr");
}

// 7: lambda = 0 is ordinary two-state oscillation
void standard_limit(Checks& c, const ValidationOptions& opt) {
    PhysicalParams p;
    p.lambda = 0.0;
    double worst = 0.0;
    for (Flavor f : {Flavor::K0, Flavor::K0bar}) {
        const auto series = assembly::assemble_oscillation(Flavor::K0, f, p);
        const double sign = f == Flavor::K0 ? 1.0 : -1.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = 0.25 * k;
            const double eS = std::exp(-p.Gamma_S * t);
            const double eL = std::exp(-p.Gamma_L * t);
            const double qm = 0.25 * (eL + eS + sign * 2.0 * std::cos(p.delta_m() * t) *
                                                     std::exp(-0.5 * (p.Gamma_L + p.Gamma_S) * t));
            for (double theta0 : {0.0, 0.5, 1.0}) {
                worst = std::max({worst, std::abs(series.evaluate(theta0, t) - qm),
                                  std::abs(analytic::oscillation_probability(f, p, theta0, t) - qm)});
            }
        }
    }
    c.require(worst < 1e-14, "max deviation from standard formula " + fmt(worst));
    c.note("max deviation " + fmt(worst));

    // frequency of the simulated strangeness asymmetry, from its zero crossings
    PhysicalParams q = p;
    q.Gamma_S = q.Gamma_L = 0.0;
    montecarlo::EstimateRequest req;
    req.scheme = Scheme::MidpointUnitary;
    req.params = q;
    req.grid = {128, 12.0};
    req.trajectories = 4;
    req.dt = 0.01;
    req.threads = opt.threads;
    for (int k = 0; k <= 2000; ++k) req.times.push_back(0.1 * k);
    const auto est = montecarlo::estimate(req);
    const auto& a = est[montecarlo::Observable::P_K0K0];
    const auto& b = est[montecarlo::Observable::P_K0K0bar];
    std::vector<double> crossings;
    for (std::size_t k = 1; k < req.times.size(); ++k) {
        const double y0 = a[k - 1].mean - b[k - 1].mean;
        const double y1 = a[k].mean - b[k].mean;
        if ((y0 < 0) != (y1 < 0)) {
            const double t0 = req.times[k - 1];
            crossings.push_back(t0 + (req.times[k] - t0) * y0 / (y0 - y1));
        }
    }
    c.require(crossings.size() >= 4, "too few zero crossings");
    if (crossings.size() >= 2) {
        const double omega = M_PI * static_cast<double>(crossings.size() - 1) /
                             (crossings.back() - crossings.front());
        const double rel = std::abs(omega - q.delta_m()) / q.delta_m();
        c.require(rel < 0.01, "fitted frequency " + fmt(omega, 6) + " vs " + fmt(q.delta_m()));
        c.note("fitted frequency " + fmt(omega, 6) + " (relative error " + fmt(rel) + ")");
    }
}

// 8: identical config and seed give identical bytes, for any thread count
void determinism(Checks& c, const ValidationOptions&) {
    RunConfig cfg;
    cfg.trajectories = 600;
    cfg.t_max = 0.5;
    cfg.t_steps = 5;
    cfg.master_seed = 99;
    cfg.threads = 1;
    const std::string first = cli::render(cli::cmd_compare(cfg), OutputFormat::Csv);
    const std::string second = cli::render(cli::cmd_compare(cfg), OutputFormat::Csv);
    cfg.threads = 4;
    const std::string threaded = cli::render(cli::cmd_compare(cfg), OutputFormat::Csv);
    c.require(first == second, "repeat run differs");
    c.require(first == threaded, "4-thread run differs from 1-thread run");
    cfg.master_seed = 100;
    c.require(cli::render(cli::cmd_compare(cfg), OutputFormat::Csv) != first,
              "different seed gave identical output");
    c.note(std::to_string(first.size()) + " bytes compared");
}

struct Entry {
    const char* name;
    std::function<void(Checks&, const ValidationOptions&)> run;
};

const Entry kEntries[kCriterionCount] = {
    {"Wick engine vs quadrature oracle", wick_engine},
    {"assembled coefficients equal closed-form brackets", coefficient_identity},
    {"probability conservation at theta0 = 1/2", conservation},
    {"theta0 = 1/2 algebraic reductions", half_reductions},
    {"trajectory scheme / theta0 correspondence", scheme_correspondence},
    {"exact characteristic solution vs perturbation", exact_characteristic},
    {"standard quantum mechanics limit", standard_limit},
    {"deterministic compare output", determinism},
};

}  // namespace

CriterionResult run_criterion(int id, const ValidationOptions& options) {
    if (id < 1 || id > kCriterionCount) {
        throw std::out_of_range("no acceptance criterion " + std::to_string(id));
    }
    const Entry& entry = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = entry.name;
    const auto start = std::chrono::steady_clock::now();
    try {
        Checks checks;
        entry.run(checks, options);
        checks.finish(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> run_all(const ValidationOptions& options) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string format_line(const CriterionResult& r) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    return std::string(r.passed ? "PASS" : "FAIL") + "  [" + std::to_string(r.id) + "] " +
           r.name + " (" + secs + " s): " + r.detail;
}

Table summary_table(const std::vector<CriterionResult>& results) {
    Table t;
    t.columns = {"criterion", "name", "status", "seconds", "detail"};
    for (const auto& r : results) {
        t.rows.push_back({static_cast<long long>(r.id), r.name,
                          std::string(r.passed ? "pass" : "fail"), r.seconds, r.detail});
    }
    return t;
}

std::string report_json(const std::vector<CriterionResult>& results) {
    nlohmann::ordered_json j;
    j["passed"] = all_passed(results);
    j["criteria"] = nlohmann::ordered_json::array();
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json e{{"id", r.id},
                                 {"name", r.name},
                                 {"passed", r.passed},
                                 {"seconds", r.seconds},
                                 {"detail", r.detail}};
        if (!r.passed) j["failures"].push_back(e);
        j["criteria"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

}  // namespace collapse_kaon::validation
