#include "collapse_kaon/commands.hpp"

#include "collapse_kaon/analytic.hpp"
#include "collapse_kaon/assembly.hpp"
#include "collapse_kaon/wick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace collapse_kaon::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Flavor kFinals[] = {Flavor::K0, Flavor::K0bar};
const char* const kProbabilityNames[] = {"P_SS", "P_LL", "P_K0K0", "P_K0K0bar"};

/// One ensemble per distinct scheme, all with the configured seed.
class EnsembleCache {
public:
    explicit EnsembleCache(const RunConfig& config) : config_(config) {}

    const montecarlo::TrajectoryEnsembleEstimate& get(montecarlo::Scheme scheme) {
        auto it = cache_.find(scheme);
        if (it != cache_.end()) return it->second;
        montecarlo::EstimateRequest req;
        req.scheme = scheme;
        req.params = config_.params;
        req.grid = config_.grid;
        req.trajectories = config_.trajectories;
        req.dt = config_.dt;
        req.times = config_.time_grid();
        req.master_seed = config_.master_seed;
        req.threads = config_.threads;
        auto est = montecarlo::estimate(req);
        if (est.failed > 0) {
            throw montecarlo::OverflowError(
                std::to_string(est.failed) + " of " + std::to_string(config_.trajectories) +
                " trajectories overflowed (norm^2 > " + format_number(montecarlo::kOverflowNorm2) +
                ") with scheme " + std::string(montecarlo::to_string(scheme)));
        }
        return cache_.emplace(scheme, std::move(est)).first->second;
    }

private:
    const RunConfig& config_;
    std::map<montecarlo::Scheme, montecarlo::TrajectoryEnsembleEstimate> cache_;
};

struct AssembledSet {
    std::vector<std::optional<assembly::ProbabilitySeries>> series;  // SS, LL, K0K0, K0K0bar
};

AssembledSet assemble_all(const PhysicalParams& params) {
    AssembledSet out;
    out.series.push_back(assembly::assemble_survival(MassState::S, params));
    out.series.push_back(assembly::assemble_survival(MassState::L, params));
    for (Flavor f : kFinals) {
        if (params.m_L == params.m_S) {
            out.series.emplace_back();
        } else {
            out.series.push_back(assembly::assemble_oscillation(Flavor::K0, f, params));
        }
    }
    return out;
}

double analytic_value(int which, const PhysicalParams& params, double theta0, double t) {
    switch (which) {
        case 0: return analytic::survival_probability(MassState::S, params, theta0, t);
        case 1: return analytic::survival_probability(MassState::L, params, theta0, t);
        default:
            if (params.m_L == params.m_S) return kNaN;
            return analytic::oscillation_probability(kFinals[which - 2], params, theta0, t);
    }
}

}  // namespace

std::optional<montecarlo::Scheme> scheme_for(const RunConfig& config, double theta0) {
    if (config.scheme) return config.scheme;
    if (theta0 == 0.0) return montecarlo::Scheme::LeftPoint;
    if (theta0 == 0.5) return montecarlo::Scheme::MidpointUnitary;
    if (theta0 == 1.0) return montecarlo::Scheme::RightPoint;
    return std::nullopt;
}

Table cmd_compare(const RunConfig& config) {
    config.validate();
    Table table;
    table.columns = {"t", "theta0"};
    for (const char* name : kProbabilityNames) {
        for (const char* suffix : {"_analytic", "_assembly", "_mc", "_mc_stderr"}) {
            table.columns.push_back(std::string(name) + suffix);
        }
    }

    const auto assembled = assemble_all(config.params);
    const auto times = config.time_grid();
    EnsembleCache ensembles(config);
    for (double theta0 : config.theta0) {
        const auto scheme = scheme_for(config, theta0);
        const montecarlo::TrajectoryEnsembleEstimate* est =
            scheme ? &ensembles.get(*scheme) : nullptr;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double t = times[k];
            std::vector<Cell> row{t, theta0};
            for (int p = 0; p < 4; ++p) {
                row.emplace_back(analytic_value(p, config.params, theta0, t));
                row.emplace_back(assembled.series[p] ? assembled.series[p]->evaluate(theta0, t)
                                                     : kNaN);
                if (est) {
                    const auto& s = est->series[p][k];
                    row.emplace_back(s.mean);
                    row.emplace_back(s.stderr_);
                } else {
                    row.emplace_back(kNaN);
                    row.emplace_back(kNaN);
                }
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

Table compare_breakdown(const RunConfig& config) {
    config.validate();
    Table table;
    table.columns = {"t",        "theta0",   "probability", "ket_mass", "bra_mass", "ket_order",
                     "bra_order", "weight", "polynomial", "value"};
    const auto& p = config.params;
    const auto times = config.time_grid();

    struct Branch {
        int probability;
        MassState ket, bra;
        Rational weight;
    };
    std::vector<Branch> branches{{0, MassState::S, MassState::S, 1},
                                 {1, MassState::L, MassState::L, 1}};
    if (p.m_L != p.m_S) {
        for (int f = 0; f < 2; ++f) {
            for (MassState mu : {MassState::S, MassState::L}) {
                for (MassState nu : {MassState::S, MassState::L}) {
                    const int sign = (f == 1 && (mu == MassState::L) != (nu == MassState::L)) ? -1 : 1;
                    branches.push_back({2 + f, mu, nu, Rational(sign, 4)});
                }
            }
        }
    }

    for (double theta0 : config.theta0) {
        for (double t : times) {
            for (const auto& b : branches) {
                const double freq = mass_of(b.ket, p) - mass_of(b.bra, p);
                const double rate = 0.5 * (width_of(b.ket, p) + width_of(b.bra, p));
                const double envelope = std::cos(freq * t) * std::exp(-rate * t);
                for (int a = 0; a <= 4; ++a) {
                    for (int c = 0; a + c <= 4; ++c) {
                        const auto poly =
                            assembly::assemble_cross_term({a, c, b.ket, b.bra}, p);
                        if (poly.is_zero()) continue;
                        table.rows.push_back(
                            {t, theta0, std::string(kProbabilityNames[b.probability]),
                             std::string(to_string(b.ket)), std::string(to_string(b.bra)),
                             static_cast<long long>(a), static_cast<long long>(c),
                             to_fraction_string(b.weight), poly.to_string(),
                             to_double(b.weight) * envelope * poly.evaluate(theta0, t)});
                    }
                }
            }
        }
    }
    return table;
}

Table cmd_simulate(const RunConfig& config) {
    config.validate();
    std::vector<montecarlo::Scheme> schemes;
    for (double theta0 : config.theta0) {
        if (auto s = scheme_for(config, theta0)) {
            if (std::find(schemes.begin(), schemes.end(), *s) == schemes.end()) {
                schemes.push_back(*s);
            }
        }
    }
    if (schemes.empty()) {
        throw ConfigError("no theta0 value maps to a trajectory scheme; set \"scheme\" explicitly");
    }

    Table table;
    table.columns = {"scheme", "t"};
    for (int o = 0; o < montecarlo::kObservableCount; ++o) {
        const std::string name(montecarlo::to_string(static_cast<montecarlo::Observable>(o)));
        table.columns.push_back(name);
        table.columns.push_back(name + "_stderr");
    }
    EnsembleCache ensembles(config);
    for (auto scheme : schemes) {
        const auto& est = ensembles.get(scheme);
        for (std::size_t k = 0; k < est.times.size(); ++k) {
            std::vector<Cell> row{std::string(montecarlo::to_string(scheme)), est.times[k]};
            for (int o = 0; o < montecarlo::kObservableCount; ++o) {
                row.emplace_back(est.series[o][k].mean);
                row.emplace_back(est.series[o][k].stderr_);
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

Table cmd_sweep_theta(const RunConfig& config) {
    config.validate();
    const auto& p = config.params;
    Table table;
    table.columns = {"theta0",         "S_linear",         "S_quadratic",
                     "L_linear",       "L_quadratic",      "interference_linear",
                     "interference_quadratic", "P_SS", "P_LL", "P_K0K0", "P_K0K0bar"};
    const auto assembled = assemble_all(p);
    const auto interference = assembly::branch_polynomial(MassState::S, MassState::L, p);
    const auto survival_S = assembly::branch_polynomial(MassState::S, MassState::S, p);
    const auto survival_L = assembly::branch_polynomial(MassState::L, MassState::L, p);
    const double t = config.t_max;
    for (double theta0 : config.theta0) {
        std::vector<Cell> row{theta0};
        for (const auto* poly : {&survival_S, &survival_L, &interference}) {
            row.emplace_back(poly->t_coefficient(1).evaluate(theta0, 0.0));
            row.emplace_back(poly->t_coefficient(2).evaluate(theta0, 0.0));
        }
        for (const auto& s : assembled.series) {
            row.emplace_back(s ? s->evaluate(theta0, t) : kNaN);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table cmd_wick_table(int max_order) {
    if (max_order < 0) throw std::invalid_argument("wick-table: max order must be >= 0");
    Table table;
    table.columns = {"layout", "pairing", "k", "j", "coefficient"};
    for (int total = 2; total <= max_order; total += 2) {
        for (int n_ket = total; n_ket >= 0; --n_ket) {
            const wick::BranchLayout layout{n_ket, total - n_ket};
            for (const auto& pairing : wick::enumerate_pairings(layout)) {
                const auto poly = wick::evaluate_simplex_delta_integral(layout, pairing);
                if (poly.is_zero()) {
                    table.rows.push_back({layout.to_string(), pairing.to_string(), 0LL, 0LL,
                                          std::string("0/1")});
                    continue;
                }
                for (const auto& [key, c] : poly.terms()) {
                    table.rows.push_back({layout.to_string(), pairing.to_string(),
                                          static_cast<long long>(key.first),
                                          static_cast<long long>(key.second),
                                          to_fraction_string(c)});
                }
            }
        }
    }
    return table;
}

std::string render(const Table& table, OutputFormat format) {
    return format == OutputFormat::Json ? table.to_json() : table.to_csv();
}

}  // namespace collapse_kaon::cli
