#include "collapse_kaon/wick.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <tuple>

namespace collapse_kaon::wick {

int BranchLayout::parent(int label) const {
    if (label < n_ket) {
        return label == 0 ? -1 : label - 1;
    }
    return label == n_ket ? -1 : label - 1;
}

std::string BranchLayout::to_string() const {
    return "(" + std::to_string(n_ket) + "," + std::to_string(n_bra) + ")";
}

std::string WickPairing::to_string() const {
    int n = 0;
    for (const auto& [a, b] : pairs) n = std::max({n, a + 1, b + 1});
    const bool wide = n > 9;
    std::string out;
    for (const auto& [a, b] : pairs) {
        out += "(" + std::to_string(a + 1) + (wide ? "," : "") + std::to_string(b + 1) + ")";
    }
    return out;
}

namespace {

void enumerate_into(std::vector<int>& remaining, std::vector<std::pair<int, int>>& current,
                    std::vector<WickPairing>& out) {
    if (remaining.empty()) {
        out.push_back({current});
        return;
    }
    const int first = remaining.front();
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        const int second = remaining[i];
        std::vector<int> rest;
        rest.reserve(remaining.size() - 2);
        for (std::size_t j = 1; j < remaining.size(); ++j) {
            if (j != i) rest.push_back(remaining[j]);
        }
        current.emplace_back(first, second);
        enumerate_into(rest, current, out);
        current.pop_back();
    }
}

}  // namespace

std::vector<WickPairing> enumerate_pairings(const BranchLayout& layout) {
    if (layout.n_ket < 0 || layout.n_bra < 0) {
        throw std::invalid_argument("enumerate_pairings: negative variable count");
    }
    std::vector<WickPairing> out;
    const int n = layout.total();
    if (n % 2 != 0) {
        return out;
    }
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i;
    std::vector<std::pair<int, int>> current;
    enumerate_into(labels, current, out);
    return out;
}

void check_pairing(const BranchLayout& layout, const WickPairing& pairing) {
    const int n = layout.total();
    if (n % 2 != 0 || static_cast<int>(pairing.pairs.size()) * 2 != n) {
        throw std::invalid_argument("pairing size does not match layout " + layout.to_string());
    }
    std::vector<int> seen(n, 0);
    for (const auto& [a, b] : pairing.pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
            throw std::invalid_argument("pairing " + pairing.to_string() +
                                        " references labels outside layout " +
                                        layout.to_string());
        }
        ++seen[a];
        ++seen[b];
    }
    for (int c : seen) {
        if (c != 1) {
            throw std::invalid_argument("pairing " + pairing.to_string() +
                                        " is not a perfect matching");
        }
    }
}

// ---------------------------------------------------------------------------
// Symbolic engine
// ---------------------------------------------------------------------------

namespace {

constexpr int kT = -1;
constexpr int kZero = -2;

/// H(hi - lo) with hi >= lo (weak) or hi > lo (strict).
struct Indicator {
    int hi;
    int lo;
    bool strict;
    auto operator<=>(const Indicator&) const = default;
};

enum class Truth { True, False, Open };

// Every variable lives in [0, t]; boundary coincidences with 0 or t have measure zero.
Truth classify(const Indicator& h) {
    if (h.hi == h.lo) return h.strict ? Truth::False : Truth::True;
    if (h.lo == kZero) return Truth::True;
    if (h.hi == kZero) return Truth::False;
    if (h.hi == kT) return Truth::True;
    if (h.lo == kT) return Truth::False;
    return Truth::Open;
}

struct Term {
    Rational coeff;
    int theta_power = 0;
    std::vector<int> exps;  // one slot per label plus t in the last slot
    std::vector<Indicator> indicators;
};

using TermKey = std::tuple<int, std::vector<int>, std::vector<Indicator>>;

class Integrator {
public:
    Integrator(const BranchLayout& layout, const WickPairing& pairing)
        : layout_(layout), n_(layout.total()), partner_(n_, -1), consumed_(n_, false) {
        for (const auto& [a, b] : pairing.pairs) {
            partner_[a] = b;
            partner_[b] = a;
        }
        Term unit{Rational(1), 0, std::vector<int>(n_ + 1, 0), {}};
        terms_.emplace(key_of(unit), unit.coeff);
    }

    ThetaPolynomial run() {
        // innermost first: ket chain bottom-up, then bra chain bottom-up
        std::vector<int> order;
        for (int i = layout_.n_ket - 1; i >= 0; --i) order.push_back(i);
        for (int i = n_ - 1; i >= layout_.n_ket; --i) order.push_back(i);

        for (int v : order) {
            const int p = partner_[v];
            if (!consumed_[v]) {
                consumed_[v] = true;
                consumed_[p] = true;
                apply_to_all([&](Term& term, std::vector<Term>& out) { pin(term, v, p, out); });
            } else {
                apply_to_all([&](Term& term, std::vector<Term>& out) { integrate(term, v, out); });
            }
        }

        ThetaPolynomial result;
        for (const auto& [key, coeff] : terms_) {
            const auto& [theta_power, exps, indicators] = key;
            if (!indicators.empty()) {
                throw std::logic_error("wick: unresolved indicator after full integration");
            }
            result += ThetaPolynomial::monomial(coeff, exps[n_], theta_power);
        }
        return result;
    }

private:
    int slot(int symbol) const { return symbol == kT ? n_ : symbol; }

    static TermKey key_of(const Term& t) { return {t.theta_power, t.exps, t.indicators}; }

    template <typename Fn>
    void apply_to_all(Fn&& fn) {
        std::map<TermKey, Rational> next;
        std::vector<Term> produced;
        for (const auto& [key, coeff] : terms_) {
            Term term{coeff, std::get<0>(key), std::get<1>(key), std::get<2>(key)};
            produced.clear();
            fn(term, produced);
            for (auto& out : produced) {
                if (!normalize(out)) continue;
                auto [it, inserted] = next.try_emplace(key_of(out), out.coeff);
                if (!inserted) {
                    it->second += out.coeff;
                    if (it->second == 0) next.erase(it);
                }
            }
        }
        terms_ = std::move(next);
    }

    /// Drops satisfied indicators and merges duplicates. False if the term vanishes.
    static bool normalize(Term& term) {
        if (term.coeff == 0) return false;
        std::vector<Indicator> kept;
        for (const auto& h : term.indicators) {
            switch (classify(h)) {
                case Truth::False: return false;
                case Truth::True: break;
                case Truth::Open: kept.push_back(h); break;
            }
        }
        std::sort(kept.begin(), kept.end());
        // a strict and a weak copy of the same inequality collapse to the strict one
        std::vector<Indicator> merged;
        for (const auto& h : kept) {
            if (!merged.empty() && merged.back().hi == h.hi && merged.back().lo == h.lo) {
                merged.back().strict = merged.back().strict || h.strict;
            } else {
                merged.push_back(h);
            }
        }
        term.indicators = std::move(merged);
        return true;
    }

    /// Delta on v with partner p still pending: v := p.
    void pin(Term& term, int v, int p, std::vector<Term>& out) const {
        const int upper = layout_.parent(v) == -1 ? kT : layout_.parent(v);
        term.exps[p] += term.exps[v];
        term.exps[v] = 0;
        for (auto& h : term.indicators) {
            if (h.hi == v) h.hi = p;
            if (h.lo == v) h.lo = p;
        }
        if (p == upper) {
            // partner sits exactly on the upper limit of v's range
            term.theta_power += 1;
        } else {
            term.indicators.push_back({upper, p, false});
        }
        out.push_back(std::move(term));
    }

    /// Integrates v over [0, parent(v)] intersected with its indicator bounds.
    void integrate(Term& term, int v, std::vector<Term>& out) const {
        std::vector<int> lowers{kZero};
        std::vector<int> uppers{layout_.parent(v) == -1 ? kT : layout_.parent(v)};
        std::vector<Indicator> rest;
        for (const auto& h : term.indicators) {
            if (h.hi == v) {
                lowers.push_back(h.lo);
            } else if (h.lo == v) {
                uppers.push_back(h.hi);
            } else {
                rest.push_back(h);
            }
        }
        auto dedupe = [](std::vector<int>& xs) {
            std::vector<int> u;
            for (int x : xs) {
                if (std::find(u.begin(), u.end(), x) == u.end()) u.push_back(x);
            }
            xs = std::move(u);
        };
        dedupe(lowers);
        dedupe(uppers);

        const int e = term.exps[v];
        for (std::size_t i = 0; i < lowers.size(); ++i) {
            for (std::size_t j = 0; j < uppers.size(); ++j) {
                const int lo = lowers[i];
                const int hi = uppers[j];
                if (lo == hi) continue;  // empty interval
                // lo is the largest lower bound (ties go to the earliest), hi the smallest upper
                std::vector<Indicator> inds = rest;
                for (std::size_t k = 0; k < lowers.size(); ++k) {
                    if (k != i) inds.push_back({lo, lowers[k], k < i});
                }
                for (std::size_t k = 0; k < uppers.size(); ++k) {
                    if (k != j) inds.push_back({uppers[k], hi, k < j});
                }
                inds.push_back({hi, lo, false});

                Term base{term.coeff / (e + 1), term.theta_power, term.exps, inds};
                base.exps[v] = 0;

                Term upper_term = base;
                upper_term.exps[slot(hi)] += e + 1;
                out.push_back(std::move(upper_term));

                if (lo != kZero) {
                    Term lower_term = std::move(base);
                    lower_term.coeff = -lower_term.coeff;
                    lower_term.exps[slot(lo)] += e + 1;
                    out.push_back(std::move(lower_term));
                }
            }
        }
    }

    BranchLayout layout_;
    int n_;
    std::vector<int> partner_;
    std::vector<bool> consumed_;
    std::map<TermKey, Rational> terms_;
};

}  // namespace

ThetaPolynomial evaluate_simplex_delta_integral(const BranchLayout& layout,
                                                const WickPairing& pairing) {
    check_pairing(layout, pairing);
    if (layout.total() == 0) {
        return ThetaPolynomial(1);
    }
    return Integrator(layout, pairing).run();
}

ThetaPolynomial wick_sum(const BranchLayout& layout) {
    if (layout.total() == 0) {
        return ThetaPolynomial(1);
    }
    ThetaPolynomial sum;
    for (const auto& pairing : enumerate_pairings(layout)) {
        sum += evaluate_simplex_delta_integral(layout, pairing);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Regularized quadrature oracle
// ---------------------------------------------------------------------------

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int m) {
    GaussRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

class Oracle {
public:
    Oracle(const BranchLayout& layout, const WickPairing& pairing, double theta0, double t,
           double eps)
        : layout_(layout), n_(layout.total()), partner_(n_, -1), theta0_(theta0), t_(t),
          eps_(eps), values_(n_, 0.0), fixed_(n_, false),
          // between breakpoints the nested integrand is a polynomial of degree < n
          rule_(gauss_legendre(n_ / 2 + 2)) {
        for (const auto& [a, b] : pairing.pairs) {
            partner_[a] = b;
            partner_[b] = a;
        }
        // outermost first: ket chain top-down, then bra chain top-down
        for (int i = 0; i < n_; ++i) order_.push_back(i);
    }

    double run() { return level(0); }

private:
    double bump(double x) const {
        if (x > 0.0 && x < eps_) return theta0_ / eps_;
        if (x > -eps_ && x <= 0.0) return (1.0 - theta0_) / eps_;
        return 0.0;
    }

    double level(std::size_t depth) {
        if (depth == order_.size()) {
            return 1.0;
        }
        const int v = order_[depth];
        const int par = layout_.parent(v);
        double lo = 0.0;
        double hi = par == -1 ? t_ : values_[par];
        const int p = partner_[v];
        const bool partner_fixed = fixed_[p];
        if (partner_fixed) {
            lo = std::max(lo, values_[p] - eps_);
            hi = std::min(hi, values_[p] + eps_);
        }
        if (!(hi > lo)) {
            return 0.0;
        }

        std::vector<double> cuts{lo, hi};
        std::vector<double> anchors{0.0, t_};
        for (int k = 0; k < n_; ++k) {
            if (fixed_[k]) anchors.push_back(values_[k]);
        }
        for (double a : anchors) {
            for (int m = -n_ - 1; m <= n_ + 1; ++m) {
                const double c = a + m * eps_;
                if (c > lo && c < hi) cuts.push_back(c);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        double sum = 0.0;
        fixed_[v] = true;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c];
            const double b = cuts[c + 1];
            const double half = 0.5 * (b - a);
            const double mid = 0.5 * (a + b);
            if (half <= 0.0) continue;
            for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
                const double x = mid + half * rule_.nodes[q];
                values_[v] = x;
                double w = 1.0;
                if (partner_fixed) {
                    const int first = std::min(v, p);
                    const int second = std::max(v, p);
                    w = bump(values_[first] - values_[second]);
                    if (w == 0.0) continue;
                }
                sum += half * rule_.weights[q] * w * level(depth + 1);
            }
        }
        fixed_[v] = false;
        return sum;
    }

    BranchLayout layout_;
    int n_;
    std::vector<int> partner_;
    double theta0_;
    double t_;
    double eps_;
    std::vector<double> values_;
    std::vector<bool> fixed_;
    std::vector<int> order_;
    GaussRule rule_;
};

/// Neville extrapolation of (x_i, y_i) to x = 0.
double extrapolate_to_zero(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> p = ys;
    const std::size_t m = xs.size();
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t i = 0; i + k < m; ++i) {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    return p[0];
}

}  // namespace

double quadrature_oracle(const BranchLayout& layout, const WickPairing& pairing, double theta0,
                         double t, double epsilon) {
    check_pairing(layout, pairing);
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) {
        throw std::invalid_argument("quadrature_oracle: theta0 outside [0, 1]");
    }
    if (!(t >= 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("quadrature_oracle: need t >= 0 and epsilon > 0");
    }
    if (layout.total() == 0) {
        return 1.0;
    }
    return Oracle(layout, pairing, theta0, t, epsilon).run();
}

OracleEstimate extrapolated_oracle(const BranchLayout& layout, const WickPairing& pairing,
                                   double theta0, double t, const OracleOptions& options) {
    OracleEstimate est;
    if (t == 0.0 || layout.total() == 0) {
        est.value = est.previous = quadrature_oracle(layout, pairing, theta0, t, 1.0);
        return est;
    }
    // degree n/2 in eps: n/2 + 1 levels are exact, one more checks it
    const int levels = layout.total() / 2 + 2;
    double eps = options.relative_epsilon * t;
    for (int i = 0; i < levels; ++i) {
        est.epsilons.push_back(eps);
        est.raw.push_back(quadrature_oracle(layout, pairing, theta0, t, eps));
        eps *= 0.5;
    }
    est.value = extrapolate_to_zero(est.epsilons, est.raw);
    est.previous = extrapolate_to_zero(
        std::vector<double>(est.epsilons.begin() + 1, est.epsilons.end()),
        std::vector<double>(est.raw.begin() + 1, est.raw.end()));
    const double scale = std::max(std::abs(est.value), std::pow(t, layout.total() / 2));
    if (std::abs(est.value - est.previous) > options.tolerance * scale) {
        throw ConvergenceError("quadrature oracle did not converge for " + layout.to_string() +
                               " " + pairing.to_string() + ": " + std::to_string(est.previous) +
                               " vs " + std::to_string(est.value));
    }
    return est;
}

}  // namespace collapse_kaon::wick
