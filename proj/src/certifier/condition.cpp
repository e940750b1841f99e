#include "flawkit/certifier.hpp"
#include "flawkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace flawkit {

namespace {

double log2_sum_exp2(const std::vector<double>& xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(xs.begin(), xs.end());
    double s = 0;
    for (double x : xs) s += std::exp2(x - top);
    return top + std::log2(s);
}

double log2_psi(const FlawSet& s, const std::vector<double>& psi) {
    double r = 0;
    for (FlawId id : s) r += std::log2(psi[id]);
    return r;
}

std::vector<double> zetas(const ChargeTable& charges, const std::vector<double>& psi) {
    std::vector<double> zeta(psi.size(), 0.0);
    for (const auto& [key, gamma] : charges.entries()) {
        double w = gamma;
        for (FlawId id : key.second) w *= psi[id];
        zeta[key.first] += w;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) zeta[i] /= psi[i];
    return zeta;
}

} // namespace

double ConditionReport::step_bound(double s) const {
    if (!feasible) return std::numeric_limits<double>::infinity();
    return (t0_refined + s) / delta;
}

ConditionContext condition_context(const StateIndex& index, const Measure& mu) {
    ConditionContext c;
    c.m = index.flaw_count();
    for (std::size_t i = 0; i < c.m; ++i) c.primary.push_back(index.system().primary(static_cast<FlawId>(i)));
    c.log2_inv_mu_min = -std::log2(mu.min());
    double best = 0;
    std::set<FlawSet> sets;
    for (std::size_t k = 0; k < index.initial_support().size(); ++k) {
        const std::size_t s = index.initial_support()[k];
        best = std::max(best, index.initial_probability()[k] / mu[s]);
        sets.insert(index.present(s));
        c.span = c.span | index.present(s);
    }
    c.log2_max_theta_over_mu = std::log2(best);
    c.initial_sets.assign(sets.begin(), sets.end());
    return c;
}

ConditionReport evaluate_condition(const ChargeTable& charges, const std::vector<double>& psi,
                                   const ConditionContext& context) {
    if (psi.size() != context.m) throw DomainError("psi has " + std::to_string(psi.size()) + " entries for " +
                                                   std::to_string(context.m) + " flaws");
    for (double p : psi)
        if (!(p > 0) || !std::isfinite(p)) throw DomainError("psi entries must be positive and finite");
    for (const auto& [key, gamma] : charges.entries()) {
        if (key.first >= context.m) throw DomainError("charge for flaw outside [0, m)");
        for (FlawId id : key.second)
            if (id >= context.m) throw DomainError("charge set references flaw outside [0, m)");
    }

    ConditionReport r;
    r.psi = psi;
    r.zeta = zetas(charges, psi);
    double worst = 0;
    for (double z : r.zeta) worst = std::max(worst, z);
    r.delta = 1 - worst;
    r.feasible = std::all_of(r.zeta.begin(), r.zeta.end(), [](double z) { return z < 1; });

    r.t0_coarse = context.log2_inv_mu_min;
    if (context.m > 0) {
        const double hi = *std::max_element(psi.begin(), psi.end());
        const double lo = *std::min_element(psi.begin(), psi.end());
        r.t0_coarse += static_cast<double>(context.m) * std::log2((1 + hi) / lo);
    }

    const bool all_primary = std::all_of(context.primary.begin(), context.primary.end(), [](bool b) { return b; });
    double log2_span_sum = 0;
    if (all_primary && !context.initial_sets.empty()) {
        std::vector<double> terms;
        for (const auto& s : context.initial_sets) terms.push_back(log2_psi(s, psi));
        log2_span_sum = log2_sum_exp2(terms);
    } else {
        for (FlawId id : context.span) log2_span_sum += std::log2(1 + psi[id]);
    }
    double log2_max_inverse = 0;
    for (double p : psi)
        if (p < 1) log2_max_inverse -= std::log2(p);
    r.t0_refined = context.log2_max_theta_over_mu + log2_span_sum + log2_max_inverse;
    return r;
}

std::vector<double> optimize_psi(const ChargeTable& charges, std::vector<double> start, int sweeps) {
    const std::size_t m = charges.flaw_count();
    std::vector<double> psi = start.empty() ? std::vector<double>(m, 1.0) : std::move(start);
    if (psi.size() != m) throw DomainError("psi start vector has the wrong length");
    if (m == 0) return psi;

    // Coordinate descent on a soft maximum whose temperature is lowered between rounds;
    // the best hard maximum seen anywhere is returned.
    std::vector<double> best_psi = psi;
    double best_max = std::numeric_limits<double>::infinity();
    double temperature = 0.1;
    auto objective = [&](const std::vector<double>& p) {
        const auto z = zetas(charges, p);
        const double top = *std::max_element(z.begin(), z.end());
        if (top < best_max) best_max = top, best_psi = p;
        double s = 0;
        for (double v : z) s += std::exp((v - top) / temperature);
        return top + temperature * std::log(s);
    };
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int round = 0; round < 5; ++round, temperature /= 4) {
        double current = objective(psi);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            const double before = current;
            for (std::size_t i = 0; i < m; ++i) {
                const double base = std::log(psi[i]);
                auto at = [&](double x) {
                    auto p = psi;
                    p[i] = std::exp(x);
                    return objective(p);
                };
                double best_x = base, best_v = current;
                for (int k = -12; k <= 12; ++k) {
                    if (k == 0) continue;
                    const double x = base + k * 0.5;
                    const double v = at(x);
                    if (v < best_v) best_v = v, best_x = x;
                }
                double a = best_x - 0.5, b = best_x + 0.5;
                double c = b - phi * (b - a), d = a + phi * (b - a);
                double fc = at(c), fd = at(d);
                for (int it = 0; it < 50; ++it) {
                    if (fc < fd) {
                        b = d, d = c, fd = fc;
                        c = b - phi * (b - a);
                        fc = at(c);
                    } else {
                        a = c, c = d, fc = fd;
                        d = a + phi * (b - a);
                        fd = at(d);
                    }
                }
                const double x = (a + b) / 2;
                const double v = at(x);
                if (v < best_v) best_v = v, best_x = x;
                if (best_v < current) {
                    current = best_v;
                    psi[i] = std::exp(best_x);
                }
            }
            if (before - current < 1e-12) break;
        }
    }
    return best_psi;
}

} // namespace flawkit
