#include "flawkit/aec.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace flawkit::aec {

namespace {

const double golden = (std::sqrt(5.0) - 1) / 2;

template <class F>
std::pair<double, double> golden_min(F f, double a, double b, int iterations = 200) {
    double c = b - golden * (b - a), d = a + golden * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iterations && b - a > 1e-14 * (1 + std::abs(a)); ++it) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - golden * (b - a);
            fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + golden * (b - a);
            fd = f(d);
        }
    }
    const double x = (a + b) / 2;
    return {x, f(x)};
}

} // namespace

std::size_t q_from_c(std::size_t max_degree, double c) {
    if (max_degree < 2) throw DomainError("q_from_c needs Δ ≥ 2");
    if (!(c > 0)) throw DomainError("c must be positive");
    const double d = static_cast<double>(max_degree - 1);
    return 2 * (max_degree - 1) + static_cast<std::size_t>(std::ceil(c * d - 1e-9));
}

double c_from_q(std::size_t max_degree, std::size_t q) {
    if (max_degree < 2) throw DomainError("c_from_q needs Δ ≥ 2");
    const double d = static_cast<double>(max_degree - 1);
    return (static_cast<double>(q) - 2 * d) / d;
}

double aec_bound(double c, double alpha) {
    if (!(c > 1)) throw DomainError("c must exceed 1");
    if (!(alpha > 0) || !(alpha < c)) throw DomainError("alpha must lie in (0, c)");
    return 1 / alpha + alpha * alpha * alpha / (c * c * (c * c - alpha * alpha));
}

double aec_profile_zeta(double c, double alpha, std::size_t terms) {
    if (terms == 0) return aec_bound(c, alpha);
    double s = 1 / alpha;
    for (std::size_t l = 3; l < 3 + terms; ++l) s += std::pow(alpha / c, static_cast<double>(2 * l - 3)) / c;
    return s;
}

AecConditionReport aec_condition(double c) {
    if (!(c > 1)) throw DomainError("aec_condition needs c > 1, got " + std::to_string(c));
    AecConditionReport r;
    const auto [alpha, value] = golden_min([&](double a) { return aec_bound(c, a); }, 1.0, c);
    r.alpha = alpha;
    r.value = value;
    r.closed_form_alpha = c * golden;
    r.closed_form_value = 2 / c;
    r.feasible = value < 1;
    return r;
}

HFreeReport aec_condition_hfree(double c, double gamma, double delta_h, double max_degree) {
    if (!(c > 1)) throw DomainError("aec_condition_hfree needs c > 1");
    if (!(gamma > 0) || !(max_degree >= 1)) throw DomainError("H-free profile needs γ > 0 and Δ ≥ 1");
    const double k = gamma * std::pow(max_degree, -delta_h);
    auto f = [&](double b) { return (b + b * k / (b * (b * b - 1))) / c; };
    const double hi = 2 + 2 * std::cbrt(2 * k);
    HFreeReport r;
    std::tie(r.beta, r.value) = golden_min(f, 1.0, hi);
    r.feasible = r.value < 1;
    return r;
}

std::optional<double> hfree_smallest_c(double gamma, double delta_h, double max_degree, double step, double c_max) {
    if (!(step > 0)) throw DomainError("grid step must be positive");
    const auto n = static_cast<std::size_t>(std::floor((c_max - 1) / step + 1e-9));
    for (std::size_t k = 1; k <= n; ++k) {
        const double c = 1 + static_cast<double>(k) * step;
        if (aec_condition_hfree(c, gamma, delta_h, max_degree).feasible) return c;
    }
    return std::nullopt;
}

ChargeTable aec_charges(const Graph& g, double Q, std::size_t min_length, std::size_t cycle_limit) {
    if (!(Q > 0)) throw DomainError("Q must be positive");
    ChargeTable table(g.edges(), Semantics::covers);
    for (std::uint32_t e = 0; e < g.edges(); ++e) {
        table.set(e, FlawSet{}, 1 / Q);
        std::map<FlawSet, std::size_t> counts;
        for (const auto& cycle : cycles_through(g, e, g.edges(), true, cycle_limit))
            if (cycle.size() >= min_length) ++counts[uncolored_part(cycle, e)];
        for (auto& [S, n] : counts) table.set(e, S, static_cast<double>(n) / Q);
    }
    return table;
}

AecStepBound aec_step_bound(const Graph& g, std::size_t q, double s, std::optional<double> c) {
    AecStepBound r;
    // Every state is a partial coloring, so |Ω| ≤ (q+1)^|E| and T₀ = log₂|Ω| is at most this.
    r.t0 = static_cast<double>(g.edges()) * std::log2(static_cast<double>(q) + 1);
    const std::size_t delta = g.max_degree();
    if (delta <= 1) {
        r.c = std::numeric_limits<double>::infinity();
        r.delta = 1;
    } else {
        r.c = c ? *c : c_from_q(delta, q);
        if (r.c > 1) r.delta = 1 - aec_condition(r.c).value;
    }
    r.feasible = r.delta > 0;
    r.steps = r.feasible ? (r.t0 + s) / r.delta : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace flawkit::aec
