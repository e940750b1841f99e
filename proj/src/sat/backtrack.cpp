#include "flawkit/errors.hpp"
#include "flawkit/sat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flawkit::sat {

BacktrackSystem::BacktrackSystem(const CspInstance& csp, const ProductMeasure& p)
    : csp_(&csp), p_(&p), initial_(InitialDistribution::point(State(csp.variables(), unassigned))) {
    for (std::size_t v = 0; v < csp.variables(); ++v)
        if (csp.domain(v) == 0) throw ConfigError("empty domain");
}

FlawSet BacktrackSystem::present(const State& s) const {
    std::vector<FlawId> ids;
    for (std::size_t v = 0; v < s.size(); ++v)
        if (s[v] == unassigned) ids.push_back(static_cast<FlawId>(v));
    return FlawSet::from_sorted(std::move(ids));
}

State BacktrackSystem::assign(const State& s, std::size_t v, std::int32_t x) const {
    State t = s;
    t[v] = x;
    if (auto c = csp_->lowest_violated(v, t))
        for (auto u : csp_->constraints()[*c].scope) t[u] = unassigned;
    return t;
}

State BacktrackSystem::sample(FlawId i, const State& s, Rng& rng) const {
    const auto x = static_cast<std::int32_t>(rng.pick(p_->distribution(i)));
    return assign(s, i, x);
}

std::vector<Transition> BacktrackSystem::transitions(FlawId i, const State& s) const {
    std::vector<Transition> out;
    for (std::int32_t x = 0; x < static_cast<std::int32_t>(csp_->domain(i)); ++x) {
        State t = assign(s, i, x);
        auto same = std::find_if(out.begin(), out.end(), [&](const Transition& e) { return e.to == t; });
        if (same != out.end())
            same->probability += p_->p(i, x);
        else
            out.push_back({std::move(t), p_->p(i, x)});
    }
    return out;
}

void BacktrackSystem::check_state(const State& s) const {
    for (std::size_t c = 0; c < csp_->constraints().size(); ++c)
        if (csp_->constraints()[c].violated_by(s))
            throw InternalError("constraint " + std::to_string(c) + " violated by a stored partial assignment");
}

ResamplingSystem::ResamplingSystem(const CspInstance& csp, const ProductMeasure& p) : csp_(&csp), p_(&p) {
    // θ = P over full assignments.
    const std::size_t n = csp.variables();
    double count = 1;
    for (std::size_t v = 0; v < n; ++v) count *= csp.domain(v);
    if (count > 1e6) throw CapacityError("resampling encoding enumerates θ over at most 10^6 assignments");
    State a(n, 0);
    while (true) {
        initial_.support.push_back(a);
        initial_.probability.push_back(p.weight(a));
        std::size_t v = 0;
        while (v < n && ++a[v] == static_cast<std::int32_t>(csp.domain(v))) a[v++] = 0;
        if (v == n) break;
    }
}

FlawSet ResamplingSystem::present(const State& s) const {
    std::vector<FlawId> ids;
    for (std::size_t c = 0; c < csp_->constraints().size(); ++c)
        if (csp_->constraints()[c].violated_by(s)) ids.push_back(static_cast<FlawId>(c));
    return FlawSet::from_sorted(std::move(ids));
}

State ResamplingSystem::sample(FlawId i, const State& s, Rng& rng) const {
    State t = s;
    for (auto v : csp_->constraints()[i].scope) t[v] = static_cast<std::int32_t>(rng.pick(p_->distribution(v)));
    return t;
}

std::vector<Transition> ResamplingSystem::transitions(FlawId i, const State& s) const {
    const auto& scope = csp_->constraints()[i].scope;
    std::vector<Transition> out;
    State t = s;
    for (auto v : scope) t[v] = 0;
    while (true) {
        double p = 1;
        for (auto v : scope) p *= p_->p(v, t[v]);
        out.push_back({t, p});
        std::size_t k = 0;
        while (k < scope.size() && ++t[scope[k]] == static_cast<std::int32_t>(csp_->domain(scope[k]))) t[scope[k++]] = 0;
        if (k == scope.size()) break;
    }
    return out;
}

BacktrackResult backtrack_run(const CspInstance& csp, const ProductMeasure& p, Rng& rng, std::uint64_t cap,
                              bool record) {
    BacktrackSystem system(csp, p);
    BacktrackResult out{Outcome::flawless, 0, 0, {}, std::nullopt};
    RunOptions options;
    options.cap = cap;
    options.record = record;
    options.observer = [&](const StepEvent& e) {
        if (e.present_after.size() >= e.present_before.size()) ++out.backtracks;
    };
    auto r = run(system, Strategy::identity(), rng, options);
    out.outcome = r.outcome;
    out.steps = r.steps;
    out.assignment = std::move(r.final_state);
    out.trajectory = std::move(r.trajectory);
    if (out.outcome == Outcome::flawless && !csp.satisfies(out.assignment))
        throw InternalError("backtracking returned an assignment that violates a constraint");
    return out;
}

ChargeTable charges_variable_setting(const CspInstance& csp, const ProductMeasure& p) {
    ChargeTable table(csp.variables(), Semantics::covers, false);
    for (std::size_t v = 0; v < csp.variables(); ++v) {
        table.set(static_cast<FlawId>(v), FlawSet{}, 1.0);
        for (auto c : csp.constraints_of(v)) {
            const auto& con = csp.constraints()[c];
            FlawSet s(std::vector<FlawId>(con.scope.begin(), con.scope.end()));
            // Distinct constraints sharing a scope feed the same target states; their flows add.
            table.set(static_cast<FlawId>(v), s, table.get(static_cast<FlawId>(v), s) + p.violation_probability(con));
        }
    }
    return table;
}

ConditionContext backtrack_context(const CspInstance& csp, const ProductMeasure& p) {
    ConditionContext c;
    const std::size_t n = csp.variables();
    c.m = n;
    c.primary.assign(n, true);
    double log2_z = 0, log2_min_weight = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto& d = p.distribution(v);
        log2_z += std::log2(1 + std::accumulate(d.begin(), d.end(), 0.0));
        log2_min_weight += std::log2(std::min(1.0, *std::min_element(d.begin(), d.end())));
    }
    c.log2_inv_mu_min = log2_z - log2_min_weight;
    c.log2_max_theta_over_mu = log2_z;
    std::vector<FlawId> all(n);
    for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<FlawId>(v);
    c.span = FlawSet::from_sorted(all);
    c.initial_sets = {c.span};
    return c;
}

namespace {

std::vector<double> setting_lhs(const CspInstance& csp, const ProductMeasure& p, const std::vector<double>& psi) {
    std::vector<double> lhs(csp.variables());
    for (std::size_t v = 0; v < csp.variables(); ++v) {
        double sum = 1;
        for (auto c : csp.constraints_of(v)) {
            const auto& con = csp.constraints()[c];
            double w = p.violation_probability(con);
            for (auto u : con.scope) w *= psi[u];
            sum += w;
        }
        lhs[v] = sum / psi[v];
    }
    return lhs;
}

double max_of(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}

} // namespace

VariableSettingReport condition_variable_setting(const CspInstance& csp, const ProductMeasure& p,
                                                 std::optional<std::vector<double>> psi) {
    VariableSettingReport r;
    const std::size_t n = csp.variables();
    if (psi) {
        if (psi->size() != n) throw DomainError("psi needs one entry per variable");
        for (double x : *psi)
            if (!(x > 0)) throw DomainError("psi entries must be positive");
        r.psi = *psi;
    } else {
        auto worst = [&](double log_alpha) {
            return max_of(setting_lhs(csp, p, std::vector<double>(n, 2 * std::exp(log_alpha))));
        };
        // Log-spaced grid, then golden-section on the best bracket.
        double best_x = 0, best_v = worst(0);
        const double step = 0.05;
        for (double x = -12; x <= 12; x += step) {
            const double v = worst(x);
            if (v < best_v) best_v = v, best_x = x;
        }
        const double phi = (std::sqrt(5.0) - 1) / 2;
        double a = best_x - step, b = best_x + step;
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = worst(c), fd = worst(d);
        for (int it = 0; it < 100; ++it) {
            if (fc < fd) {
                b = d, d = c, fd = fc;
                c = b - phi * (b - a);
                fc = worst(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + phi * (b - a);
                fd = worst(d);
            }
        }
        const double x = worst((a + b) / 2) < best_v ? (a + b) / 2 : best_x;
        r.alpha = std::exp(x);
        r.psi.assign(n, 2 * *r.alpha);
    }
    r.lhs = setting_lhs(csp, p, r.psi);
    r.max_lhs = max_of(r.lhs);
    r.feasible = std::all_of(r.lhs.begin(), r.lhs.end(), [](double x) { return x < 1; });
    r.condition = evaluate_condition(charges_variable_setting(csp, p), r.psi, backtrack_context(csp, p));
    return r;
}

double ksat_degree_threshold(unsigned k) {
    if (k < 2) throw DomainError("clause width must be at least 2");
    const double kd = k;
    return std::exp2(kd) / kd * std::pow(1 - 1 / kd, kd - 1);
}

} // namespace flawkit::sat
