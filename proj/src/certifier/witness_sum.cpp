#include "flawkit/certifier.hpp"
#include "flawkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace flawkit {

namespace {

struct Expansion {
    const StateIndex& index;
    const Strategy& strategy;
    std::size_t horizon;
    std::size_t limit;

    std::set<WitnessSequence> sequences;
    std::size_t trajectories = 0;
    double failure = 0;
    bool agree = true;

    Trajectory path;

    void visit(std::size_t k, const StrategyCursor& cursor, double probability) {
        if (path.steps() == horizon) {
            if (++trajectories > limit)
                throw CapacityError("more than " + std::to_string(limit) + " bad trajectories at horizon " +
                                    std::to_string(horizon));
            failure += probability;
            auto w = witness_sequence(path);
            if (reconstruct(w, strategy).addressed != path.addressed) agree = false;
            sequences.insert(std::move(w));
            return;
        }
        const FlawSet& u = index.present(k);
        const FlawId i = cursor.next(u);
        FlawSet kept = u;
        kept.erase(i);
        for (const auto& t : index.transitions(k, i)) {
            const FlawSet& next = index.present(t.to);
            if (next.empty()) continue;
            StrategyCursor c = cursor;
            c.advance(i, u, next);
            path.addressed.push_back(i);
            path.present.push_back(next);
            path.introduced.push_back(next - kept);
            visit(t.to, c, probability * t.probability);
            path.addressed.pop_back();
            path.present.pop_back();
            path.introduced.pop_back();
        }
    }
};

} // namespace

WitnessSumReport witness_sum_check(const StateIndex& index, const Strategy& strategy, const Measure& mu,
                                   const ChargeTable& charges, const std::vector<double>& psi, std::size_t t,
                                   std::size_t trajectory_limit) {
    const auto context = condition_context(index, mu);
    const auto condition = evaluate_condition(charges, psi, context);

    Expansion e{index, strategy, t, trajectory_limit, {}, 0, 0, true, {}};
    for (std::size_t k = 0; k < index.initial_support().size(); ++k) {
        const std::size_t s = index.initial_support()[k];
        const FlawSet& u = index.present(s);
        if (u.empty()) continue;
        e.path = Trajectory{};
        e.path.present.push_back(u);
        e.path.introduced.push_back(u);
        e.visit(s, StrategyCursor(strategy, u), index.initial_probability()[k]);
    }

    WitnessSumReport r;
    r.horizon = t;
    r.trajectories = e.trajectories;
    r.sequences = e.sequences.size();
    r.failure_probability = e.failure;
    r.reconstructions_agree = e.agree;
    r.max_zeta = condition.max_zeta();
    r.max_theta_over_mu = std::exp2(context.log2_max_theta_over_mu);

    for (const auto& w : e.sequences) {
        const auto rec = reconstruct(w, strategy);
        double product = 1;
        for (std::size_t i = 1; i < w.sets.size(); ++i) product *= charges.get(rec.addressed[i - 1], w.sets[i]);
        r.lhs += product;
    }
    double span_sum = 1;
    for (FlawId id : context.span) span_sum *= 1 + psi[id];
    double max_inverse = 1;
    for (double p : psi)
        if (p < 1) max_inverse /= p;
    r.rhs = std::pow(r.max_zeta, static_cast<double>(t)) * span_sum * max_inverse;
    r.failure_bound = r.max_theta_over_mu * r.lhs;

    const double slack = 1e-12;
    r.sum_bound_holds = r.lhs <= r.rhs * (1 + slack) + slack;
    r.corollary_holds = r.failure_probability <= r.failure_bound * (1 + slack) + slack;
    return r;
}

} // namespace flawkit
