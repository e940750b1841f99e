#include "flawkit/engine.hpp"

#include <algorithm>
#include <map>

namespace flawkit {

WitnessSequence witness_sequence(const Trajectory& trajectory) {
    const std::size_t t = trajectory.steps();
    WitnessSequence w;
    w.sets.reserve(t + 1);
    for (std::size_t i = 0; i <= t; ++i) {
        std::vector<FlawId> kept;
        for (FlawId k : trajectory.introduced[i]) {
            // Later steps are 1-based j = i+1…t; step j addresses addressed[j-1] and yields states[j].
            bool collateral = false;
            for (std::size_t j = i + 1; j <= t; ++j) {
                if (trajectory.addressed[j - 1] == k) break;
                if (!trajectory.present[j].contains(k)) {
                    collateral = true;
                    break;
                }
            }
            if (!collateral) kept.push_back(k);
        }
        w.sets.push_back(FlawSet::from_sorted(std::move(kept)));
    }
    return w;
}

Reconstruction reconstruct(const WitnessSequence& witness, const Strategy& strategy) {
    Reconstruction r{true, {}, {}};
    if (witness.sets.empty()) return r;
    const std::size_t t = witness.sets.size() - 1;

    if (strategy.kind() == Strategy::Kind::stack) {
        std::vector<FlawId> stack;
        auto push = [&](const FlawSet& s) {
            std::vector<FlawId> fresh(s.begin(), s.end());
            std::sort(fresh.begin(), fresh.end(), [&](FlawId a, FlawId b) { return strategy.rank(a) > strategy.rank(b); });
            stack.insert(stack.end(), fresh.begin(), fresh.end());
        };
        push(witness.sets[0]);
        for (std::size_t i = 1; i <= t; ++i) {
            if (stack.empty()) {
                r.plausible = false;
                return r;
            }
            r.addressed.push_back(stack.back());
            stack.pop_back();
            push(witness.sets[i]);
        }
        r.terminal = FlawSet(stack);
        return r;
    }

    FlawSet current = witness.sets[0];
    for (std::size_t i = 1; i <= t; ++i) {
        if (current.empty()) {
            r.plausible = false;
            return r;
        }
        const FlawId chosen = strategy.choose(current, i - 1);
        r.addressed.push_back(chosen);
        current.erase(chosen);
        current = current | witness.sets[i];
    }
    r.terminal = std::move(current);
    return r;
}

bool multiset_balanced(const WitnessSequence& witness, const Reconstruction& r) {
    std::map<FlawId, long> count;
    for (const auto& s : witness.sets)
        for (FlawId id : s) ++count[id];
    for (FlawId id : r.addressed) --count[id];
    for (FlawId id : r.terminal) --count[id];
    for (const auto& [id, c] : count)
        if (c != 0) return false;
    return true;
}

} // namespace flawkit
