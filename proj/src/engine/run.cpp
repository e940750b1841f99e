#include "flawkit/engine.hpp"
#include "flawkit/errors.hpp"

#include <cmath>

namespace flawkit {

std::vector<Transition> FlawSystem::transitions(FlawId, const State&) const {
    throw CapabilityError("system provides samplers only; enumeration unavailable");
}

std::string to_string(Outcome o) { return o == Outcome::flawless ? "flawless" : "cap-exceeded"; }

namespace {

void check_distribution(const FlawSystem& system, FlawId i, const State& s) {
    double total = 0;
    for (const auto& t : system.transitions(i, s)) {
        if (!(t.probability > 0) || t.probability > 1 + 1e-12)
            throw ConfigError("flaw " + system.describe_flaw(i) + ": transition probability " +
                              std::to_string(t.probability) + " outside (0, 1]");
        total += t.probability;
    }
    if (std::abs(total - 1) > 1e-12)
        throw ConfigError("flaw " + system.describe_flaw(i) + ": action probabilities sum to " + std::to_string(total));
}

void check_primary(const FlawSystem& system, FlawId addressed, const FlawSet& before, const FlawSet& after) {
    for (FlawId id : before) {
        if (id != addressed && system.primary(id) && !after.contains(id))
            throw InternalError("primary flaw " + system.describe_flaw(id) + " eradicated by addressing " +
                                system.describe_flaw(addressed));
    }
}

} // namespace

RunResult run(const FlawSystem& system, const Strategy& strategy, Rng& rng, const RunOptions& options) {
    const auto& theta = system.initial();
    if (theta.support.empty()) throw ConfigError("initial distribution has empty support");
    const std::size_t k = theta.support.size() == 1 ? 0 : rng.pick(theta.probability);
    return run_from(system, strategy, theta.support[k], rng, options);
}

RunResult run_from(const FlawSystem& system, const Strategy& strategy, State start, Rng& rng,
                   const RunOptions& options) {
    strategy.validate(system.flaw_count());
    const bool check = options.check || options.record;

    RunResult result{Outcome::flawless, 0, std::move(start), std::nullopt};
    State& state = result.final_state;
    FlawSet present = system.present(state);
    if (check) system.check_state(state);

    Trajectory* trajectory = nullptr;
    if (options.record) {
        result.trajectory.emplace();
        trajectory = &*result.trajectory;
        trajectory->states.push_back(state);
        trajectory->present.push_back(present);
        trajectory->introduced.push_back(present);
    }

    StrategyCursor cursor(strategy, present);
    while (!present.empty()) {
        if (result.steps >= options.cap) {
            result.outcome = Outcome::cap_exceeded;
            return result;
        }
        const FlawId i = cursor.next(present);
        if (!present.contains(i)) throw InternalError("strategy chose absent flaw " + system.describe_flaw(i));
        if (check && system.enumerable()) check_distribution(system, i, state);

        State next = system.sample(i, state, rng);
        FlawSet next_present = system.present(next);
        if (check) {
            system.check_state(next);
            check_primary(system, i, present, next_present);
        }
        if (options.observer) options.observer(StepEvent{result.steps, i, state, next, present, next_present});
        cursor.advance(i, present, next_present);

        if (trajectory) {
            FlawSet kept = present;
            kept.erase(i);
            trajectory->addressed.push_back(i);
            trajectory->introduced.push_back(next_present - kept);
            trajectory->states.push_back(next);
            trajectory->present.push_back(next_present);
        }
        state = std::move(next);
        present = std::move(next_present);
        ++result.steps;
    }
    return result;
}

} // namespace flawkit
