#pragma once

#include "flawkit/flaw_set.hpp"
#include "flawkit/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flawkit {

/// Every domain encodes its states as a vector of small integers; equality is element-wise.
using State = std::vector<std::int32_t>;

struct StateHash {
    std::size_t operator()(const State& s) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL ^ s.size();
        for (auto x : s) h = mix64(h ^ static_cast<std::uint32_t>(x));
        return static_cast<std::size_t>(h);
    }
};

struct Transition {
    State to;
    double probability;
};

/// The distribution θ over initial states.
struct InitialDistribution {
    std::vector<State> support;
    std::vector<double> probability;

    static InitialDistribution point(State s) { return {{std::move(s)}, {1.0}}; }
};

/**
 * A flaw/action system: m flaws over an implicit state space, an action per flaw,
 * and an initial distribution.
 *
 * Implementations must be immutable after construction. `sample` is the only
 * action entry point the engine needs; `transitions` is required for
 * certification and only implemented by enumerable systems.
 */
class FlawSystem {
public:
    virtual ~FlawSystem() = default;

    virtual std::size_t flaw_count() const = 0;
    virtual bool primary(FlawId i) const = 0;

    /// U(σ): ids of all flaws present at `s`.
    virtual FlawSet present(const State& s) const = 0;
    virtual bool holds(FlawId i, const State& s) const { return present(s).contains(i); }

    /// Draws τ ~ ρ_i(s, ·). Only called with s ∈ f_i.
    virtual State sample(FlawId i, const State& s, Rng& rng) const = 0;

    virtual bool enumerable() const { return false; }

    /// Support of ρ_i(s, ·) with probabilities. Default refuses with CapabilityError.
    virtual std::vector<Transition> transitions(FlawId i, const State& s) const;

    virtual const InitialDistribution& initial() const = 0;

    /// Throws InternalError if `s` violates a structural invariant of the domain.
    virtual void check_state(const State&) const {}

    virtual std::string describe_flaw(FlawId i) const { return "f" + std::to_string(i); }
};

/**
 * Flaw-choice rule. Fixed permutations address the highest-priority present flaw;
 * `random_per_step` uses a fresh permutation at every step derived from a stream key,
 * so the permutation of any step can be replayed; `stack` follows the recursive
 * stack discipline with pushes ordered by a fixed permutation.
 */
class Strategy {
public:
    enum class Kind { fixed_permutation, random_per_step, stack };

    /// Flaw-id order.
    static Strategy identity() { return Strategy(Kind::fixed_permutation, {}, 0); }
    /// `order[k]` is the flaw with the k-th highest priority; must be a permutation of [0, m).
    static Strategy permutation(std::vector<FlawId> order);
    static Strategy random_per_step(std::uint64_t stream_key) { return Strategy(Kind::random_per_step, {}, stream_key); }
    static Strategy stack(std::vector<FlawId> order = {});

    Kind kind() const { return kind_; }
    std::uint64_t stream_key() const { return key_; }
    std::string name() const;

    /// Position of flaw `i` in the permutation in force at `step`; smaller addresses first.
    std::uint64_t rank(FlawId i, std::uint64_t step = 0) const;

    /// The π-minimum of `flaws` at `step`. `flaws` must be nonempty.
    FlawId choose(const FlawSet& flaws, std::uint64_t step = 0) const;

    /// Throws ConfigError unless this strategy is usable with m flaws.
    void validate(std::size_t m) const;

private:
    Strategy(Kind kind, std::vector<FlawId> order, std::uint64_t key);

    Kind kind_;
    std::vector<FlawId> order_;
    std::vector<std::uint64_t> rank_;
    std::uint64_t key_;
};

enum class Outcome { flawless, cap_exceeded };

std::string to_string(Outcome o);

/// A recorded run. `states` has one more entry than `addressed`; `present[k]` is U(states[k]).
struct Trajectory {
    std::vector<State> states;
    std::vector<FlawSet> present;
    std::vector<FlawId> addressed;
    /// B_0 … B_t.
    std::vector<FlawSet> introduced;

    std::size_t steps() const { return addressed.size(); }
};

struct StepEvent {
    std::uint64_t step;
    FlawId addressed;
    const State& before;
    const State& after;
    const FlawSet& present_before;
    const FlawSet& present_after;
};

struct RunOptions {
    std::uint64_t cap = 1'000'000;
    bool record = false;
    /// Validate action distributions (enumerable systems), structural invariants and
    /// primary discipline at every step. Implied by `record`.
    bool check = false;
    std::function<void(const StepEvent&)> observer;
};

struct RunResult {
    Outcome outcome;
    std::uint64_t steps;
    State final_state;
    std::optional<Trajectory> trajectory;
};

/// Runs from a θ-sample. The same rng key, system and strategy reproduce the run exactly.
RunResult run(const FlawSystem& system, const Strategy& strategy, Rng& rng, const RunOptions& options);

/// Runs from a given initial state instead of sampling θ.
RunResult run_from(const FlawSystem& system, const Strategy& strategy, State start, Rng& rng,
                   const RunOptions& options);

struct WitnessSequence {
    std::vector<FlawSet> sets;

    friend bool operator==(const WitnessSequence&, const WitnessSequence&) = default;
    friend auto operator<=>(const WitnessSequence& a, const WitnessSequence& b) { return a.sets <=> b.sets; }
};

/// (B_0∖C_0, …, B_t∖C_t): drops each introduced flaw that disappears before it is next addressed.
WitnessSequence witness_sequence(const Trajectory& trajectory);

struct Reconstruction {
    bool plausible;
    /// Flaws addressed at steps 1…t (shorter when not plausible).
    std::vector<FlawId> addressed;
    /// S*_{t+1}.
    FlawSet terminal;
};

Reconstruction reconstruct(const WitnessSequence& witness, const Strategy& strategy);

/// For every id: occurrences across the witness sets minus occurrences in the addressed
/// sequence equal membership in the terminal set.
bool multiset_balanced(const WitnessSequence& witness, const Reconstruction& r);

/**
 * Incremental form of a strategy: yields the flaw to address at each step and absorbs the
 * result. Fixed and per-step-random strategies are memoryless; the stack strategy keeps
 * its stack here.
 */
class StrategyCursor {
public:
    StrategyCursor(const Strategy& strategy, const FlawSet& initial_present);

    /// Flaw to address at the current state; `present` must be U of that state.
    FlawId next(const FlawSet& present) const;
    void advance(FlawId addressed, const FlawSet& before, const FlawSet& after);

private:
    const Strategy* strategy_;
    std::uint64_t step_ = 0;
    std::vector<FlawId> stack_;
};

class StateIndex;

/// True iff flaw i can never be eradicated by addressing another flaw, over the enumerated states.
bool verify_primary(const StateIndex& index, FlawId i);

} // namespace flawkit
