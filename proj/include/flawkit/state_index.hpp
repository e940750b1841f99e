#pragma once

#include "flawkit/engine.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace flawkit {

struct IndexedTransition {
    std::uint32_t to;
    double probability;
};

/**
 * The reachable closure Ω of an enumerable flaw system: every state reachable from
 * support(θ) by any action at any flawed state, with U(σ) and the action supports cached.
 */
class StateIndex {
public:
    const FlawSystem& system() const { return *system_; }
    std::size_t size() const { return states_.size(); }
    std::size_t flaw_count() const { return system_->flaw_count(); }

    const State& state(std::size_t k) const { return states_[k]; }
    std::optional<std::size_t> find(const State& s) const;
    const FlawSet& present(std::size_t k) const { return present_[k]; }
    bool flawless(std::size_t k) const { return present_[k].empty(); }

    /// ρ_i(state k, ·) for i ∈ U(state k); targets are indices into this index.
    const std::vector<IndexedTransition>& transitions(std::size_t k, FlawId i) const;

    const std::vector<std::size_t>& initial_support() const { return initial_support_; }
    const std::vector<double>& initial_probability() const { return initial_probability_; }

    friend StateIndex enumerate_states(const FlawSystem& system, std::size_t limit);

private:
    explicit StateIndex(const FlawSystem& system) : system_(&system) {}
    std::size_t intern(State s);

    const FlawSystem* system_;
    std::vector<State> states_;
    std::vector<FlawSet> present_;
    // Aligned with present_[k]: one transition list per present flaw in increasing id order.
    std::vector<std::vector<std::vector<IndexedTransition>>> actions_;
    std::unordered_map<State, std::size_t, StateHash> lookup_;
    std::vector<std::size_t> initial_support_;
    std::vector<double> initial_probability_;
};

/// Breadth-first closure from support(θ). Throws CapacityError beyond `limit` states.
StateIndex enumerate_states(const FlawSystem& system, std::size_t limit = 1'000'000);

} // namespace flawkit
