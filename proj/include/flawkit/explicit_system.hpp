#pragma once

#include "flawkit/engine.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flawkit {

/// A finite system given by tables; state k is encoded as State{k}. Intended for toys and tests.
class ExplicitSystem final : public FlawSystem {
public:
    ExplicitSystem(std::size_t states, std::size_t flaws);

    ExplicitSystem& set_flaw(FlawId i, std::vector<int> members, bool primary = false);
    ExplicitSystem& set_action(FlawId i, int from, std::vector<std::pair<int, double>> to);
    ExplicitSystem& set_initial(std::vector<std::pair<int, double>> theta);

    /// Throws ConfigError when any member state lacks a normalized action.
    void validate() const;

    /// {"states": N, "flaws": [{"primary": b, "members": [...], "actions": {"s": [[t, p], ...]}}],
    ///  "initial": [[s, p], ...]}
    static ExplicitSystem from_json(const std::string& text);

    std::size_t state_count() const { return n_; }

    std::size_t flaw_count() const override { return members_.size(); }
    bool primary(FlawId i) const override { return primary_.at(i); }
    FlawSet present(const State& s) const override;
    State sample(FlawId i, const State& s, Rng& rng) const override;
    bool enumerable() const override { return true; }
    std::vector<Transition> transitions(FlawId i, const State& s) const override;
    const InitialDistribution& initial() const override { return initial_; }

private:
    const std::vector<std::pair<int, double>>& action(FlawId i, int from) const;
    int decode(const State& s) const;

    std::size_t n_;
    std::vector<std::vector<bool>> members_;
    std::vector<bool> primary_;
    std::vector<std::map<int, std::vector<std::pair<int, double>>>> actions_;
    InitialDistribution initial_;
};

} // namespace flawkit
