#pragma once

#include "flawkit/explicit_system.hpp"
#include "flawkit/sat.hpp"

#include <vector>

namespace toys {

using flawkit::ExplicitSystem;

/// States 0 and 1 carry flaws 0 and 1; each action reaches the flawless state 2 w.p. ½
/// and otherwise swaps to the other flawed state.
inline ExplicitSystem ping_pong() {
    ExplicitSystem s(3, 2);
    s.set_flaw(0, {0}).set_flaw(1, {1});
    s.set_action(0, 0, {{1, 0.5}, {2, 0.5}});
    s.set_action(1, 1, {{0, 0.5}, {2, 0.5}});
    s.set_initial({{0, 1.0}});
    s.validate();
    return s;
}

/// A random explicit system: each flawed state's action spreads over up to three targets.
inline ExplicitSystem random_explicit(std::size_t states, std::size_t flaws, double density, flawkit::Rng& rng) {
    ExplicitSystem s(states, flaws);
    std::vector<std::vector<int>> members(flaws);
    for (std::size_t i = 0; i < flaws; ++i) {
        for (std::size_t k = 1; k < states; ++k)
            if (rng.bernoulli(density)) members[i].push_back(static_cast<int>(k));
        s.set_flaw(static_cast<flawkit::FlawId>(i), members[i]);
    }
    for (std::size_t i = 0; i < flaws; ++i)
        for (int from : members[i]) {
            const std::size_t targets = 1 + rng.below(3);
            std::vector<std::pair<int, double>> to;
            double total = 0;
            std::vector<double> w;
            for (std::size_t t = 0; t < targets; ++t) {
                w.push_back(0.2 + rng.uniform());
                total += w.back();
            }
            for (std::size_t t = 0; t < targets; ++t) {
                int target = static_cast<int>(rng.below(states));
                bool dup = false;
                for (auto& [x, p] : to)
                    if (x == target) p += w[t] / total, dup = true;
                if (!dup) to.push_back({target, w[t] / total});
            }
            s.set_action(static_cast<flawkit::FlawId>(i), from, to);
        }
    s.set_initial({{static_cast<int>(states - 1), 1.0}});
    s.validate();
    return s;
}

/// Random CNF with clauses of width 1..3 over `n` variables.
inline flawkit::sat::CspInstance random_small_cnf(std::size_t n, std::size_t clauses, flawkit::Rng& rng) {
    std::vector<std::vector<int>> cs;
    for (std::size_t c = 0; c < clauses; ++c) {
        const std::size_t w = 1 + rng.below(std::min<std::size_t>(3, n));
        std::vector<int> clause;
        while (clause.size() < w) {
            const int v = static_cast<int>(rng.below(n)) + 1;
            bool seen = false;
            for (int l : clause) seen = seen || std::abs(l) == v;
            if (!seen) clause.push_back(rng.bernoulli(0.5) ? v : -v);
        }
        cs.push_back(clause);
    }
    return flawkit::sat::CspInstance::cnf(n, cs);
}

} // namespace toys
