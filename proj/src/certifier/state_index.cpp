#include "flawkit/state_index.hpp"
#include "flawkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace flawkit {

std::optional<std::size_t> StateIndex::find(const State& s) const {
    auto it = lookup_.find(s);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

const std::vector<IndexedTransition>& StateIndex::transitions(std::size_t k, FlawId i) const {
    const auto& ids = present_[k].ids();
    auto it = std::lower_bound(ids.begin(), ids.end(), i);
    if (it == ids.end() || *it != i)
        throw PreconditionError("flaw " + std::to_string(i) + " not present at state " + std::to_string(k));
    return actions_[k][static_cast<std::size_t>(it - ids.begin())];
}

std::size_t StateIndex::intern(State s) {
    auto [it, inserted] = lookup_.try_emplace(s, states_.size());
    if (inserted) {
        present_.push_back(system_->present(s));
        states_.push_back(std::move(s));
        actions_.emplace_back();
    }
    return it->second;
}

StateIndex enumerate_states(const FlawSystem& system, std::size_t limit) {
    if (!system.enumerable()) throw CapabilityError("enumerate_states requires an enumerable system");
    StateIndex index(system);
    const auto& theta = system.initial();
    if (theta.support.size() != theta.probability.size() || theta.support.empty())
        throw ConfigError("initial distribution malformed");
    double total = 0;
    for (std::size_t k = 0; k < theta.support.size(); ++k) {
        if (!(theta.probability[k] > 0)) throw ConfigError("initial probabilities must be positive");
        total += theta.probability[k];
        const std::size_t id = index.intern(theta.support[k]);
        auto& sup = index.initial_support_;
        auto pos = std::find(sup.begin(), sup.end(), id);
        if (pos == sup.end()) {
            sup.push_back(id);
            index.initial_probability_.push_back(theta.probability[k]);
        } else {
            index.initial_probability_[static_cast<std::size_t>(pos - sup.begin())] += theta.probability[k];
        }
    }
    if (std::abs(total - 1) > 1e-12) throw ConfigError("initial probabilities sum to " + std::to_string(total));

    for (std::size_t k = 0; k < index.states_.size(); ++k) {
        if (index.states_.size() > limit)
            throw CapacityError("state limit " + std::to_string(limit) + " exceeded with frontier of " +
                                std::to_string(index.states_.size() - k) + " states");
        const FlawSet present = index.present_[k];
        std::vector<std::vector<IndexedTransition>> actions;
        actions.reserve(present.size());
        for (FlawId i : present) {
            std::vector<IndexedTransition> out;
            double sum = 0;
            const State from = index.states_[k];
            for (auto& t : system.transitions(i, from)) {
                if (!(t.probability > 0) || t.probability > 1 + 1e-12)
                    throw ConfigError("flaw " + system.describe_flaw(i) + ": transition probability outside (0, 1]");
                sum += t.probability;
                const auto to = static_cast<std::uint32_t>(index.intern(std::move(t.to)));
                auto same = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.to == to; });
                if (same != out.end())
                    same->probability += t.probability;
                else
                    out.push_back({to, t.probability});
            }
            if (std::abs(sum - 1) > 1e-12)
                throw ConfigError("flaw " + system.describe_flaw(i) + ": action probabilities sum to " +
                                  std::to_string(sum));
            std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.to < b.to; });
            actions.push_back(std::move(out));
        }
        index.actions_[k] = std::move(actions);
    }
    return index;
}

bool verify_primary(const StateIndex& index, FlawId i) {
    for (std::size_t k = 0; k < index.size(); ++k) {
        const FlawSet& u = index.present(k);
        if (!u.contains(i)) continue;
        for (FlawId j : u) {
            if (j == i) continue;
            for (const auto& t : index.transitions(k, j))
                if (!index.present(t.to).contains(i)) return false;
        }
    }
    return true;
}

} // namespace flawkit
