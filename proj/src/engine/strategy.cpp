#include "flawkit/engine.hpp"
#include "flawkit/errors.hpp"

#include <algorithm>
#include <limits>

namespace flawkit {

namespace {

std::vector<std::uint64_t> invert(const std::vector<FlawId>& order) {
    std::vector<std::uint64_t> rank(order.size(), std::numeric_limits<std::uint64_t>::max());
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] >= order.size() || rank[order[k]] != std::numeric_limits<std::uint64_t>::max())
            throw ConfigError("priority order is not a permutation of [0, " + std::to_string(order.size()) + ")");
        rank[order[k]] = k;
    }
    return rank;
}

} // namespace

Strategy::Strategy(Kind kind, std::vector<FlawId> order, std::uint64_t key)
    : kind_(kind), order_(std::move(order)), rank_(invert(order_)), key_(key) {}

Strategy Strategy::permutation(std::vector<FlawId> order) {
    return Strategy(Kind::fixed_permutation, std::move(order), 0);
}

Strategy Strategy::stack(std::vector<FlawId> order) { return Strategy(Kind::stack, std::move(order), 0); }

std::string Strategy::name() const {
    switch (kind_) {
    case Kind::fixed_permutation: return order_.empty() ? "fixed-permutation(identity)" : "fixed-permutation";
    case Kind::random_per_step: return "random-per-step(key=" + std::to_string(key_) + ")";
    case Kind::stack: return "stack";
    }
    return "?";
}

std::uint64_t Strategy::rank(FlawId i, std::uint64_t step) const {
    if (kind_ == Kind::random_per_step) {
        // The step's permutation sorts ids by a keyed hash; the id breaks (astronomically rare) ties.
        return mix64(split_key(key_, step) ^ i);
    }
    if (order_.empty()) return i;
    if (i >= rank_.size()) throw PreconditionError("flaw id " + std::to_string(i) + " outside the priority order");
    return rank_[i];
}

FlawId Strategy::choose(const FlawSet& flaws, std::uint64_t step) const {
    if (flaws.empty()) throw PreconditionError("choose() on an empty flaw set");
    if (kind_ != Kind::random_per_step && order_.empty()) return flaws.front();
    FlawId best = flaws.front();
    std::uint64_t best_rank = rank(best, step);
    for (FlawId id : flaws) {
        const std::uint64_t r = rank(id, step);
        if (r < best_rank || (r == best_rank && id < best)) {
            best_rank = r;
            best = id;
        }
    }
    return best;
}

void Strategy::validate(std::size_t m) const {
    if (!order_.empty() && order_.size() != m)
        throw ConfigError("priority order has " + std::to_string(order_.size()) + " entries for " +
                          std::to_string(m) + " flaws");
}

StrategyCursor::StrategyCursor(const Strategy& strategy, const FlawSet& initial_present) : strategy_(&strategy) {
    if (strategy.kind() != Strategy::Kind::stack) return;
    stack_.assign(initial_present.begin(), initial_present.end());
    // Top of the stack is the back; the π-minimum must end up there.
    std::sort(stack_.begin(), stack_.end(), [&](FlawId a, FlawId b) { return strategy.rank(a) > strategy.rank(b); });
}

FlawId StrategyCursor::next(const FlawSet& present) const {
    if (strategy_->kind() != Strategy::Kind::stack) return strategy_->choose(present, step_);
    if (stack_.empty()) throw InternalError("flaw stack empty at a flawed state");
    return stack_.back();
}

void StrategyCursor::advance(FlawId addressed, const FlawSet& before, const FlawSet& after) {
    ++step_;
    if (strategy_->kind() != Strategy::Kind::stack) return;
    stack_.pop_back();
    std::erase_if(stack_, [&](FlawId id) { return !after.contains(id); });
    FlawSet remaining = before;
    remaining.erase(addressed);
    std::vector<FlawId> fresh;
    for (FlawId id : after)
        if (!remaining.contains(id)) fresh.push_back(id);
    std::sort(fresh.begin(), fresh.end(), [&](FlawId a, FlawId b) { return strategy_->rank(a) > strategy_->rank(b); });
    stack_.insert(stack_.end(), fresh.begin(), fresh.end());
    if (stack_.size() != after.size()) throw InternalError("flaw stack out of sync with the present flaws");
}

} // namespace flawkit
