#include "flawkit/explicit_system.hpp"
#include "flawkit/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace flawkit {

ExplicitSystem::ExplicitSystem(std::size_t states, std::size_t flaws)
    : n_(states), members_(flaws, std::vector<bool>(states, false)), primary_(flaws, false), actions_(flaws) {
    if (states == 0) throw ConfigError("explicit system needs at least one state");
}

ExplicitSystem& ExplicitSystem::set_flaw(FlawId i, std::vector<int> members, bool primary) {
    if (i >= members_.size()) throw ConfigError("flaw id out of range");
    std::fill(members_[i].begin(), members_[i].end(), false);
    for (int s : members) {
        if (s < 0 || static_cast<std::size_t>(s) >= n_) throw ConfigError("flaw member state out of range");
        members_[i][static_cast<std::size_t>(s)] = true;
    }
    primary_[i] = primary;
    return *this;
}

ExplicitSystem& ExplicitSystem::set_action(FlawId i, int from, std::vector<std::pair<int, double>> to) {
    if (i >= members_.size()) throw ConfigError("flaw id out of range");
    for (const auto& [t, p] : to)
        if (t < 0 || static_cast<std::size_t>(t) >= n_) throw ConfigError("action target state out of range");
    actions_[i][from] = std::move(to);
    return *this;
}

ExplicitSystem& ExplicitSystem::set_initial(std::vector<std::pair<int, double>> theta) {
    initial_ = {};
    for (const auto& [s, p] : theta) {
        if (s < 0 || static_cast<std::size_t>(s) >= n_) throw ConfigError("initial state out of range");
        initial_.support.push_back(State{s});
        initial_.probability.push_back(p);
    }
    return *this;
}

void ExplicitSystem::validate() const {
    if (initial_.support.empty()) throw ConfigError("initial distribution missing");
    for (std::size_t i = 0; i < members_.size(); ++i) {
        for (std::size_t s = 0; s < n_; ++s) {
            if (!members_[i][s]) continue;
            auto it = actions_[i].find(static_cast<int>(s));
            if (it == actions_[i].end())
                throw ConfigError("flaw " + std::to_string(i) + " has no action at state " + std::to_string(s));
            double sum = 0;
            for (const auto& [t, p] : it->second) {
                if (!(p > 0)) throw ConfigError("action probabilities must be positive");
                sum += p;
            }
            if (std::abs(sum - 1) > 1e-12)
                throw ConfigError("flaw " + std::to_string(i) + " at state " + std::to_string(s) +
                                  ": probabilities sum to " + std::to_string(sum));
        }
    }
}

int ExplicitSystem::decode(const State& s) const {
    if (s.size() != 1 || s[0] < 0 || static_cast<std::size_t>(s[0]) >= n_)
        throw PreconditionError("not a state of this explicit system");
    return s[0];
}

FlawSet ExplicitSystem::present(const State& s) const {
    const auto k = static_cast<std::size_t>(decode(s));
    std::vector<FlawId> ids;
    for (std::size_t i = 0; i < members_.size(); ++i)
        if (members_[i][k]) ids.push_back(static_cast<FlawId>(i));
    return FlawSet::from_sorted(std::move(ids));
}

const std::vector<std::pair<int, double>>& ExplicitSystem::action(FlawId i, int from) const {
    auto it = actions_.at(i).find(from);
    if (it == actions_[i].end())
        throw ConfigError("flaw " + std::to_string(i) + " has no action at state " + std::to_string(from));
    return it->second;
}

State ExplicitSystem::sample(FlawId i, const State& s, Rng& rng) const {
    const auto& a = action(i, decode(s));
    std::vector<double> w;
    w.reserve(a.size());
    for (const auto& e : a) w.push_back(e.second);
    return State{a[rng.pick(w)].first};
}

std::vector<Transition> ExplicitSystem::transitions(FlawId i, const State& s) const {
    std::vector<Transition> out;
    for (const auto& [t, p] : action(i, decode(s))) out.push_back({State{t}, p});
    return out;
}

ExplicitSystem ExplicitSystem::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("explicit system JSON: ") + e.what());
    }
    try {
        for (const auto& [key, value] : j.items())
            if (key != "states" && key != "flaws" && key != "initial")
                throw ConfigError("unknown key '" + key + "' in explicit system");
        ExplicitSystem sys(j.at("states").get<std::size_t>(), j.at("flaws").size());
        FlawId i = 0;
        for (const auto& f : j.at("flaws")) {
            for (const auto& [key, value] : f.items())
                if (key != "primary" && key != "members" && key != "actions")
                    throw ConfigError("unknown key '" + key + "' in flaw entry");
            sys.set_flaw(i, f.at("members").get<std::vector<int>>(), f.value("primary", false));
            for (const auto& [from, to] : f.at("actions").items())
                sys.set_action(i, std::stoi(from), to.get<std::vector<std::pair<int, double>>>());
            ++i;
        }
        sys.set_initial(j.at("initial").get<std::vector<std::pair<int, double>>>());
        sys.validate();
        return sys;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("explicit system JSON: ") + e.what());
    }
}

} // namespace flawkit
