#include "flawkit/certifier.hpp"
#include "flawkit/errors.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace flawkit {

std::string to_string(Semantics s) { return s == Semantics::covers ? "covers" : "includes"; }

Measure Measure::uniform(std::size_t n) {
    if (n == 0) throw ConfigError("measure over an empty state set");
    return from_weights(std::vector<double>(n, 1.0));
}

Measure Measure::from_weights(std::vector<double> weights) {
    if (weights.empty()) throw ConfigError("measure over an empty state set");
    double total = 0;
    for (double w : weights) {
        if (!(w > 0) || !std::isfinite(w)) throw ConfigError("measure weights must be positive and finite");
        total += w;
    }
    Measure m;
    m.min_ = 1;
    for (double& w : weights) {
        w /= total;
        m.min_ = std::min(m.min_, w);
    }
    m.p_ = std::move(weights);
    return m;
}

Measure Measure::from_function(const StateIndex& index, const std::function<double(const State&)>& weight) {
    std::vector<double> w(index.size());
    for (std::size_t k = 0; k < index.size(); ++k) w[k] = weight(index.state(k));
    return from_weights(std::move(w));
}

bool counts_towards(const FlawSet& introduced, const FlawSet& S, Semantics semantics,
                    const std::function<bool(FlawId)>& is_primary) {
    if (semantics == Semantics::includes) return introduced.includes(S);
    // Covers: equal on primary flaws, superset on the rest.
    for (FlawId id : S)
        if (!introduced.contains(id)) return false;
    for (FlawId id : introduced)
        if (is_primary(id) && !S.contains(id)) return false;
    return true;
}

double ChargeTable::get(FlawId i, const FlawSet& S) const {
    auto it = entries_.find({i, S});
    return it == entries_.end() ? 0.0 : it->second;
}

void ChargeTable::set(FlawId i, FlawSet S, double gamma) {
    if (gamma < 0) throw InternalError("negative charge");
    if (gamma == 0) {
        entries_.erase({i, S});
        return;
    }
    entries_[{i, std::move(S)}] = gamma;
}

namespace {

FlawSet introduced_by(const FlawSet& before, FlawId i, const FlawSet& after) {
    FlawSet kept = before;
    kept.erase(i);
    return after - kept;
}

bool passes_priority(const FlawSet& present, FlawId i, const std::optional<Strategy>& priority) {
    if (!priority) return true;
    if (priority->kind() != Strategy::Kind::fixed_permutation)
        throw ConfigError("priority filter needs a fixed-permutation strategy");
    return priority->choose(present) == i;
}

} // namespace

double charge(const StateIndex& index, FlawId i, const FlawSet& S, const Measure& mu, Semantics semantics,
              const std::optional<Strategy>& priority) {
    const auto& system = index.system();
    auto is_primary = [&](FlawId id) { return system.primary(id); };
    std::unordered_map<std::uint32_t, double> flow;
    for (std::size_t k = 0; k < index.size(); ++k) {
        const FlawSet& u = index.present(k);
        if (!u.contains(i) || !passes_priority(u, i, priority)) continue;
        for (const auto& t : index.transitions(k, i)) {
            if (counts_towards(introduced_by(u, i, index.present(t.to)), S, semantics, is_primary))
                flow[t.to] += mu[k] * t.probability;
        }
    }
    double best = 0;
    for (const auto& [to, f] : flow) best = std::max(best, f / mu[to]);
    return best;
}

double charge_via_norm(const StateIndex& index, FlawId i, const FlawSet& S, const Measure& mu, Semantics semantics,
                       const std::optional<Strategy>& priority) {
    const auto& system = index.system();
    auto is_primary = [&](FlawId id) { return system.primary(id); };
    const auto n = static_cast<Eigen::Index>(index.size());

    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t k = 0; k < index.size(); ++k) {
        const FlawSet& u = index.present(k);
        if (!u.contains(i) || !passes_priority(u, i, priority)) continue;
        for (const auto& t : index.transitions(k, i))
            if (counts_towards(introduced_by(u, i, index.present(t.to)), S, semantics, is_primary))
                entries.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t.to), t.probability);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());

    Eigen::VectorXd m(n);
    for (Eigen::Index k = 0; k < n; ++k) m[k] = mu[static_cast<std::size_t>(k)];
    const Eigen::SparseMatrix<double> conj = m.asDiagonal() * a * m.cwiseInverse().asDiagonal();
    const Eigen::RowVectorXd column_sums = Eigen::RowVectorXd::Ones(n) * conj;
    return n == 0 ? 0.0 : std::max(0.0, column_sums.maxCoeff());
}

ChargeTable charge_table(const StateIndex& index, const Measure& mu, Semantics semantics,
                         const std::optional<Strategy>& priority, std::size_t max_expansion) {
    const auto& system = index.system();
    ChargeTable table(system.flaw_count(), semantics, priority.has_value());
    std::map<ChargeTable::Key, std::unordered_map<std::uint32_t, double>> flows;

    for (std::size_t k = 0; k < index.size(); ++k) {
        const FlawSet& u = index.present(k);
        for (FlawId i : u) {
            if (!passes_priority(u, i, priority)) continue;
            for (const auto& t : index.transitions(k, i)) {
                const FlawSet intro = introduced_by(u, i, index.present(t.to));
                // Every S the introduced set counts towards: a fixed part plus any subset of the free part.
                std::vector<FlawId> fixed, free;
                for (FlawId id : intro)
                    (semantics == Semantics::covers && system.primary(id) ? fixed : free).push_back(id);
                if (free.size() > max_expansion)
                    throw CapacityError("transition introduces " + std::to_string(free.size()) +
                                        " expandable flaws (limit " + std::to_string(max_expansion) + ")");
                const double amount = mu[k] * t.probability;
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
                    std::vector<FlawId> s = fixed;
                    for (std::size_t b = 0; b < free.size(); ++b)
                        if (mask >> b & 1) s.push_back(free[b]);
                    flows[{i, FlawSet(std::move(s))}][t.to] += amount;
                }
            }
        }
    }
    for (auto& [key, flow] : flows) {
        double best = 0;
        for (const auto& [to, f] : flow) best = std::max(best, f / mu[to]);
        table.set(key.first, key.second, best);
    }
    return table;
}

} // namespace flawkit
