#include "flawkit/certifier.hpp"
#include "flawkit/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace flawkit {

AlgoLllReport evaluate_algolll(const StateIndex& index, const Measure& mu, const std::vector<double>& psi) {
    const std::size_t m = index.flaw_count();
    if (psi.size() != m) throw DomainError("psi has the wrong length");
    for (double p : psi)
        if (!(p > 0)) throw DomainError("psi entries must be positive");

    AlgoLllReport r;
    r.mu_flaw.assign(m, 0);
    r.distortion.assign(m, 0);
    r.gamma.assign(m, 0);
    r.causes.assign(m, {});
    r.lhs.assign(m, 0);
    std::vector<std::unordered_map<std::uint32_t, double>> pushed(m);

    for (std::size_t k = 0; k < index.size(); ++k) {
        const FlawSet& u = index.present(k);
        for (FlawId i : u) {
            r.mu_flaw[i] += mu[k];
            for (const auto& t : index.transitions(k, i)) {
                pushed[i][t.to] += mu[k] * t.probability;
                for (FlawId j : index.present(t.to))
                    if (j == i || !u.contains(j)) r.causes[i].insert(j);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (r.mu_flaw[i] == 0) continue;
        double d = 0;
        for (const auto& [to, mass] : pushed[i]) d = std::max(d, mass / r.mu_flaw[i] / mu[to]);
        r.distortion[i] = d;
        r.gamma[i] = r.mu_flaw[i] * d;
        double sum = 1;
        for (FlawId j : r.causes[i]) sum *= 1 + psi[j];
        r.lhs[i] = r.gamma[i] / psi[i] * sum;
        if (!(r.lhs[i] < 1)) r.feasible = false;
    }
    return r;
}

} // namespace flawkit
