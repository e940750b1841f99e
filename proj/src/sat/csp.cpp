#include "flawkit/errors.hpp"
#include "flawkit/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace flawkit::sat {

bool Constraint::violated_by(const State& a) const {
    std::vector<std::int32_t> tuple;
    tuple.reserve(scope.size());
    for (auto v : scope) {
        if (a[v] == unassigned) return false;
        tuple.push_back(a[v]);
    }
    return std::binary_search(violating.begin(), violating.end(), tuple);
}

CspInstance CspInstance::cnf(std::size_t variables, std::vector<std::vector<int>> clauses) {
    CspInstance csp;
    csp.domains_.assign(variables, 2);
    for (const auto& clause : clauses) {
        if (clause.empty()) throw ConfigError("empty clause");
        Constraint c;
        std::vector<std::int32_t> falsifying;
        for (int lit : clause) {
            const auto v = static_cast<std::size_t>(std::abs(lit)) - 1;
            if (lit == 0 || v >= variables) throw ConfigError("literal " + std::to_string(lit) + " out of range");
            auto dup = std::find(c.scope.begin(), c.scope.end(), static_cast<std::uint32_t>(v));
            if (dup != c.scope.end()) {
                // x ∨ x is x; x ∨ ¬x can never be violated.
                const auto k = static_cast<std::size_t>(dup - c.scope.begin());
                if (falsifying[k] != (lit > 0 ? 0 : 1)) falsifying.clear();
                if (falsifying.empty()) break;
                continue;
            }
            c.scope.push_back(static_cast<std::uint32_t>(v));
            falsifying.push_back(lit > 0 ? 0 : 1);
        }
        if (!falsifying.empty()) c.violating.push_back(std::move(falsifying));
        else c.scope.clear();
        csp.constraints_.push_back(std::move(c));
    }
    csp.clauses_ = std::move(clauses);
    csp.index();
    return csp;
}

CspInstance CspInstance::general(std::vector<std::uint32_t> domain_sizes, std::vector<Constraint> constraints) {
    CspInstance csp;
    for (auto d : domain_sizes)
        if (d == 0) throw ConfigError("empty domain");
    csp.domains_ = std::move(domain_sizes);
    for (auto& c : constraints) {
        for (auto v : c.scope)
            if (v >= csp.domains_.size()) throw ConfigError("constraint scope references unknown variable");
        for (const auto& t : c.violating) {
            if (t.size() != c.scope.size()) throw ConfigError("violating tuple arity mismatch");
            for (std::size_t k = 0; k < t.size(); ++k)
                if (t[k] < 0 || static_cast<std::uint32_t>(t[k]) >= csp.domains_[c.scope[k]])
                    throw ConfigError("violating tuple value outside domain");
        }
        std::sort(c.violating.begin(), c.violating.end());
        c.violating.erase(std::unique(c.violating.begin(), c.violating.end()), c.violating.end());
    }
    csp.constraints_ = std::move(constraints);
    csp.index();
    return csp;
}

void CspInstance::index() {
    incidence_.assign(domains_.size(), {});
    for (std::size_t c = 0; c < constraints_.size(); ++c)
        for (auto v : constraints_[c].scope) incidence_[v].push_back(static_cast<std::uint32_t>(c));
}

std::size_t CspInstance::max_degree() const {
    std::size_t d = 0;
    for (const auto& inc : incidence_) d = std::max(d, inc.size());
    return d;
}

std::optional<std::uint32_t> CspInstance::lowest_violated(std::size_t v, const State& a) const {
    for (auto c : incidence_[v])
        if (constraints_[c].violated_by(a)) return c;
    return std::nullopt;
}

bool CspInstance::satisfies(const State& a) const {
    if (a.size() != variables()) return false;
    for (auto x : a)
        if (x == unassigned) return false;
    for (const auto& c : constraints_)
        if (c.violated_by(a)) return false;
    return true;
}

ProductMeasure ProductMeasure::uniform(const CspInstance& csp) {
    ProductMeasure m;
    for (std::size_t v = 0; v < csp.variables(); ++v)
        m.p_.emplace_back(csp.domain(v), 1.0 / csp.domain(v));
    return m;
}

ProductMeasure ProductMeasure::from(const CspInstance& csp, std::vector<std::vector<double>> p) {
    if (p.size() != csp.variables()) throw ConfigError("product measure needs one distribution per variable");
    for (std::size_t v = 0; v < p.size(); ++v) {
        if (p[v].size() != csp.domain(v)) throw ConfigError("distribution size differs from the domain size");
        double sum = 0;
        for (double x : p[v]) {
            if (!(x > 0)) throw ConfigError("product measure entries must be positive");
            sum += x;
        }
        if (std::abs(sum - 1) > 1e-12) throw ConfigError("distribution of variable " + std::to_string(v) + " sums to " +
                                                         std::to_string(sum));
    }
    ProductMeasure m;
    m.p_ = std::move(p);
    return m;
}

double ProductMeasure::violation_probability(const Constraint& c) const {
    double total = 0;
    for (const auto& t : c.violating) {
        double q = 1;
        for (std::size_t k = 0; k < t.size(); ++k) q *= p(c.scope[k], t[k]);
        total += q;
    }
    return total;
}

double ProductMeasure::weight(const State& partial) const {
    double w = 1;
    for (std::size_t v = 0; v < partial.size(); ++v)
        if (partial[v] != unassigned) w *= p(v, partial[v]);
    return w;
}

CspInstance random_kcnf(std::size_t n, unsigned k, std::size_t max_degree, std::size_t clauses, Rng& rng) {
    if (k == 0 || k > n) throw ConfigError("clause width must be in [1, n]");
    std::vector<std::size_t> spare(n, max_degree);
    std::vector<std::size_t> open;
    for (std::size_t v = 0; v < n; ++v)
        if (max_degree > 0) open.push_back(v);
    std::vector<std::vector<int>> out;
    while (out.size() < clauses && open.size() >= k) {
        // Partial Fisher–Yates: the first k entries become a uniform k-subset of the open variables.
        for (std::size_t i = 0; i < k; ++i) std::swap(open[i], open[i + rng.below(open.size() - i)]);
        std::vector<int> clause;
        for (std::size_t i = 0; i < k; ++i) {
            const int var = static_cast<int>(open[i]) + 1;
            clause.push_back(rng.bernoulli(0.5) ? var : -var);
            --spare[open[i]];
        }
        out.push_back(std::move(clause));
        std::erase_if(open, [&](std::size_t v) { return spare[v] == 0; });
    }
    return CspInstance::cnf(n, std::move(out));
}

} // namespace flawkit::sat
