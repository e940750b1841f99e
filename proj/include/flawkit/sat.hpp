#pragma once

#include "flawkit/certifier.hpp"
#include "flawkit/engine.hpp"

#include <optional>
#include <vector>

namespace flawkit::sat {

/// A constraint over `scope`, violated exactly by the tuples in `violating`.
struct Constraint {
    std::vector<std::uint32_t> scope;
    /// Sorted violating scope-assignments. For clauses this is the single all-false tuple.
    std::vector<std::vector<std::int32_t>> violating;

    bool violated_by(const State& assignment) const;
};

class CspInstance {
public:
    /// Clauses as DIMACS literals (±(v+1)). Variables have domain {0 = false, 1 = true}.
    static CspInstance cnf(std::size_t variables, std::vector<std::vector<int>> clauses);
    static CspInstance general(std::vector<std::uint32_t> domain_sizes, std::vector<Constraint> constraints);

    std::size_t variables() const { return domains_.size(); }
    std::uint32_t domain(std::size_t v) const { return domains_[v]; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    /// Ids of constraints whose scope contains v, ascending.
    const std::vector<std::uint32_t>& constraints_of(std::size_t v) const { return incidence_[v]; }
    std::size_t degree(std::size_t v) const { return incidence_[v].size(); }
    std::size_t max_degree() const;

    bool is_cnf() const { return !clauses_.empty() || constraints_.empty(); }
    const std::vector<std::vector<int>>& clauses() const { return clauses_; }

    /// Index of the lowest violated constraint among those containing v, if any.
    std::optional<std::uint32_t> lowest_violated(std::size_t v, const State& assignment) const;
    bool satisfies(const State& assignment) const;

private:
    void index();

    std::vector<std::uint32_t> domains_;
    std::vector<Constraint> constraints_;
    std::vector<std::vector<std::uint32_t>> incidence_;
    std::vector<std::vector<int>> clauses_;
};

constexpr std::int32_t unassigned = -1;

class ProductMeasure {
public:
    static ProductMeasure uniform(const CspInstance& csp);
    /// One distribution per variable; each must be positive and sum to one.
    static ProductMeasure from(const CspInstance& csp, std::vector<std::vector<double>> p);

    double p(std::size_t v, std::int32_t x) const { return p_[v][static_cast<std::size_t>(x)]; }
    const std::vector<double>& distribution(std::size_t v) const { return p_[v]; }
    /// P(A_c): the measure of the constraint's violating set.
    double violation_probability(const Constraint& c) const;
    /// Π over assigned v of P(σ(v)); the unnormalized μ of partial assignments.
    double weight(const State& partial) const;

private:
    std::vector<std::vector<double>> p_;
};

/// Variable-setting backtracking: flaw v is "v unassigned"; addressing it samples v from P and,
/// on violation, unassigns the whole lowest-indexed violated constraint. All flaws are primary.
class BacktrackSystem final : public FlawSystem {
public:
    BacktrackSystem(const CspInstance& csp, const ProductMeasure& p);

    std::size_t flaw_count() const override { return csp_->variables(); }
    bool primary(FlawId) const override { return true; }
    FlawSet present(const State& s) const override;
    bool holds(FlawId i, const State& s) const override { return s[i] == unassigned; }
    State sample(FlawId i, const State& s, Rng& rng) const override;
    bool enumerable() const override { return true; }
    std::vector<Transition> transitions(FlawId i, const State& s) const override;
    const InitialDistribution& initial() const override { return initial_; }
    void check_state(const State& s) const override;
    std::string describe_flaw(FlawId i) const override { return "unassigned(x" + std::to_string(i + 1) + ")"; }

    /// State after setting v := x at s, including any backtrack.
    State assign(const State& s, std::size_t v, std::int32_t x) const;

private:
    const CspInstance* csp_;
    const ProductMeasure* p_;
    InitialDistribution initial_;
};

/// Moser–Tardos resampling over full assignments: flaw c is "constraint c violated"; addressing it
/// resamples the scope from P. Flaws are not primary.
class ResamplingSystem final : public FlawSystem {
public:
    ResamplingSystem(const CspInstance& csp, const ProductMeasure& p);

    std::size_t flaw_count() const override { return csp_->constraints().size(); }
    bool primary(FlawId) const override { return false; }
    FlawSet present(const State& s) const override;
    State sample(FlawId i, const State& s, Rng& rng) const override;
    bool enumerable() const override { return true; }
    std::vector<Transition> transitions(FlawId i, const State& s) const override;
    const InitialDistribution& initial() const override { return initial_; }

private:
    const CspInstance* csp_;
    const ProductMeasure* p_;
    InitialDistribution initial_;
};

struct BacktrackResult {
    Outcome outcome;
    std::uint64_t steps;
    std::uint64_t backtracks;
    State assignment;
    std::optional<Trajectory> trajectory;
};

BacktrackResult backtrack_run(const CspInstance& csp, const ProductMeasure& p, Rng& rng, std::uint64_t cap,
                              bool record = false);

/// Lemma-form charges: γ_v^∅ = 1, γ_v^{scope(c)} = P(A_c) for c ∋ v.
ChargeTable charges_variable_setting(const CspInstance& csp, const ProductMeasure& p);

struct VariableSettingReport {
    std::vector<double> psi;
    std::vector<double> lhs;
    double max_lhs = 0;
    bool feasible = true;
    /// Set in auto mode: the uniform ψ = 2α that was selected.
    std::optional<double> alpha;
    /// Condition report from the generic evaluator with the same ψ (T₀ via the all-unassigned start).
    ConditionReport condition;
};

/// (1/ψ_v)(1 + Σ_{c∋v} P(A_c) Π_{u∈c} ψ_u) < 1 for every v. With no ψ, scans uniform ψ = 2α.
VariableSettingReport condition_variable_setting(const CspInstance& csp, const ProductMeasure& p,
                                                 std::optional<std::vector<double>> psi = std::nullopt);

/// Condition context for the backtracking system without enumeration: θ is the all-unassigned
/// point mass and the normalizer of μ is bounded by Π_v (1 + Σ_x P_v(x)) = 2^n.
ConditionContext backtrack_context(const CspInstance& csp, const ProductMeasure& p);

/// (2^k/k)(1 − 1/k)^{k−1}: uniform k-SAT is certified for every max degree strictly below it.
double ksat_degree_threshold(unsigned k);

/// Random k-CNF on n variables where no variable occurs in more than `max_degree` clauses;
/// clauses are added until no k variables with spare degree remain or `clauses` is reached.
CspInstance random_kcnf(std::size_t n, unsigned k, std::size_t max_degree, std::size_t clauses, Rng& rng);

} // namespace flawkit::sat
