#pragma once

#include "flawkit/engine.hpp"
#include "flawkit/state_index.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flawkit {

/// A positive probability measure over the states of a StateIndex.
class Measure {
public:
    static Measure uniform(std::size_t n);
    static Measure uniform(const StateIndex& index) { return uniform(index.size()); }
    /// Normalizes; every weight must be positive.
    static Measure from_weights(std::vector<double> weights);
    static Measure from_function(const StateIndex& index, const std::function<double(const State&)>& weight);

    double operator[](std::size_t k) const { return p_[k]; }
    std::size_t size() const { return p_.size(); }
    double min() const { return min_; }
    const std::vector<double>& values() const { return p_; }

private:
    std::vector<double> p_;
    double min_ = 0;
};

enum class Semantics { covers, includes };

std::string to_string(Semantics s);

/// Does a transition introducing `introduced` count towards the charge of S?
bool counts_towards(const FlawSet& introduced, const FlawSet& S, Semantics semantics,
                    const std::function<bool(FlawId)>& is_primary);

/// Sparse (i, S) → γ_i^S; zero entries are never stored.
class ChargeTable {
public:
    using Key = std::pair<FlawId, FlawSet>;

    ChargeTable(std::size_t m = 0, Semantics semantics = Semantics::covers, bool priority_filtered = false)
        : m_(m), semantics_(semantics), priority_filtered_(priority_filtered) {}

    std::size_t flaw_count() const { return m_; }
    Semantics semantics() const { return semantics_; }
    bool priority_filtered() const { return priority_filtered_; }

    double get(FlawId i, const FlawSet& S) const;
    /// Stores γ (dropping it if zero).
    void set(FlawId i, FlawSet S, double gamma);

    const std::map<Key, double>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::size_t m_;
    Semantics semantics_;
    bool priority_filtered_;
    std::map<Key, double> entries_;
};

/// γ_i^S by direct summation of the μ-weighted flow into every target state.
/// With `priority`, source states are dropped unless i is the priority-minimum of U(σ).
double charge(const StateIndex& index, FlawId i, const FlawSet& S, const Measure& mu,
              Semantics semantics = Semantics::covers, const std::optional<Strategy>& priority = std::nullopt);

/// γ_i^S as the max column sum of M·A_i^S·M⁻¹ with M = diag(μ).
double charge_via_norm(const StateIndex& index, FlawId i, const FlawSet& S, const Measure& mu,
                       Semantics semantics = Semantics::covers,
                       const std::optional<Strategy>& priority = std::nullopt);

/// All nonzero charges at once. Throws CapacityError if some transition introduces more than
/// `max_expansion` flaws whose subsets must be expanded.
ChargeTable charge_table(const StateIndex& index, const Measure& mu, Semantics semantics = Semantics::covers,
                         const std::optional<Strategy>& priority = std::nullopt, std::size_t max_expansion = 20);

/// Everything about the instance the condition needs besides charges and ψ.
/// Log-scale fields allow state spaces too large to enumerate; upper bounds are sound.
struct ConditionContext {
    std::size_t m = 0;
    std::vector<bool> primary;
    double log2_inv_mu_min = 0;
    double log2_max_theta_over_mu = 0;
    /// Span(θ): flaws present in some initial state.
    FlawSet span;
    /// I(θ): the distinct flaw sets of initial states.
    std::vector<FlawSet> initial_sets;
};

ConditionContext condition_context(const StateIndex& index, const Measure& mu);

struct ConditionReport {
    std::vector<double> psi;
    std::vector<double> zeta;
    double delta = 1;
    bool feasible = true;
    double t0_coarse = 0;
    double t0_refined = 0;

    double max_zeta() const { return zeta.empty() ? 1 - delta : *std::max_element(zeta.begin(), zeta.end()); }
    /// (T₀ + s)/δ with the refined T₀; infinite when infeasible.
    double step_bound(double s) const;
};

/// ζ_i = (1/ψ_i) Σ_S γ_i^S Ψ(S), δ = 1 − max ζ_i and both T₀ bounds.
ConditionReport evaluate_condition(const ChargeTable& charges, const std::vector<double>& psi,
                                   const ConditionContext& context);

/// Coordinate-wise multiplicative scan with golden-section refinement minimizing max ζ_i.
std::vector<double> optimize_psi(const ChargeTable& charges, std::vector<double> start = {}, int sweeps = 30);

struct AlgoLllReport {
    std::vector<double> mu_flaw;
    std::vector<double> distortion;
    /// γ_i = μ(f_i)·d_i.
    std::vector<double> gamma;
    /// Γ(i): flaws that addressing f_i can cause.
    std::vector<FlawSet> causes;
    /// (γ_i/ψ_i)·Σ_{S⊆Γ(i)} Ψ(S).
    std::vector<double> lhs;
    bool feasible = true;
};

AlgoLllReport evaluate_algolll(const StateIndex& index, const Measure& mu, const std::vector<double>& psi);

struct SpectralOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 100000;
    /// Dense eigen-solve when power iteration does not converge and Ω* is at most this large.
    std::size_t dense_fallback_limit = 2000;
};

/// Â: transitions among flawed states under a fixed-permutation strategy.
class SubmatrixView {
public:
    SubmatrixView(const StateIndex& index, const Strategy& strategy);

    std::size_t size() const { return flawed_.size(); }
    /// Index into the StateIndex of the k-th flawed state.
    std::size_t state_of(std::size_t k) const { return flawed_[k]; }
    /// θ restricted to flawed states.
    const std::vector<double>& theta() const { return theta_; }

    /// Sparse row-major entries of Â.
    struct Entry {
        std::uint32_t col;
        double value;
    };
    const std::vector<std::vector<Entry>>& rows() const { return rows_; }

    /// ‖θ₁Â^t‖₁ for t = 0…horizon.
    std::vector<double> survival(std::size_t horizon) const;
    std::vector<double> step(const std::vector<double>& x) const;

private:
    std::vector<std::size_t> flawed_;
    std::vector<double> theta_;
    std::vector<std::vector<Entry>> rows_;
};

struct SpectralReport {
    double rho = 0;
    /// Collatz–Wielandt bracket of ρ(Â) from the final iterate.
    double lower = 0;
    double upper = 0;
    bool converged = false;
    std::size_t iterations = 0;
    std::string method;
    std::vector<double> survival;
};

SpectralReport spectral_analyze(const StateIndex& index, const Strategy& strategy, std::size_t horizon = 0,
                                const SpectralOptions& options = {});

struct WitnessSumReport {
    std::size_t horizon = 0;
    std::size_t trajectories = 0;
    std::size_t sequences = 0;
    double lhs = 0;
    double rhs = 0;
    double max_zeta = 0;
    double max_theta_over_mu = 0;
    double failure_probability = 0;
    double failure_bound = 0;
    bool sum_bound_holds = false;
    bool corollary_holds = false;
    /// Every enumerated witness sequence reconstructed its trajectory's addressed flaws.
    bool reconstructions_agree = false;
};

/// Exhaustive expansion of bad t-trajectories, their distinct witness sequences, and both sides
/// of the witness-sum and failure-probability bounds.
WitnessSumReport witness_sum_check(const StateIndex& index, const Strategy& strategy, const Measure& mu,
                                   const ChargeTable& charges, const std::vector<double>& psi, std::size_t t,
                                   std::size_t trajectory_limit = 2'000'000);

} // namespace flawkit
