#pragma once

#include "flawkit/certifier.hpp"
#include "flawkit/engine.hpp"
#include "flawkit/errors.hpp"
#include "flawkit/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flawkit::aec {

constexpr std::int32_t uncolored = -1;

/// No 4-available color remained for the edge being colored.
class DeadEnd : public Error {
public:
    using Error::Error;
};

/// Colors that would break properness at an endpoint of e or close a bichromatic 4-cycle through e.
/// Sorted. Throws PreconditionError if e is colored and InternalError if more than 2(Δ−1) are found.
std::vector<std::int32_t> forbidden4(const Graph& g, const State& coloring, std::uint32_t e);

/// Colors in [0, q) that are not 4-forbidden for e.
std::vector<std::int32_t> available4(const Graph& g, const State& coloring, std::uint32_t e, std::size_t q);

/// Cycles through e whose edges alternate between the color of e and one other color.
/// Each cycle is listed in walk order starting with e.
std::vector<std::vector<std::uint32_t>> bichromatic_cycles_through(const Graph& g, const State& coloring,
                                                                   std::uint32_t e);

/// All simple cycles through e of length ≤ max_length (even lengths only if `even_only`),
/// each in walk order starting with e. Throws CapacityError beyond `limit` cycles.
std::vector<std::vector<std::uint32_t>> cycles_through(const Graph& g, std::uint32_t e, std::size_t max_length,
                                                       bool even_only = true, std::size_t limit = 1000);

/// The two edges left colored when a bichromatic cycle through e is broken: the minimum-id edge
/// of the cycle other than e, and its cycle neighbor other than e (the lower id if both qualify).
std::pair<std::uint32_t, std::uint32_t> kept_edges(const std::vector<std::uint32_t>& cycle, std::uint32_t e);

/// The edges a bichromatic cycle leaves uncolored: the cycle minus its kept edges (e included).
FlawSet uncolored_part(const std::vector<std::uint32_t>& cycle, std::uint32_t e);

/// Properness on colored edges, and no cycle in the union of any two color classes.
bool verify_acyclic_proper(const Graph& g, const State& coloring, bool require_complete = true);

/// The backtracking edge-coloring process as a flaw system: flaw e is "e uncolored", all primary.
class AecSystem final : public FlawSystem {
public:
    AecSystem(const Graph& g, std::size_t q);

    std::size_t flaw_count() const override { return g_->edges(); }
    bool primary(FlawId) const override { return true; }
    FlawSet present(const State& s) const override;
    bool holds(FlawId i, const State& s) const override { return s[i] == uncolored; }
    State sample(FlawId i, const State& s, Rng& rng) const override;
    bool enumerable() const override { return true; }
    std::vector<Transition> transitions(FlawId i, const State& s) const override;
    const InitialDistribution& initial() const override { return initial_; }
    void check_state(const State& s) const override;
    std::string describe_flaw(FlawId i) const override { return "uncolored(e" + std::to_string(i) + ")"; }

    /// Colors e with c and breaks the lowest-ranked bichromatic cycle through e, if any.
    State color(const State& s, std::uint32_t e, std::int32_t c) const;

private:
    const Graph* g_;
    std::size_t q_;
    InitialDistribution initial_;
};

struct AecResult {
    Outcome outcome = Outcome::flawless;
    std::uint64_t steps = 0;
    std::uint64_t backtracks = 0;
    std::size_t max_forbidden = 0;
    bool dead_end = false;
    std::string diagnostic;
    State coloring;
};

AecResult aec_run(const Graph& g, std::size_t q, Rng& rng, std::uint64_t cap, bool check = false);

/// q = 2(Δ−1) + ⌈c(Δ−1)⌉ and its inverse c = (q − 2(Δ−1))/(Δ−1).
std::size_t q_from_c(std::size_t max_degree, double c);
double c_from_q(std::size_t max_degree, std::size_t q);

struct AecConditionReport {
    /// min over α ∈ (1, c) of 1/α + α³/(c²(c²−α²)), found numerically.
    double value = 0;
    double alpha = 0;
    /// 2/c and c(√5−1)/2; meaningful when α* ∈ (1, c).
    double closed_form_value = 0;
    double closed_form_alpha = 0;
    bool feasible = false;
};

AecConditionReport aec_condition(double c);

/// 1/α + α³/(c²(c²−α²)).
double aec_bound(double c, double alpha);

struct HFreeReport {
    double value = 0;
    double beta = 0;
    bool feasible = false;
};

/// (1/c)·min over β ∈ (1, c) of (β + βγΔ^{−δ}/(β(β²−1))).
HFreeReport aec_condition_hfree(double c, double gamma, double delta_h, double max_degree);

/// Smallest c on a grid of spacing `step` in (1, c_max] for which the H-free value is below 1.
std::optional<double> hfree_smallest_c(double gamma, double delta_h, double max_degree, double step = 1e-4,
                                       double c_max = 4);

/// Exact charges of the edge-coloring process: γ_e^∅ = 1/Q and γ_e^S = |C_e(S)|/Q, where C_e(S)
/// are the even cycles of length ≥ min_length through e that leave exactly S uncolored.
/// Bichromatic 4-cycles never arise, so 6 is the default.
ChargeTable aec_charges(const Graph& g, double Q, std::size_t min_length = 6, std::size_t cycle_limit = 100000);

/// max ζ under the (Δ−1)^{2ℓ−2} cycle-count profile with ψ_e = α/Q: the series
/// 1/α + Σ_{ℓ≥3} (α/c)^{2ℓ−3}/c summed to `terms` terms (or in closed form when terms = 0).
double aec_profile_zeta(double c, double alpha, std::size_t terms = 0);

/// Step bound (T₀ + s)/δ from the default cycle-count profile, with T₀ ≤ |E|·log₂(q+1).
struct AecStepBound {
    double c = 0;
    double delta = 0;
    double t0 = 0;
    double steps = 0;
    bool feasible = false;
};
/// Uses c = c_from_q(Δ, q) unless `c` is given (a smaller c only loosens the bound).
/// Graphs with Δ ≤ 1 have no cycles: δ = 1.
AecStepBound aec_step_bound(const Graph& g, std::size_t q, double s, std::optional<double> c = std::nullopt);

} // namespace flawkit::aec
