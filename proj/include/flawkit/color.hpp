#pragma once

#include "flawkit/engine.hpp"
#include "flawkit/errors.hpp"
#include "flawkit/graph.hpp"

#include <boost/dynamic_bitset.hpp>

#include <optional>
#include <string>
#include <vector>

namespace flawkit::color {

/// Vertex values: a real color c ≥ 0, Blank, or a marker recording the edge that uncolored the vertex.
constexpr std::int32_t blank = -1;
constexpr std::int32_t marker(std::uint32_t edge) { return -2 - static_cast<std::int32_t>(edge); }
constexpr bool is_marker(std::int32_t x) { return x <= -2; }
constexpr bool is_real(std::int32_t x) { return x >= 0; }
constexpr std::uint32_t marked_edge(std::int32_t x) { return static_cast<std::uint32_t>(-2 - x); }

/// Guard band for comparisons of integer counts against the real thresholds L and (L/10)|L_v|.
constexpr double threshold_guard = 1e-12;

struct HybridParams {
    double delta = 0;
    double f = 0;
    double epsilon = 0;
    double L = 0;
    std::size_t q = 0;
    /// f within [Δ^{(2+2ε)/(1+2ε)}(ln Δ)², Δ²+1].
    bool f_in_range = false;
    bool guarantee_valid = false;
};

/// L = (1+ε)(Δ/ln f)·f^{−1/(2+2ε)} and q = ⌈(1+ε)Δ/ln√f⌉.
HybridParams derive_params(double delta, double f, double epsilon);

/// Parameters given directly; guarantee_valid reports L ≥ 10 only.
HybridParams explicit_params(double delta, double L, std::size_t q);

/// Per-vertex color lists, each sorted and duplicate-free.
class ColorLists {
public:
    ColorLists() = default;
    explicit ColorLists(std::vector<std::vector<std::int32_t>> lists);
    /// Every vertex gets {0, …, q−1}.
    static ColorLists shared(std::size_t vertices, std::size_t q);

    std::size_t vertices() const { return lists_.size(); }
    const std::vector<std::int32_t>& operator[](std::size_t v) const { return lists_[v]; }
    /// One past the largest color in any list.
    std::size_t palette() const { return palette_; }
    const boost::dynamic_bitset<>& bits(std::size_t v) const { return bits_[v]; }

private:
    std::vector<std::vector<std::int32_t>> lists_;
    std::vector<boost::dynamic_bitset<>> bits_;
    std::size_t palette_ = 0;
};

/// L_v(σ): Blank (listed first as `blank`) followed by the list colors no colored neighbor uses.
std::vector<std::int32_t> available_colors(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v);

/// R_u^v(σ): like available_colors(u) but ignoring neighbors of u that lie in N_v.
std::vector<std::int32_t> relaxed_colors(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v,
                                         std::uint32_t u);

/// The deterministic part of RECOLOR: while a monochromatic edge exists, mark its lowest-indexed
/// endpoint with the lowest-indexed monochromatic edge at that endpoint. Returns the number of
/// vertices uncolored.
std::size_t resolve_conflicts(const Graph& g, State& s, const std::vector<std::uint32_t>& candidates);

/// RECOLOR(v, σ): every non-marked u ∈ N_v draws uniformly from R_u^v(σ), then conflicts are resolved.
State recolor(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v, Rng& rng);

/// No edge joins two vertices of the same real color.
bool no_monochromatic_edge(const Graph& g, const State& s);

struct HybridOptions {
    /// Place every Z-flaw after every f-flaw in the permutation (default: B, then Z, then f).
    bool z_after_f = false;
    /// Expose exact transition distributions (exponential in |N_v|; small instances only).
    bool enumerable = false;
};

/**
 * The hybrid coloring process. Flaw ids: B_v = v, Z_v = n + v, and f_v^e = 2n + slot, where
 * slot enumerates (v, incident edge) pairs in vertex order then adjacency order.
 */
class HybridSystem final : public FlawSystem {
public:
    HybridSystem(const Graph& g, const ColorLists& lists, const HybridParams& params,
                 const HybridOptions& options = {});

    std::size_t flaw_count() const override { return 2 * n_ + slots_; }
    bool primary(FlawId i) const override { return i >= 2 * n_; }
    FlawSet present(const State& s) const override;
    State sample(FlawId i, const State& s, Rng& rng) const override;
    bool enumerable() const override { return options_.enumerable; }
    std::vector<Transition> transitions(FlawId i, const State& s) const override;
    const InitialDistribution& initial() const override { return initial_; }
    void check_state(const State& s) const override;
    std::string describe_flaw(FlawId i) const override;

    enum class Kind { B, Z, f };
    Kind kind(FlawId i) const { return i < n_ ? Kind::B : i < 2 * n_ ? Kind::Z : Kind::f; }
    /// The vertex a flaw belongs to.
    std::uint32_t vertex(FlawId i) const;
    FlawId b_flaw(std::uint32_t v) const { return v; }
    FlawId z_flaw(std::uint32_t v) const { return static_cast<FlawId>(n_ + v); }
    /// Throws PreconditionError if e is not incident to v.
    FlawId f_flaw(std::uint32_t v, std::uint32_t e) const;

    /// Priority order: B first, then Z and f as configured.
    Strategy strategy() const;

    /// Direct predicate evaluations with plain loops (used to cross-check `present`).
    bool in_b(const State& s, std::uint32_t v) const;
    bool in_z(const State& s, std::uint32_t v) const;

    const Graph& graph() const { return *g_; }
    const ColorLists& lists() const { return *lists_; }
    const HybridParams& params() const { return params_; }

private:
    const Graph* g_;
    const ColorLists* lists_;
    HybridParams params_;
    HybridOptions options_;
    std::size_t n_;
    std::size_t slots_;
    std::vector<std::size_t> offset_;
    InitialDistribution initial_;
};

struct Phase1Result {
    Outcome outcome = Outcome::flawless;
    std::uint64_t steps = 0;
    std::uint64_t b_steps = 0;
    std::uint64_t z_steps = 0;
    std::uint64_t f_steps = 0;
    std::uint64_t uncolorings = 0;
    State state;
};

struct Phase1Options {
    std::uint64_t cap = 1'000'000;
    /// Per-step invariant, locality and f-step assertions.
    bool check = false;
    HybridOptions hybrid;
};

Phase1Result phase1_run(const Graph& g, const ColorLists& lists, const HybridParams& params, Rng& rng,
                        const Phase1Options& options = {});

struct Phase2Result {
    bool success = false;
    std::uint64_t resamples = 0;
    std::string diagnostic;
    State coloring;
};

/// Moser–Tardos completion: each Blank vertex draws from its real available colors; while a
/// monochromatic edge joins two such vertices, the lowest one is resampled at both endpoints.
Phase2Result phase2_complete(const Graph& g, const ColorLists& lists, const State& s, Rng& rng,
                             std::uint64_t cap = 10'000'000);

/// Every vertex holds a color from its list and no edge is monochromatic.
bool verify_list_coloring(const Graph& g, const ColorLists& lists, const State& coloring);

struct NeighborhoodStats {
    std::vector<std::size_t> degree;
    /// |E_v|: edges spanned by N_v (the triangles through v).
    std::vector<std::size_t> span;
    std::size_t max_degree = 0;
    std::size_t max_span = 0;
    /// Δ²/max|E_v|; Δ²+1 when triangle-free.
    double implied_f = 0;
};

NeighborhoodStats neighborhood_stats(const Graph& g);

/// Edges spanned by N_v.
std::size_t neighborhood_span(const Graph& g, std::uint32_t v);

/// Vertices at distance 1 or 2 from v, ascending.
std::vector<std::uint32_t> distance2(const Graph& g, std::uint32_t v);

/// The first vertex (in id order) lying in more than `limit` triangles, if any.
std::optional<std::uint32_t> first_triangle_excess(const Graph& g, double limit);

struct RecolorFrequency {
    std::size_t trials = 0;
    std::size_t in_b = 0;
    std::size_t in_z = 0;
};

/// Runs RECOLOR(v, s) `trials` times and counts outcomes in B_v and in Z_v.
RecolorFrequency recolor_frequency(const HybridSystem& system, const State& s, std::uint32_t v,
                                   std::size_t trials, Rng& rng);

} // namespace flawkit::color
