#pragma once

#include "flawkit/color.hpp"

#include <string>
#include <vector>

namespace flawkit::color {

/// Per-part limits of a random halving: degree Δ/2 + 2√(Δ ln Δ), span s/4 + 2Δ^{3/2}√(ln Δ).
struct BisectBounds {
    double degree = 0;
    double span = 0;
    /// The degree limit is at least Δ, so it cannot fail.
    bool degree_vacuous = false;
};
BisectBounds bisect_bounds(double delta, double s);

struct BisectCheck {
    BisectBounds bounds;
    std::size_t max_degree = 0;
    std::size_t max_span = 0;
    bool degree_ok = false;
    bool span_ok = false;
    bool ok() const { return degree_ok && span_ok; }
};

/// Evaluates both bounds literally on G[V₀] and G[V₁], where side[v] ∈ {0, 1}.
BisectCheck check_bisection(const Graph& g, const std::vector<std::uint8_t>& side, double delta, double s);

struct BisectResult {
    bool success = false;
    std::vector<std::uint8_t> side;
    std::uint64_t resamples = 0;
    BisectCheck check;
    std::string diagnostic;
};

/// Random halving repaired by resampling the sides of a violating vertex and its neighbors.
BisectResult bisect(const Graph& g, Rng& rng, std::uint64_t retry_cap = 100000);

struct ParamSchedule {
    std::size_t j = 0;
    std::vector<double> delta_t;
    std::vector<double> s_t;
    /// (1+δ)Δ/2^j and ((1+δ)Δ/2^j)²/f.
    double delta_target = 0;
    double s_target = 0;
    bool delta_ok = false;
    bool s_ok = false;
    bool hypotheses_hold = false;
    std::string warning;
};

/// j is the least integer with f > ((1+δ)Δ/2^j)^{(2+δ)ζ}; Δ_t and s_t follow the halving recurrence.
ParamSchedule param_schedule(double delta, double f, double d, double zeta);

struct PartitionParams {
    double delta = 0;
    double theta = 0;
    double zeta = 0;
    std::size_t k = 1;
    /// (1+θ)Δ^θ.
    double degree_limit = 0;
    /// u is a bad neighbor of v when they share at least Δ^{1−(1+ζ/2)θ} neighbors.
    double bad_common = 0;
    /// 10/(θζ).
    double bad_limit = 0;
    /// 100/(θζ)².
    double span_limit = 0;
};

PartitionParams partition_params(double delta, double theta, double zeta);

/// bad[e] for every edge e.
std::vector<bool> bad_edges(const Graph& g, double bad_common);

struct PartitionCheck {
    std::size_t max_class_degree = 0;
    std::size_t max_bad = 0;
    std::size_t max_good_span = 0;
    /// Complements of the A_v, B_v and C_v events at every vertex.
    bool a_ok = false;
    bool b_ok = false;
    bool c_ok = false;
    bool ok() const { return a_ok && b_ok && c_ok; }
};

PartitionCheck check_partition(const Graph& g, const std::vector<std::uint32_t>& cls, const PartitionParams& p,
                               const std::vector<bool>& bad);

struct PartitionResult {
    bool success = false;
    std::vector<std::uint32_t> cls;
    std::uint64_t resamples = 0;
    PartitionCheck check;
    std::string diagnostic;
};

/// Uniform classes in [0, k) repaired by resampling the classes of v ∪ N(v) while A_v, B_v or C_v holds.
PartitionResult partition_classes(const Graph& g, const PartitionParams& p, Rng& rng, std::uint64_t cap = 1000000);

struct DecomposeOptions {
    double epsilon = 0.5;
    std::uint64_t phase1_cap = 1'000'000;
    std::uint64_t phase2_cap = 10'000'000;
    std::uint64_t partition_cap = 1'000'000;
    std::uint64_t bisect_cap = 100'000;
};

struct ClassReport {
    std::size_t vertices = 0;
    /// Colors used greedily on the bad-neighbor part.
    std::size_t greedy_colors = 0;
    /// Palette of the hybrid algorithm on the rest.
    std::size_t hybrid_colors = 0;
    HybridParams params;
    /// The class's derived parameters were unusable and q = Δ_H+1 was taken instead.
    bool fallback = false;
    std::uint64_t phase1_steps = 0;
};

struct DecomposeResult {
    bool success = false;
    /// Name of the failing stage, empty on success.
    std::string failed_stage;
    std::string diagnostic;
    std::string branch;
    std::size_t bisect_rounds = 0;
    State coloring;
    std::size_t colors = 0;
    std::vector<ClassReport> classes;
    std::vector<BisectCheck> bisections;
    std::vector<PartitionCheck> partitions;
    /// (2+ε)Δ/ln√f.
    double guarantee = 0;
    bool guarantee_asserted = false;
};

DecomposeResult decompose_and_color(const Graph& g, const DecomposeOptions& options, Rng& rng);

} // namespace flawkit::color
