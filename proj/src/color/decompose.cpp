#include "flawkit/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace flawkit::color {

namespace {

/// Per-thread vertex marks, all zero between uses.
std::vector<std::uint8_t>& marks(std::size_t n) {
    thread_local std::vector<std::uint8_t> m;
    if (m.size() < n) m.resize(n, 0);
    return m;
}

/// Edges among the neighbors u of v with keep(u).
template <class Keep>
std::size_t span_among(const Graph& g, std::uint32_t v, Keep keep) {
    auto& mark = marks(g.vertices());
    std::vector<std::uint32_t> kept;
    for (const auto& a : g.incident(v))
        if (keep(a.neighbor)) {
            mark[a.neighbor] = 1;
            kept.push_back(a.neighbor);
        }
    std::size_t count = 0;
    for (std::uint32_t a : kept)
        for (const auto& b : g.incident(a)) count += b.neighbor > a && mark[b.neighbor];
    for (std::uint32_t a : kept) mark[a] = 0;
    return count;
}

/// Resample-until-clean driver shared by bisection and partitioning.
template <class Violated>
bool repair(const Graph& g, std::vector<std::uint32_t>& label, std::uint32_t k, Violated violated, Rng& rng,
            std::uint64_t cap, std::uint64_t& resamples) {
    while (true) {
        bool clean = true;
        for (std::uint32_t v = 0; v < g.vertices(); ++v) {
            if (!violated(v)) continue;
            clean = false;
            if (resamples >= cap) return false;
            ++resamples;
            label[v] = static_cast<std::uint32_t>(rng.below(k));
            for (const auto& inc : g.incident(v)) label[inc.neighbor] = static_cast<std::uint32_t>(rng.below(k));
        }
        if (clean) return true;
    }
}

std::size_t greedy_color(const Graph& h, State& out) {
    std::size_t used = 0;
    std::vector<char> taken;
    for (std::uint32_t v = 0; v < h.vertices(); ++v) {
        taken.assign(h.degree(v) + 1, 0);
        for (const auto& inc : h.incident(v))
            if (inc.neighbor < v && static_cast<std::size_t>(out[inc.neighbor]) < taken.size())
                taken[static_cast<std::size_t>(out[inc.neighbor])] = 1;
        const auto c = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), 0) - taken.begin());
        out[v] = static_cast<std::int32_t>(c);
        used = std::max(used, c + 1);
    }
    return used;
}

struct Failure {
    std::string stage;
    std::string diagnostic;
};

class Pipeline {
public:
    Pipeline(const DecomposeOptions& options, Rng& rng, DecomposeResult& result)
        : options_(options), rng_(rng), result_(result) {}

    /// Colors `h` (vertex k of h is `ids[k]` of the input) with colors from `next_color_` upward.
    void color_large(const Graph& h, const std::vector<std::uint32_t>& ids) {
        const std::size_t delta = h.max_degree();
        if (delta < 2) {
            trivial(h, ids);
            return;
        }
        const auto stats = neighborhood_stats(h);
        const double zeta = options_.epsilon * options_.epsilon;
        const double d = static_cast<double>(delta);
        const double theta = std::min(std::log(stats.implied_f) / ((2 + zeta) * std::log(d)), 1 - 1e-9);
        const auto p = partition_params(d, theta, zeta);
        const auto bad = bad_edges(h, p.bad_common);
        auto part = partition_classes(h, p, rng_, options_.partition_cap);
        result_.partitions.push_back(part.check);
        if (!part.success) throw Failure{"partition", part.diagnostic};

        for (std::uint32_t c = 0; c < p.k; ++c) {
            std::vector<std::uint32_t> members;
            for (std::uint32_t v = 0; v < h.vertices(); ++v)
                if (part.cls[v] == c) members.push_back(v);
            if (members.empty()) continue;
            color_class(h, ids, part.cls, bad, members, p);
        }
    }

    void trivial(const Graph& h, const std::vector<std::uint32_t>& ids) {
        if (h.vertices() == 0) return;
        State local(h.vertices(), 0);
        const std::size_t used = greedy_color(h, local);
        for (std::size_t k = 0; k < ids.size(); ++k)
            result_.coloring[ids[k]] = static_cast<std::int32_t>(next_color_) + local[k];
        ClassReport rep;
        rep.vertices = h.vertices();
        rep.greedy_colors = used;
        result_.classes.push_back(rep);
        next_color_ += used;
    }

    /// Phase 1 and phase 2 on `h` with `derived` when it is guarantee-valid; otherwise q = Δ_H+1
    /// and L = q·e^{−Δ_H/q}/2.
    void color_hybrid(const Graph& h, const std::vector<std::uint32_t>& ids, const std::optional<HybridParams>& derived,
                      ClassReport& rep) {
        const std::size_t dh = h.max_degree();
        HybridParams params;
        if (derived && derived->guarantee_valid) {
            params = *derived;
        } else {
            rep.fallback = true;
            all_valid_ = false;
            const std::size_t q = dh + 1;
            params = explicit_params(static_cast<double>(dh),
                                     static_cast<double>(q) * std::exp(-static_cast<double>(dh) / q) / 2, q);
        }
        rep.params = params;
        const auto lists = ColorLists::shared(h.vertices(), params.q);
        Phase1Options o;
        o.cap = options_.phase1_cap;
        const auto r1 = phase1_run(h, lists, params, rng_, o);
        rep.phase1_steps = r1.steps;
        if (r1.outcome != Outcome::flawless)
            throw Failure{"phase1", "phase 1 exceeded " + std::to_string(o.cap) + " steps on " +
                                        std::to_string(h.vertices()) + " vertices"};
        const auto r2 = phase2_complete(h, lists, r1.state, rng_, options_.phase2_cap);
        if (!r2.success) throw Failure{"phase2", r2.diagnostic};
        for (std::size_t k = 0; k < ids.size(); ++k)
            result_.coloring[ids[k]] = static_cast<std::int32_t>(next_color_) + r2.coloring[k];
        rep.hybrid_colors = params.q;
        next_color_ += params.q;
    }

    void push(const ClassReport& rep) { result_.classes.push_back(rep); }

    std::size_t colors() const { return next_color_; }
    bool all_valid() const { return all_valid_; }

private:
    void color_class(const Graph& h, const std::vector<std::uint32_t>& ids, const std::vector<std::uint32_t>& cls,
                     const std::vector<bool>& bad, const std::vector<std::uint32_t>& members,
                     const PartitionParams& p) {
        ClassReport rep;
        rep.vertices = members.size();
        std::vector<std::uint32_t> bad_part, rest;
        for (auto u : members) {
            bool is_bad = false;
            for (const auto& inc : h.incident(u)) is_bad = is_bad || (cls[inc.neighbor] == cls[u] && bad[inc.edge]);
            (is_bad ? bad_part : rest).push_back(u);
        }
        if (!bad_part.empty()) {
            const Graph hb = h.induced(bad_part);
            State local(hb.vertices(), 0);
            rep.greedy_colors = greedy_color(hb, local);
            for (std::size_t k = 0; k < bad_part.size(); ++k)
                result_.coloring[ids[bad_part[k]]] = static_cast<std::int32_t>(next_color_) + local[k];
            next_color_ += rep.greedy_colors;
        }
        if (!rest.empty()) {
            // Parameters of the sparse-class argument.
            const double dstar = (1 + p.theta) * std::pow(p.delta, p.theta);
            const double fstar = std::pow(p.theta * p.zeta * dstar, 2) / 100;
            std::optional<HybridParams> derived;
            if (dstar >= 2 && fstar >= 2 && fstar <= dstar * dstar + 1)
                derived = derive_params(dstar, fstar, p.zeta / 3);
            std::vector<std::uint32_t> rest_ids;
            for (auto u : rest) rest_ids.push_back(ids[u]);
            color_hybrid(h.induced(rest), rest_ids, derived, rep);
        }
        result_.classes.push_back(rep);
    }

    const DecomposeOptions& options_;
    Rng& rng_;
    DecomposeResult& result_;
    std::size_t next_color_ = 0;
    bool all_valid_ = true;
};

} // namespace

BisectBounds bisect_bounds(double delta, double s) {
    BisectBounds b;
    if (delta < 2) {
        b.degree = delta;
        b.span = s;
        b.degree_vacuous = true;
        return b;
    }
    const double l = std::log(delta);
    b.degree = delta / 2 + 2 * std::sqrt(delta * l);
    b.span = s / 4 + 2 * std::pow(delta, 1.5) * std::sqrt(l);
    b.degree_vacuous = b.degree >= delta;
    return b;
}

BisectCheck check_bisection(const Graph& g, const std::vector<std::uint8_t>& side, double delta, double s) {
    BisectCheck c;
    c.bounds = bisect_bounds(delta, s);
    for (std::uint32_t v = 0; v < g.vertices(); ++v) {
        std::size_t d = 0;
        for (const auto& inc : g.incident(v)) d += side[inc.neighbor] == side[v];
        c.max_degree = std::max(c.max_degree, d);
        c.max_span = std::max(c.max_span, span_among(g, v, [&](std::uint32_t u) { return side[u] == side[v]; }));
    }
    c.degree_ok = static_cast<double>(c.max_degree) <= c.bounds.degree;
    c.span_ok = static_cast<double>(c.max_span) <= c.bounds.span;
    return c;
}

BisectResult bisect(const Graph& g, Rng& rng, std::uint64_t retry_cap) {
    BisectResult out;
    const double delta = static_cast<double>(g.max_degree());
    const double s = static_cast<double>(neighborhood_stats(g).max_span);
    const auto bounds = bisect_bounds(delta, s);
    std::vector<std::uint32_t> label(g.vertices());
    for (auto& x : label) x = static_cast<std::uint32_t>(rng.below(2));
    auto violated = [&](std::uint32_t v) {
        std::size_t d = 0;
        for (const auto& inc : g.incident(v)) d += label[inc.neighbor] == label[v];
        if (static_cast<double>(d) > bounds.degree) return true;
        return static_cast<double>(span_among(g, v, [&](std::uint32_t u) { return label[u] == label[v]; })) >
               bounds.span;
    };
    const bool clean = repair(g, label, 2, violated, rng, retry_cap, out.resamples);
    out.side.assign(label.begin(), label.end());
    out.check = check_bisection(g, out.side, delta, s);
    out.success = clean && out.check.ok();
    if (!clean) out.diagnostic = "bisection exceeded " + std::to_string(retry_cap) + " resamplings";
    return out;
}

ParamSchedule param_schedule(double delta, double f, double d, double zeta) {
    if (!(delta >= 2) || !(f > 1) || !(d > 0) || !(zeta > 0)) throw DomainError("param_schedule needs Δ ≥ 2, f > 1, δ > 0, ζ > 0");
    ParamSchedule r;
    r.hypotheses_hold = d < 0.01 && zeta * (2 + d) < 0.1;
    if (!r.hypotheses_hold)
        r.warning = "hypotheses δ ∈ (0, 1/100) and ζ(2+δ) < 1/10 do not hold; evaluated anyway";
    const double exponent = (2 + d) * zeta;
    while (!(f > std::pow((1 + d) * delta / std::exp2(static_cast<double>(r.j)), exponent))) {
        if (++r.j > 2000) throw InternalError("param_schedule found no j");
    }
    r.delta_t.push_back(delta);
    r.s_t.push_back(delta * delta / f);
    for (std::size_t t = 0; t < r.j; ++t) {
        const double dt = r.delta_t.back(), st = r.s_t.back();
        const double l = std::max(std::log(dt), 0.0);
        r.delta_t.push_back(dt / 2 + 2 * std::sqrt(dt * l));
        r.s_t.push_back(st / 4 + 2 * std::pow(dt, 1.5) * std::sqrt(l));
    }
    r.delta_target = (1 + d) * delta / std::exp2(static_cast<double>(r.j));
    r.s_target = r.delta_target * r.delta_target / f;
    r.delta_ok = r.delta_t.back() <= r.delta_target;
    r.s_ok = r.s_t.back() <= r.s_target;
    return r;
}

PartitionParams partition_params(double delta, double theta, double zeta) {
    if (!(delta >= 1) || !(theta > 0) || !(theta < 1) || !(zeta > 0) || !(zeta < 1))
        throw DomainError("partition parameters need Δ ≥ 1 and θ, ζ ∈ (0, 1)");
    PartitionParams p;
    p.delta = delta;
    p.theta = theta;
    p.zeta = zeta;
    p.k = static_cast<std::size_t>(std::ceil(std::pow(delta, 1 - theta) - 1e-6));
    p.degree_limit = (1 + theta) * std::pow(delta, theta);
    p.bad_common = std::pow(delta, 1 - (1 + zeta / 2) * theta);
    p.bad_limit = 10 / (theta * zeta);
    p.span_limit = 100 / std::pow(theta * zeta, 2);
    return p;
}

std::vector<bool> bad_edges(const Graph& g, double bad_common) {
    std::vector<bool> bad(g.edges());
    auto& mark = marks(g.vertices());
    for (std::uint32_t u = 0; u < g.vertices(); ++u) {
        for (const auto& a : g.incident(u)) mark[a.neighbor] = 1;
        for (const auto& a : g.incident(u)) {
            if (a.neighbor < u) continue;
            std::size_t common = 0;
            for (const auto& b : g.incident(a.neighbor)) common += mark[b.neighbor];
            bad[a.edge] = static_cast<double>(common) >= bad_common;
        }
        for (const auto& a : g.incident(u)) mark[a.neighbor] = 0;
    }
    return bad;
}

namespace {

struct EventValues {
    std::size_t degree = 0;
    std::size_t bad = 0;
    std::size_t good_span = 0;
};

EventValues event_values(const Graph& g, const std::vector<std::uint32_t>& cls, const std::vector<bool>& bad,
                         std::uint32_t v) {
    EventValues x;
    for (const auto& inc : g.incident(v)) {
        if (cls[inc.neighbor] != cls[v]) continue;
        ++x.degree;
        if (bad[inc.edge]) ++x.bad;
    }
    x.good_span = span_among(g, v, [&](std::uint32_t u) {
        if (cls[u] != cls[v]) return false;
        return !bad[*g.edge_between(u, v)];
    });
    return x;
}

} // namespace

PartitionCheck check_partition(const Graph& g, const std::vector<std::uint32_t>& cls, const PartitionParams& p,
                               const std::vector<bool>& bad) {
    PartitionCheck c;
    for (std::uint32_t v = 0; v < g.vertices(); ++v) {
        const auto x = event_values(g, cls, bad, v);
        c.max_class_degree = std::max(c.max_class_degree, x.degree);
        c.max_bad = std::max(c.max_bad, x.bad);
        c.max_good_span = std::max(c.max_good_span, x.good_span);
    }
    c.a_ok = static_cast<double>(c.max_class_degree) <= p.degree_limit;
    c.b_ok = static_cast<double>(c.max_bad) <= p.bad_limit;
    c.c_ok = static_cast<double>(c.max_good_span) <= p.span_limit;
    return c;
}

PartitionResult partition_classes(const Graph& g, const PartitionParams& p, Rng& rng, std::uint64_t cap) {
    PartitionResult out;
    const auto bad = bad_edges(g, p.bad_common);
    const auto k = static_cast<std::uint32_t>(p.k);
    out.cls.resize(g.vertices());
    for (auto& x : out.cls) x = static_cast<std::uint32_t>(rng.below(k));
    auto violated = [&](std::uint32_t v) {
        const auto x = event_values(g, out.cls, bad, v);
        return static_cast<double>(x.degree) > p.degree_limit || static_cast<double>(x.bad) > p.bad_limit ||
               static_cast<double>(x.good_span) > p.span_limit;
    };
    const bool clean = repair(g, out.cls, k, violated, rng, cap, out.resamples);
    out.check = check_partition(g, out.cls, p, bad);
    out.success = clean && out.check.ok();
    if (!clean) out.diagnostic = "partition exceeded " + std::to_string(cap) + " resamplings";
    return out;
}

DecomposeResult decompose_and_color(const Graph& g, const DecomposeOptions& options, Rng& rng) {
    if (!(options.epsilon > 0) || !(options.epsilon < 1)) throw DomainError("decomposition needs ε ∈ (0, 1)");
    DecomposeResult result;
    result.coloring.assign(g.vertices(), blank);
    Pipeline pipeline(options, rng, result);
    std::vector<std::uint32_t> all(g.vertices());
    for (std::uint32_t v = 0; v < g.vertices(); ++v) all[v] = v;

    const std::size_t delta = g.max_degree();
    try {
        if (delta < 2) {
            result.branch = "trivial";
            pipeline.trivial(g, all);
        } else {
            const auto stats = neighborhood_stats(g);
            const double d = static_cast<double>(delta);
            const double eps = options.epsilon;
            result.guarantee = (2 + eps) * d / std::log(std::sqrt(stats.implied_f));
            if (stats.max_span == 0) {
                result.branch = "triangle-free";
                ClassReport rep;
                rep.vertices = g.vertices();
                pipeline.color_hybrid(g, all, derive_params(d, d * d + 1, eps), rep);
                pipeline.push(rep);
            } else if (stats.implied_f >= std::pow(d, (2 + eps * eps) * eps)) {
                result.branch = "large-f";
                pipeline.color_large(g, all);
            } else {
                result.branch = "small-f";
                const auto schedule = param_schedule(d, stats.implied_f, eps * eps, eps * eps);
                std::vector<std::vector<std::uint32_t>> parts{all};
                for (std::size_t round = 0; round < schedule.j; ++round) {
                    std::vector<std::vector<std::uint32_t>> next;
                    for (const auto& part : parts) {
                        const Graph h = g.induced(part);
                        if (h.max_degree() < 2) {
                            next.push_back(part);
                            continue;
                        }
                        auto b = bisect(h, rng, options.bisect_cap);
                        result.bisections.push_back(b.check);
                        if (!b.success) throw Failure{"bisect", b.diagnostic.empty() ? "bounds violated" : b.diagnostic};
                        std::vector<std::uint32_t> halves[2];
                        for (std::size_t k = 0; k < part.size(); ++k) halves[b.side[k]].push_back(part[k]);
                        for (auto& half : halves)
                            if (!half.empty()) next.push_back(std::move(half));
                    }
                    parts = std::move(next);
                    ++result.bisect_rounds;
                }
                for (const auto& part : parts) pipeline.color_large(g.induced(part), part);
            }
        }
    } catch (const Failure& f) {
        result.failed_stage = f.stage;
        result.diagnostic = f.diagnostic;
        return result;
    }

    result.colors = pipeline.colors();
    const auto lists = ColorLists::shared(g.vertices(), std::max<std::size_t>(result.colors, 1));
    if (!verify_list_coloring(g, lists, result.coloring))
        throw InternalError("decomposition produced an improper coloring");
    result.guarantee_asserted = pipeline.all_valid() && result.branch != "trivial";
    if (result.guarantee_asserted && static_cast<double>(result.colors) > result.guarantee)
        throw InternalError("color count exceeds the guarantee although every parameter check held");
    result.success = true;
    return result;
}

} // namespace flawkit::color
