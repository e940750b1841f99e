#include "flawkit/aec.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace flawkit::aec {

namespace {

/// The edge of color c at vertex x, if any.
std::optional<std::uint32_t> edge_of_color(const Graph& g, const State& coloring, std::uint32_t x, std::int32_t c) {
    for (const auto& inc : g.incident(x))
        if (coloring[inc.edge] == c) return inc.edge;
    return std::nullopt;
}

std::uint32_t other_end(const Graph& g, std::uint32_t e, std::uint32_t x) {
    const auto& [a, b] = g.endpoints(e);
    return a == x ? b : a;
}

} // namespace

std::vector<std::int32_t> forbidden4(const Graph& g, const State& coloring, std::uint32_t e) {
    if (coloring[e] != uncolored) throw PreconditionError("forbidden4 on colored edge " + std::to_string(e));
    const auto [u, v] = g.endpoints(e);
    std::vector<std::int32_t> out;
    for (auto x : {u, v})
        for (const auto& inc : g.incident(x))
            if (coloring[inc.edge] != uncolored) out.push_back(coloring[inc.edge]);
    // 4-cycle u–v–x–y–u: colors on (v,x) and (y,u) agree, so the color of (x,y) is forbidden for e.
    for (const auto& vx : g.incident(v)) {
        const std::int32_t d = coloring[vx.edge];
        if (d == uncolored || vx.neighbor == u) continue;
        const auto uy = edge_of_color(g, coloring, u, d);
        if (!uy) continue;
        const std::uint32_t y = other_end(g, *uy, u);
        if (y == v || y == vx.neighbor) continue;
        if (const auto xy = g.edge_between(vx.neighbor, y); xy && coloring[*xy] != uncolored)
            out.push_back(coloring[*xy]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    const std::size_t delta = g.max_degree();
    if (out.size() > 2 * (delta - 1))
        throw InternalError("edge " + std::to_string(e) + " has " + std::to_string(out.size()) +
                            " 4-forbidden colors, more than 2(Δ−1)");
    return out;
}

std::vector<std::int32_t> available4(const Graph& g, const State& coloring, std::uint32_t e, std::size_t q) {
    const auto forbidden = forbidden4(g, coloring, e);
    std::vector<std::int32_t> out;
    for (std::int32_t c = 0; c < static_cast<std::int32_t>(q); ++c)
        if (!std::binary_search(forbidden.begin(), forbidden.end(), c)) out.push_back(c);
    return out;
}

std::vector<std::vector<std::uint32_t>> bichromatic_cycles_through(const Graph& g, const State& coloring,
                                                                   std::uint32_t e) {
    std::vector<std::vector<std::uint32_t>> cycles;
    const std::int32_t c = coloring[e];
    if (c == uncolored) return cycles;
    const auto [u, v] = g.endpoints(e);
    for (const auto& start : g.incident(v)) {
        const std::int32_t d = coloring[start.edge];
        if (d == uncolored || d == c) continue;
        // The alternating d, c, d, … walk from v is unique under properness; it closes at u on a d-edge.
        std::vector<std::uint32_t> cycle{e, start.edge};
        std::uint32_t at = start.neighbor;
        std::int32_t want = c;
        while (true) {
            if (at == u) {
                if (want == c) cycles.push_back(cycle);
                break;
            }
            const auto next = edge_of_color(g, coloring, at, want);
            if (!next || cycle.size() > g.edges()) break;
            cycle.push_back(*next);
            at = other_end(g, *next, at);
            want = want == c ? d : c;
        }
    }
    return cycles;
}

std::vector<std::vector<std::uint32_t>> cycles_through(const Graph& g, std::uint32_t e, std::size_t max_length,
                                                       bool even_only, std::size_t limit) {
    std::vector<std::vector<std::uint32_t>> cycles;
    const auto [u, v] = g.endpoints(e);
    std::vector<bool> on_path(g.vertices(), false);
    std::vector<std::uint32_t> path{e};
    on_path[v] = true;
    // Simple paths v → u avoiding e; each closes exactly one cycle through e.
    auto dfs = [&](auto&& self, std::uint32_t at) -> void {
        for (const auto& inc : g.incident(at)) {
            if (inc.edge == e) continue;
            if (inc.neighbor == u) {
                const std::size_t length = path.size() + 1;
                if (length <= max_length && (!even_only || length % 2 == 0)) {
                    path.push_back(inc.edge);
                    cycles.push_back(path);
                    path.pop_back();
                    if (cycles.size() > limit)
                        throw CapacityError("more than " + std::to_string(limit) + " cycles through edge " +
                                            std::to_string(e));
                }
                continue;
            }
            if (on_path[inc.neighbor] || path.size() + 2 > max_length) continue;
            on_path[inc.neighbor] = true;
            path.push_back(inc.edge);
            self(self, inc.neighbor);
            path.pop_back();
            on_path[inc.neighbor] = false;
        }
    };
    if (max_length >= 3) dfs(dfs, v);
    return cycles;
}

std::pair<std::uint32_t, std::uint32_t> kept_edges(const std::vector<std::uint32_t>& cycle, std::uint32_t e) {
    const std::size_t n = cycle.size();
    std::size_t m = n;
    for (std::size_t k = 0; k < n; ++k)
        if (cycle[k] != e && (m == n || cycle[k] < cycle[m])) m = k;
    const std::uint32_t left = cycle[(m + n - 1) % n], right = cycle[(m + 1) % n];
    std::uint32_t partner;
    if (left == e) partner = right;
    else if (right == e) partner = left;
    else partner = std::min(left, right);
    return {cycle[m], partner};
}

FlawSet uncolored_part(const std::vector<std::uint32_t>& cycle, std::uint32_t e) {
    const auto [a, b] = kept_edges(cycle, e);
    std::vector<FlawId> s;
    for (auto x : cycle)
        if (x != a && x != b) s.push_back(x);
    return FlawSet(std::move(s));
}

bool verify_acyclic_proper(const Graph& g, const State& coloring, bool require_complete) {
    if (coloring.size() != g.edges()) return false;
    std::map<std::int32_t, std::vector<std::uint32_t>> classes;
    for (std::uint32_t e = 0; e < g.edges(); ++e) {
        if (coloring[e] == uncolored) {
            if (require_complete) return false;
            continue;
        }
        classes[coloring[e]].push_back(e);
    }
    for (std::size_t v = 0; v < g.vertices(); ++v) {
        std::vector<std::int32_t> seen;
        for (const auto& inc : g.incident(v))
            if (coloring[inc.edge] != uncolored) seen.push_back(coloring[inc.edge]);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
    }
    std::vector<std::uint32_t> parent(g.vertices());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto a = classes.begin(); a != classes.end(); ++a) {
        for (auto b = std::next(a); b != classes.end(); ++b) {
            std::vector<std::uint32_t> touched;
            bool cyclic = false;
            for (const auto* cls : {&a->second, &b->second}) {
                for (auto e : *cls) {
                    const auto [x, y] = g.endpoints(e);
                    touched.push_back(x);
                    touched.push_back(y);
                    const auto rx = find(x), ry = find(y);
                    if (rx == ry) cyclic = true;
                    else parent[rx] = ry;
                }
            }
            for (auto x : touched) parent[x] = x;
            if (cyclic) return false;
        }
    }
    return true;
}

AecSystem::AecSystem(const Graph& g, std::size_t q)
    : g_(&g), q_(q), initial_(InitialDistribution::point(State(g.edges(), uncolored))) {
    if (q == 0) throw ConfigError("edge coloring needs at least one color");
}

FlawSet AecSystem::present(const State& s) const {
    std::vector<FlawId> ids;
    for (std::size_t e = 0; e < s.size(); ++e)
        if (s[e] == uncolored) ids.push_back(static_cast<FlawId>(e));
    return FlawSet::from_sorted(std::move(ids));
}

State AecSystem::color(const State& s, std::uint32_t e, std::int32_t c) const {
    State t = s;
    t[e] = c;
    const auto cycles = bichromatic_cycles_through(*g_, t, e);
    if (cycles.empty()) return t;
    // Lowest sorted edge-id tuple wins.
    std::size_t best = 0;
    std::vector<std::vector<std::uint32_t>> keys;
    for (const auto& cyc : cycles) {
        auto ids = cyc;
        std::sort(ids.begin(), ids.end());
        keys.push_back(std::move(ids));
    }
    for (std::size_t k = 1; k < cycles.size(); ++k)
        if (keys[k] < keys[best]) best = k;
    for (FlawId x : uncolored_part(cycles[best], e)) t[x] = uncolored;
    return t;
}

State AecSystem::sample(FlawId i, const State& s, Rng& rng) const {
    const auto avail = available4(*g_, s, i, q_);
    if (avail.empty())
        throw DeadEnd("no 4-available color for edge " + std::to_string(i) + " with q=" + std::to_string(q_));
    return color(s, i, avail[rng.below(avail.size())]);
}

std::vector<Transition> AecSystem::transitions(FlawId i, const State& s) const {
    const auto avail = available4(*g_, s, i, q_);
    if (avail.empty()) throw DeadEnd("no 4-available color for edge " + std::to_string(i));
    std::vector<Transition> out;
    const double p = 1.0 / static_cast<double>(avail.size());
    for (auto c : avail) {
        State t = color(s, i, c);
        auto same = std::find_if(out.begin(), out.end(), [&](const Transition& x) { return x.to == t; });
        if (same != out.end())
            same->probability += p;
        else
            out.push_back({std::move(t), p});
    }
    return out;
}

void AecSystem::check_state(const State& s) const {
    if (!verify_acyclic_proper(*g_, s, false)) throw InternalError("partial edge coloring is not proper and acyclic");
}

AecResult aec_run(const Graph& g, std::size_t q, Rng& rng, std::uint64_t cap, bool check) {
    AecSystem system(g, q);
    AecResult out;
    RunOptions options;
    options.cap = cap;
    options.check = check;
    options.observer = [&](const StepEvent& e) {
        out.max_forbidden = std::max(out.max_forbidden, forbidden4(g, e.before, e.addressed).size());
        if (e.present_after.size() >= e.present_before.size()) ++out.backtracks;
    };
    try {
        auto r = run_from(system, Strategy::identity(), State(g.edges(), uncolored), rng, options);
        out.outcome = r.outcome;
        out.steps = r.steps;
        out.coloring = std::move(r.final_state);
    } catch (const DeadEnd& d) {
        out.outcome = Outcome::cap_exceeded;
        out.dead_end = true;
        out.diagnostic = d.what();
    }
    if (out.outcome == Outcome::flawless && !verify_acyclic_proper(g, out.coloring))
        throw InternalError("edge-coloring run ended in a coloring that fails verification");
    return out;
}

} // namespace flawkit::aec
