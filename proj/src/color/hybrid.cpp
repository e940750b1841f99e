#include "flawkit/color.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace flawkit::color {

namespace {

using Bits = boost::dynamic_bitset<>;

/// Real colors from v's list not used by a neighbor; neighbors listed in `ignored` (sorted) are skipped.
Bits free_bits(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v,
               const std::vector<std::uint32_t>* ignored = nullptr) {
    Bits bits = lists.bits(v);
    for (const auto& inc : g.incident(v)) {
        const std::int32_t c = s[inc.neighbor];
        if (!is_real(c) || static_cast<std::size_t>(c) >= bits.size()) continue;
        if (ignored && std::binary_search(ignored->begin(), ignored->end(), inc.neighbor)) continue;
        bits.reset(static_cast<std::size_t>(c));
    }
    return bits;
}

std::vector<std::int32_t> with_blank(const Bits& bits) {
    std::vector<std::int32_t> out{blank};
    for (auto c = bits.find_first(); c != Bits::npos; c = bits.find_next(c)) out.push_back(static_cast<std::int32_t>(c));
    return out;
}

bool below_L(std::size_t count, double L) { return static_cast<double>(count) < L - threshold_guard; }

bool above_competition(std::size_t sum, std::size_t available, double L) {
    return static_cast<double>(sum) > L / 10 * static_cast<double>(available) + threshold_guard;
}

std::vector<std::uint32_t> neighbors_of(const Graph& g, std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (const auto& inc : g.incident(v)) out.push_back(inc.neighbor);
    return out;
}

/// Step 1 of RECOLOR: every non-marked vertex of N_v draws from R_u^v(s).
void draw_neighbors(const Graph& g, const ColorLists& lists, State& t, const State& s,
                    const std::vector<std::uint32_t>& nv, Rng& rng) {
    for (auto u : nv) {
        if (is_marker(s[u])) continue;
        const auto r = with_blank(free_bits(g, lists, s, u, &nv));
        t[u] = r[rng.below(r.size())];
    }
}

} // namespace

HybridParams derive_params(double delta, double f, double epsilon) {
    if (!(delta >= 2)) throw DomainError("derive_params needs Δ ≥ 2");
    if (!(f >= 2)) throw DomainError("derive_params needs f ≥ 2");
    if (!(epsilon > 0)) throw DomainError("derive_params needs ε > 0");
    if (f > delta * delta + 1) throw DomainError("f exceeds Δ²+1");
    HybridParams p;
    p.delta = delta;
    p.f = f;
    p.epsilon = epsilon;
    p.L = (1 + epsilon) * (delta / std::log(f)) * std::pow(f, -1 / (2 + 2 * epsilon));
    p.q = static_cast<std::size_t>(std::ceil((1 + epsilon) * delta / std::log(std::sqrt(f)) - 1e-9));
    const double lower = std::pow(delta, (2 + 2 * epsilon) / (1 + 2 * epsilon)) * std::pow(std::log(delta), 2);
    p.f_in_range = f >= lower && f <= delta * delta + 1;
    p.guarantee_valid = p.L >= 10 && p.f_in_range;
    return p;
}

HybridParams explicit_params(double delta, double L, std::size_t q) {
    if (!(L > 0) || q == 0) throw DomainError("explicit parameters need L > 0 and q ≥ 1");
    HybridParams p;
    p.delta = delta;
    p.L = L;
    p.q = q;
    p.guarantee_valid = L >= 10;
    return p;
}

ColorLists::ColorLists(std::vector<std::vector<std::int32_t>> lists) : lists_(std::move(lists)) {
    for (auto& l : lists_) {
        std::sort(l.begin(), l.end());
        if (std::adjacent_find(l.begin(), l.end()) != l.end()) throw ConfigError("color list has duplicates");
        if (!l.empty() && l.front() < 0) throw ConfigError("colors must be nonnegative");
        if (!l.empty()) palette_ = std::max(palette_, static_cast<std::size_t>(l.back()) + 1);
    }
    for (const auto& l : lists_) {
        Bits b(palette_);
        for (auto c : l) b.set(static_cast<std::size_t>(c));
        bits_.push_back(std::move(b));
    }
}

ColorLists ColorLists::shared(std::size_t vertices, std::size_t q) {
    std::vector<std::int32_t> all(q);
    for (std::size_t c = 0; c < q; ++c) all[c] = static_cast<std::int32_t>(c);
    return ColorLists(std::vector<std::vector<std::int32_t>>(vertices, all));
}

std::vector<std::int32_t> available_colors(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v) {
    return with_blank(free_bits(g, lists, s, v));
}

std::vector<std::int32_t> relaxed_colors(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v,
                                         std::uint32_t u) {
    const auto nv = neighbors_of(g, v);
    return with_blank(free_bits(g, lists, s, u, &nv));
}

std::size_t resolve_conflicts(const Graph& g, State& s, const std::vector<std::uint32_t>& candidates) {
    // Uncoloring never creates a monochromatic edge, so one ascending pass visits the
    // participating vertices in the order the while-loop would pick them.
    std::size_t uncolored = 0;
    for (auto u : candidates) {
        if (!is_real(s[u])) continue;
        std::optional<std::uint32_t> lowest;
        for (const auto& inc : g.incident(u))
            if (s[inc.neighbor] == s[u] && (!lowest || inc.edge < *lowest)) lowest = inc.edge;
        if (lowest) {
            s[u] = marker(*lowest);
            ++uncolored;
        }
    }
    return uncolored;
}

State recolor(const Graph& g, const ColorLists& lists, const State& s, std::uint32_t v, Rng& rng) {
    State t = s;
    const auto nv = neighbors_of(g, v);
    draw_neighbors(g, lists, t, s, nv, rng);
    resolve_conflicts(g, t, nv);
    return t;
}

bool no_monochromatic_edge(const Graph& g, const State& s) {
    for (const auto& [a, b] : g.edge_list())
        if (is_real(s[a]) && s[a] == s[b]) return false;
    return true;
}

HybridSystem::HybridSystem(const Graph& g, const ColorLists& lists, const HybridParams& params,
                           const HybridOptions& options)
    : g_(&g), lists_(&lists), params_(params), options_(options), n_(g.vertices()), slots_(2 * g.edges()),
      initial_(InitialDistribution::point(State(g.vertices(), blank))) {
    if (lists.vertices() != n_) throw ConfigError("color lists do not match the graph's vertex count");
    offset_.resize(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + g.degree(v);
}

std::uint32_t HybridSystem::vertex(FlawId i) const {
    switch (kind(i)) {
    case Kind::B: return i;
    case Kind::Z: return static_cast<std::uint32_t>(i - n_);
    default: {
        const std::size_t slot = i - 2 * n_;
        auto it = std::upper_bound(offset_.begin(), offset_.end(), slot);
        return static_cast<std::uint32_t>(std::distance(offset_.begin(), it) - 1);
    }
    }
}

FlawId HybridSystem::f_flaw(std::uint32_t v, std::uint32_t e) const {
    const auto& inc = g_->incident(v);
    for (std::size_t k = 0; k < inc.size(); ++k)
        if (inc[k].edge == e) return static_cast<FlawId>(2 * n_ + offset_[v] + k);
    throw PreconditionError("edge " + std::to_string(e) + " is not incident to vertex " + std::to_string(v));
}

std::string HybridSystem::describe_flaw(FlawId i) const {
    const auto v = std::to_string(vertex(i));
    switch (kind(i)) {
    case Kind::B: return "B(v" + v + ")";
    case Kind::Z: return "Z(v" + v + ")";
    default: {
        const std::size_t k = i - 2 * n_ - offset_[vertex(i)];
        return "f(v" + v + ",e" + std::to_string(g_->incident(vertex(i))[k].edge) + ")";
    }
    }
}

FlawSet HybridSystem::present(const State& s) const {
    std::vector<Bits> avail(n_);
    for (std::uint32_t v = 0; v < n_; ++v) avail[v] = free_bits(*g_, *lists_, s, v);
    std::vector<FlawId> ids;
    std::vector<FlawId> z_ids;
    for (std::uint32_t v = 0; v < n_; ++v) {
        const std::size_t count = avail[v].count() + 1;
        if (below_L(count, params_.L)) ids.push_back(b_flaw(v));
        std::size_t competition = 0;
        for (const auto& inc : g_->incident(v))
            if (s[inc.neighbor] == blank) competition += (avail[v] & avail[inc.neighbor]).count();
        if (above_competition(competition, count, params_.L)) z_ids.push_back(z_flaw(v));
    }
    ids.insert(ids.end(), z_ids.begin(), z_ids.end());
    for (std::uint32_t v = 0; v < n_; ++v)
        if (is_marker(s[v])) ids.push_back(f_flaw(v, marked_edge(s[v])));
    return FlawSet::from_sorted(std::move(ids));
}

bool HybridSystem::in_b(const State& s, std::uint32_t v) const {
    std::size_t count = 1;
    for (auto c : (*lists_)[v]) {
        bool used = false;
        for (const auto& inc : g_->incident(v)) used = used || s[inc.neighbor] == c;
        if (!used) ++count;
    }
    return below_L(count, params_.L);
}

bool HybridSystem::in_z(const State& s, std::uint32_t v) const {
    auto available = [&](std::uint32_t x, std::int32_t c) {
        if (!std::binary_search((*lists_)[x].begin(), (*lists_)[x].end(), c)) return false;
        for (const auto& inc : g_->incident(x))
            if (s[inc.neighbor] == c) return false;
        return true;
    };
    std::size_t count = 1, competition = 0;
    for (auto c : (*lists_)[v]) {
        if (!available(v, c)) continue;
        ++count;
        for (const auto& inc : g_->incident(v))
            if (s[inc.neighbor] == blank && available(inc.neighbor, c)) ++competition;
    }
    return above_competition(competition, count, params_.L);
}

State HybridSystem::sample(FlawId i, const State& s, Rng& rng) const {
    const std::uint32_t v = vertex(i);
    if (kind(i) != Kind::f) return recolor(*g_, *lists_, s, v, rng);
    const auto options = available_colors(*g_, *lists_, s, v);
    State t = s;
    t[v] = options[rng.below(options.size())];
    return t;
}

std::vector<Transition> HybridSystem::transitions(FlawId i, const State& s) const {
    const std::uint32_t v = vertex(i);
    std::vector<Transition> out;
    if (kind(i) == Kind::f) {
        const auto options = available_colors(*g_, *lists_, s, v);
        for (auto c : options) {
            State t = s;
            t[v] = c;
            out.push_back({std::move(t), 1.0 / static_cast<double>(options.size())});
        }
        return out;
    }
    const auto neighbors = neighbors_of(*g_, v);
    std::vector<std::uint32_t> free;
    std::vector<std::vector<std::int32_t>> choices;
    double combos = 1;
    for (auto u : neighbors) {
        if (is_marker(s[u])) continue;
        free.push_back(u);
        choices.push_back(with_blank(free_bits(*g_, *lists_, s, u, &neighbors)));
        combos *= static_cast<double>(choices.back().size());
    }
    if (combos > 2e6) throw CapacityError("RECOLOR(v" + std::to_string(v) + ") has " + std::to_string(combos) +
                                          " step-1 outcomes");
    std::unordered_map<State, double, StateHash> merged;
    std::vector<std::size_t> digit(free.size(), 0);
    const double p = 1 / combos;
    while (true) {
        State t = s;
        for (std::size_t k = 0; k < free.size(); ++k) t[free[k]] = choices[k][digit[k]];
        resolve_conflicts(*g_, t, neighbors);
        merged[std::move(t)] += p;
        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == choices[k].size()) digit[k++] = 0;
        if (k == digit.size()) break;
    }
    for (auto& [t, q] : merged) out.push_back({t, q});
    std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) { return a.to < b.to; });
    return out;
}

void HybridSystem::check_state(const State& s) const {
    if (s.size() != n_) throw InternalError("coloring state has the wrong length");
    for (std::uint32_t v = 0; v < n_; ++v) {
        const std::int32_t x = s[v];
        if (is_real(x) && !std::binary_search((*lists_)[v].begin(), (*lists_)[v].end(), x))
            throw InternalError("vertex " + std::to_string(v) + " holds color " + std::to_string(x) +
                                " outside its list");
        if (is_marker(x)) {
            const auto e = marked_edge(x);
            if (e >= g_->edges()) throw InternalError("marker references a missing edge");
            const auto [a, b] = g_->endpoints(e);
            if (a != v && b != v) throw InternalError("vertex " + std::to_string(v) + " marked by a non-incident edge");
            const auto other = a == v ? b : a;
            if (s[other] == x) throw InternalError("both endpoints of edge " + std::to_string(e) + " marked by it");
        }
    }
    if (!no_monochromatic_edge(*g_, s)) throw InternalError("coloring state has a monochromatic edge");
}

Strategy HybridSystem::strategy() const {
    std::vector<FlawId> order;
    order.reserve(flaw_count());
    for (std::uint32_t v = 0; v < n_; ++v) order.push_back(b_flaw(v));
    auto push_z = [&] {
        for (std::uint32_t v = 0; v < n_; ++v) order.push_back(z_flaw(v));
    };
    if (!options_.z_after_f) push_z();
    for (std::size_t k = 0; k < slots_; ++k) order.push_back(static_cast<FlawId>(2 * n_ + k));
    if (options_.z_after_f) push_z();
    return Strategy::permutation(std::move(order));
}

Phase1Result phase1_run(const Graph& g, const ColorLists& lists, const HybridParams& params, Rng& rng,
                        const Phase1Options& options) {
    HybridSystem system(g, lists, params, options.hybrid);
    Phase1Result out;
    RunOptions run;
    run.cap = options.cap;
    run.check = options.check;
    run.observer = [&](const StepEvent& e) {
        const std::uint32_t v = system.vertex(e.addressed);
        const auto kind = system.kind(e.addressed);
        (kind == HybridSystem::Kind::B ? out.b_steps : kind == HybridSystem::Kind::Z ? out.z_steps : out.f_steps)++;
        for (std::uint32_t w = 0; w < g.vertices(); ++w) {
            if (e.before[w] == e.after[w]) continue;
            if (is_marker(e.after[w])) ++out.uncolorings;
            if (!options.check) continue;
            if (kind == HybridSystem::Kind::f) {
                if (w != v) throw InternalError("coloring f-flaw at v" + std::to_string(v) + " changed another vertex");
            } else {
                if (!g.adjacent(v, w))
                    throw InternalError("RECOLOR(v" + std::to_string(v) + ") changed a vertex outside N_v");
                if (is_marker(e.after[w])) {
                    const auto [a, b] = g.endpoints(marked_edge(e.after[w]));
                    if (!g.adjacent(v, a) || !g.adjacent(v, b))
                        throw InternalError("RECOLOR(v" + std::to_string(v) + ") uncolored by an edge outside E_v");
                }
            }
        }
        if (options.check && kind == HybridSystem::Kind::f &&
            below_L(available_colors(g, lists, e.before, v).size(), params.L))
            throw InternalError("f-flaw addressed at v" + std::to_string(v) + " with fewer than L available colors");
    };
    auto r = run_from(system, system.strategy(), State(g.vertices(), blank), rng, run);
    out.outcome = r.outcome;
    out.steps = r.steps;
    out.state = std::move(r.final_state);
    return out;
}

Phase2Result phase2_complete(const Graph& g, const ColorLists& lists, const State& s, Rng& rng, std::uint64_t cap) {
    Phase2Result out;
    out.coloring = s;
    std::vector<bool> pending(g.vertices(), false);
    std::vector<std::vector<std::int32_t>> choices(g.vertices());
    for (std::uint32_t v = 0; v < g.vertices(); ++v) {
        if (is_marker(s[v])) throw PreconditionError("phase 2 input has an uncolored (marked) vertex");
        if (s[v] != blank) continue;
        auto options = available_colors(g, lists, s, v);
        options.erase(options.begin());
        if (options.empty()) {
            out.diagnostic = "vertex " + std::to_string(v) + " has no available real color";
            return out;
        }
        pending[v] = true;
        choices[v] = std::move(options);
    }
    auto draw = [&](std::uint32_t v) { out.coloring[v] = choices[v][rng.below(choices[v].size())]; };
    for (std::uint32_t v = 0; v < g.vertices(); ++v)
        if (pending[v]) draw(v);
    // Fixed colors are excluded from every choice set, so only edges between two drawn vertices can clash.
    std::size_t from = 0;
    const auto& edges = g.edge_list();
    while (true) {
        std::optional<std::size_t> bad;
        for (std::size_t k = from; k < edges.size() && !bad; ++k)
            if (pending[edges[k].first] && out.coloring[edges[k].first] == out.coloring[edges[k].second]) bad = k;
        for (std::size_t k = 0; k < from && !bad; ++k)
            if (pending[edges[k].first] && out.coloring[edges[k].first] == out.coloring[edges[k].second]) bad = k;
        if (!bad) break;
        if (out.resamples >= cap) {
            out.diagnostic = "phase 2 exceeded " + std::to_string(cap) + " resamplings";
            return out;
        }
        draw(edges[*bad].first);
        draw(edges[*bad].second);
        ++out.resamples;
        from = *bad;
    }
    out.success = verify_list_coloring(g, lists, out.coloring);
    if (!out.success) throw InternalError("phase 2 produced an improper coloring");
    return out;
}

bool verify_list_coloring(const Graph& g, const ColorLists& lists, const State& coloring) {
    if (coloring.size() != g.vertices() || lists.vertices() != g.vertices()) return false;
    for (std::uint32_t v = 0; v < g.vertices(); ++v)
        if (!std::binary_search(lists[v].begin(), lists[v].end(), coloring[v])) return false;
    for (const auto& [a, b] : g.edge_list())
        if (coloring[a] == coloring[b]) return false;
    return true;
}

std::size_t neighborhood_span(const Graph& g, std::uint32_t v) {
    std::vector<std::uint8_t> mark(g.vertices(), 0);
    for (const auto& a : g.incident(v)) mark[a.neighbor] = 1;
    std::size_t count = 0;
    for (const auto& a : g.incident(v))
        for (const auto& b : g.incident(a.neighbor)) count += b.neighbor > a.neighbor && mark[b.neighbor];
    return count;
}

NeighborhoodStats neighborhood_stats(const Graph& g) {
    NeighborhoodStats st;
    const std::size_t n = g.vertices();
    st.max_degree = g.max_degree();
    st.span.assign(n, 0);
    // Each triangle u < v < w is found once from u and credited to all three corners.
    std::vector<std::uint8_t> mark(n, 0);
    for (std::uint32_t u = 0; u < n; ++u) {
        st.degree.push_back(g.degree(u));
        for (const auto& a : g.incident(u)) mark[a.neighbor] = 1;
        for (const auto& a : g.incident(u)) {
            const std::uint32_t v = a.neighbor;
            if (v < u) continue;
            for (const auto& b : g.incident(v)) {
                const std::uint32_t w = b.neighbor;
                if (w > v && mark[w]) ++st.span[u], ++st.span[v], ++st.span[w];
            }
        }
        for (const auto& a : g.incident(u)) mark[a.neighbor] = 0;
    }
    for (auto s : st.span) st.max_span = std::max(st.max_span, s);
    const double d = static_cast<double>(st.max_degree);
    st.implied_f = st.max_span == 0 ? d * d + 1 : d * d / static_cast<double>(st.max_span);
    return st;
}

std::vector<std::uint32_t> distance2(const Graph& g, std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (const auto& a : g.incident(v)) {
        out.push_back(a.neighbor);
        for (const auto& b : g.incident(a.neighbor))
            if (b.neighbor != v) out.push_back(b.neighbor);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::uint32_t> first_triangle_excess(const Graph& g, double limit) {
    for (std::uint32_t v = 0; v < g.vertices(); ++v)
        if (static_cast<double>(neighborhood_span(g, v)) > limit) return v;
    return std::nullopt;
}

RecolorFrequency recolor_frequency(const HybridSystem& system, const State& s, std::uint32_t v, std::size_t trials,
                                   Rng& rng) {
    RecolorFrequency out;
    out.trials = trials;
    const Graph& g = system.graph();
    const ColorLists& lists = system.lists();
    const double L = system.params().L;
    const auto neighbors = neighbors_of(g, v);
    for (std::size_t k = 0; k < trials; ++k) {
        State t = s;
        draw_neighbors(g, lists, t, s, neighbors, rng);
        resolve_conflicts(g, t, neighbors);
        const Bits av = free_bits(g, lists, t, v);
        const std::size_t count = av.count() + 1;
        if (below_L(count, L)) ++out.in_b;
        std::size_t competition = 0;
        for (const auto& inc : g.incident(v))
            if (t[inc.neighbor] == blank) competition += (av & free_bits(g, lists, t, inc.neighbor)).count();
        if (above_competition(competition, count, L)) ++out.in_z;
    }
    return out;
}

} // namespace flawkit::color
