#include "flawkit/errors.hpp"
#include "flawkit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace flawkit {

Graph Graph::from_edges(std::size_t vertices, const std::vector<Edge>& edges) {
    Graph g(vertices);
    for (const auto& [u, v] : edges) g.add_edge(u, v);
    return g;
}

std::uint32_t Graph::add_edge(std::uint32_t u, std::uint32_t v) {
    if (u >= vertices() || v >= vertices())
        throw ConfigError("edge {" + std::to_string(u) + "," + std::to_string(v) + "} references a missing vertex");
    if (u == v) throw ConfigError("self-loop at vertex " + std::to_string(u));
    if (edge_between(u, v)) throw ConfigError("duplicate edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
    const auto id = static_cast<std::uint32_t>(edges_.size());
    edges_.emplace_back(std::min(u, v), std::max(u, v));
    auto insert = [&](std::uint32_t a, std::uint32_t b) {
        auto& adj = adjacency_[a];
        auto it = std::lower_bound(adj.begin(), adj.end(), b,
                                   [](const Incidence& x, std::uint32_t y) { return x.neighbor < y; });
        adj.insert(it, Incidence{b, id});
    };
    insert(u, v);
    insert(v, u);
    return id;
}

std::size_t Graph::max_degree() const {
    std::size_t d = 0;
    for (const auto& adj : adjacency_) d = std::max(d, adj.size());
    return d;
}

std::optional<std::uint32_t> Graph::edge_between(std::uint32_t u, std::uint32_t v) const {
    const auto& adj = adjacency_[u];
    auto it = std::lower_bound(adj.begin(), adj.end(), v,
                               [](const Incidence& x, std::uint32_t y) { return x.neighbor < y; });
    if (it == adj.end() || it->neighbor != v) return std::nullopt;
    return it->edge;
}

Graph Graph::induced(const std::vector<std::uint32_t>& keep) const {
    std::vector<std::int64_t> position(vertices(), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) position[keep[k]] = static_cast<std::int64_t>(k);
    Graph h(keep.size());
    for (const auto& [u, v] : edges_)
        if (position[u] >= 0 && position[v] >= 0)
            h.add_edge(static_cast<std::uint32_t>(position[u]), static_cast<std::uint32_t>(position[v]));
    return h;
}

Graph gnp(std::size_t n, double p, Rng& rng) {
    if (p < 0 || p > 1) throw DomainError("edge probability outside [0, 1]");
    std::vector<Graph::Edge> edges;
    if (p > 0 && n > 1) {
        // Batagelj–Brandes: jump over the pairs (v, w), w < v, in row order.
        const double log_q = std::log1p(-p);
        std::int64_t v = 1, w = -1;
        while (v < static_cast<std::int64_t>(n)) {
            const double r = 1 - rng.uniform();
            w += 1 + (p == 1 ? 0 : static_cast<std::int64_t>(std::floor(std::log(r) / log_q)));
            while (w >= v && v < static_cast<std::int64_t>(n)) {
                w -= v;
                ++v;
            }
            if (v < static_cast<std::int64_t>(n))
                edges.emplace_back(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(v));
        }
    }
    Graph g(n);
    for (const auto& [u, v] : edges) g.add_edge(u, v);
    return g;
}

Graph random_bounded_degree(std::size_t n, std::size_t max_degree, std::size_t edges, Rng& rng) {
    Graph g(n);
    if (n < 2) return g;
    const std::size_t attempts = 50 * edges + 1000;
    for (std::size_t a = 0; a < attempts && g.edges() < edges; ++a) {
        const auto u = static_cast<std::uint32_t>(rng.below(n));
        const auto v = static_cast<std::uint32_t>(rng.below(n));
        if (u == v || g.degree(u) >= max_degree || g.degree(v) >= max_degree || g.adjacent(u, v)) continue;
        g.add_edge(u, v);
    }
    return g;
}

Graph remove_triangles(const Graph& g) {
    Graph h(g.vertices());
    for (const auto& [u, v] : g.edge_list()) {
        // Keep the edge only if u and v have no common neighbor among the kept edges.
        const auto& a = h.incident(u);
        const auto& b = h.incident(v);
        bool closes = false;
        for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
            if (a[i].neighbor == b[j].neighbor) {
                closes = true;
                break;
            }
            a[i].neighbor < b[j].neighbor ? ++i : ++j;
        }
        if (!closes) h.add_edge(u, v);
    }
    return h;
}

} // namespace flawkit
