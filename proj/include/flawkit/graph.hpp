#pragma once

#include "flawkit/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace flawkit {

/// A simple undirected graph with dense edge ids in insertion order.
class Graph {
public:
    struct Incidence {
        std::uint32_t neighbor;
        std::uint32_t edge;
    };
    using Edge = std::pair<std::uint32_t, std::uint32_t>;

    explicit Graph(std::size_t vertices = 0) : adjacency_(vertices) {}

    /// Throws ConfigError on loops, duplicates or out-of-range endpoints.
    static Graph from_edges(std::size_t vertices, const std::vector<Edge>& edges);

    std::uint32_t add_edge(std::uint32_t u, std::uint32_t v);

    std::size_t vertices() const { return adjacency_.size(); }
    std::size_t edges() const { return edges_.size(); }
    /// Endpoints with first < second.
    const Edge& endpoints(std::size_t e) const { return edges_[e]; }
    const std::vector<Edge>& edge_list() const { return edges_; }

    /// Incident edges sorted by neighbor.
    const std::vector<Incidence>& incident(std::size_t v) const { return adjacency_[v]; }
    std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
    std::size_t max_degree() const;

    std::optional<std::uint32_t> edge_between(std::uint32_t u, std::uint32_t v) const;
    bool adjacent(std::uint32_t u, std::uint32_t v) const { return edge_between(u, v).has_value(); }

    /// Subgraph induced by `keep` (vertex k of the result is keep[k]).
    Graph induced(const std::vector<std::uint32_t>& keep) const;

private:
    std::vector<std::vector<Incidence>> adjacency_;
    std::vector<Edge> edges_;
};

/// G(n, d/n) by geometric skipping over the n(n−1)/2 vertex pairs.
Graph gnp(std::size_t n, double p, Rng& rng);

/// Random graph with at most `edges` edges and maximum degree ≤ `max_degree`, built by
/// inserting uniformly random pairs with spare degree.
Graph random_bounded_degree(std::size_t n, std::size_t max_degree, std::size_t edges, Rng& rng);

/// Drops, in edge-id order, every edge that currently closes a triangle until none remain.
Graph remove_triangles(const Graph& g);

} // namespace flawkit
