#include "flawkit/aec.hpp"
#include "flawkit/certifier.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

using namespace flawkit;
using aec::uncolored;

namespace {

Graph cycle4() { return Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }

Graph complete(std::size_t n) {
    std::vector<Graph::Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) edges.push_back({u, v});
    return Graph::from_edges(n, edges);
}

// Simple cycles through e by extending paths from one endpoint until they close at the other;
// each cycle is found once per direction, so the edge sets are deduplicated.
std::size_t dfs_cycle_count(const Graph& g, std::uint32_t e, std::size_t length) {
    const auto [a, b] = g.endpoints(e);
    std::set<std::set<std::uint32_t>> found;
    std::vector<bool> used(g.vertices(), false);
    std::vector<std::uint32_t> path_edges{e};
    std::function<void(std::uint32_t)> extend = [&](std::uint32_t v) {
        if (path_edges.size() == length) return;
        for (const auto& inc : g.incident(v)) {
            if (inc.edge == e) continue;
            if (inc.neighbor == a && path_edges.size() + 1 == length) {
                std::set<std::uint32_t> s(path_edges.begin(), path_edges.end());
                s.insert(inc.edge);
                found.insert(s);
                continue;
            }
            if (used[inc.neighbor] || inc.neighbor == a) continue;
            used[inc.neighbor] = true;
            path_edges.push_back(inc.edge);
            extend(inc.neighbor);
            path_edges.pop_back();
            used[inc.neighbor] = false;
        }
    };
    used[b] = true;
    extend(b);
    return found.size();
}

} // namespace

TEST_CASE("forbidden4") {
    SUBCASE("nothing colored") {
        const auto g = cycle4();
        CHECK(aec::forbidden4(g, State(4, uncolored), 0).empty());
    }
    SUBCASE("star") {
        const auto g = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
        CHECK(aec::forbidden4(g, {uncolored, 1, 2}, 0) == std::vector<std::int32_t>{1, 2});
        CHECK(aec::available4(g, {uncolored, 1, 2}, 0, 4) == std::vector<std::int32_t>{0, 3});
    }
    SUBCASE("a color that would close a bichromatic 4-cycle") {
        const auto g = cycle4();
        CHECK(aec::forbidden4(g, {uncolored, 1, 2, 1}, 0) == std::vector<std::int32_t>{1, 2});
        CHECK(aec::forbidden4(g, {uncolored, 0, 1, 2}, 0) == std::vector<std::int32_t>{0, 2});
    }
    SUBCASE("colored edge") { CHECK_THROWS_AS(aec::forbidden4(cycle4(), {0, 1, 0, 1}, 0), PreconditionError); }
}

TEST_CASE("verify_acyclic_proper") {
    const auto path = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(aec::verify_acyclic_proper(path, {0, 1, 0}));
    CHECK_FALSE(aec::verify_acyclic_proper(path, {0, 0, 1}));
    CHECK_FALSE(aec::verify_acyclic_proper(path, {0, uncolored, 1}));
    CHECK(aec::verify_acyclic_proper(path, {0, uncolored, 1}, false));
    const auto c4 = cycle4();
    CHECK_FALSE(aec::verify_acyclic_proper(c4, {1, 2, 1, 2}));
    CHECK(aec::verify_acyclic_proper(c4, {1, 2, 1, 3}));
}

TEST_CASE("cycle enumeration") {
    SUBCASE("tree") {
        const auto g = Graph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
        for (std::uint32_t e = 0; e < g.edges(); ++e) CHECK(aec::cycles_through(g, e, 10).empty());
    }
    SUBCASE("C4") {
        const auto g = cycle4();
        for (std::uint32_t e = 0; e < 4; ++e) {
            const auto cs = aec::cycles_through(g, e, 4);
            REQUIRE(cs.size() == 1);
            CHECK(cs[0].size() == 4);
            CHECK(cs[0].front() == e);
        }
    }
    SUBCASE("K4 and K5 against a DFS oracle") {
        for (std::size_t n : {4u, 5u}) {
            const auto g = complete(n);
            for (std::uint32_t e = 0; e < g.edges(); ++e) {
                const auto even = aec::cycles_through(g, e, n);
                std::size_t four = 0;
                for (const auto& c : even) {
                    CHECK(c.size() % 2 == 0);
                    four += c.size() == 4 ? 1 : 0;
                }
                CHECK(four == dfs_cycle_count(g, e, 4));
                const auto all = aec::cycles_through(g, e, n, false);
                CHECK(all.size() == [&] {
                    std::size_t total = 0;
                    for (std::size_t len = 3; len <= n; ++len) total += dfs_cycle_count(g, e, len);
                    return total;
                }());
            }
        }
        CHECK(dfs_cycle_count(complete(4), 0, 4) == 2);
    }
    SUBCASE("limit") { CHECK_THROWS_AS(aec::cycles_through(complete(8), 0, 8, true, 10), CapacityError); }
    SUBCASE("bichromatic cycles") {
        const auto g = cycle4();
        CHECK(aec::bichromatic_cycles_through(g, {1, 2, 1, 2}, 0).size() == 1);
        CHECK(aec::bichromatic_cycles_through(g, {1, 2, 1, 3}, 0).empty());
    }
}

TEST_CASE("kept edges of a broken cycle") {
    // Minimum other edge 1 sits between 7 and 9; the lower neighbor is kept.
    CHECK(aec::kept_edges({5, 2, 7, 1, 9, 4}, 5) == std::pair<std::uint32_t, std::uint32_t>{1, 7});
    CHECK(aec::uncolored_part({5, 2, 7, 1, 9, 4}, 5) == FlawSet{2, 4, 5, 9});
    // Next to e, the other neighbor is the only choice.
    CHECK(aec::kept_edges({5, 1, 7, 8, 9, 4}, 5) == std::pair<std::uint32_t, std::uint32_t>{1, 7});
}

TEST_CASE("backtracking step breaks cycles") {
    // A 6-cycle colored alternately except edge 0.
    const auto g = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
    const aec::AecSystem sys(g, 4);
    const State s{uncolored, 1, 0, 1, 0, 1};
    const State t = sys.color(s, 0, 0);
    // Kept: edge 1 and its lower neighbor 2.
    CHECK(t == State{uncolored, 1, 0, uncolored, uncolored, uncolored});
    CHECK(aec::verify_acyclic_proper(g, t, false));
    CHECK(sys.color(s, 0, 2) == State{2, 1, 0, 1, 0, 1});
}

TEST_CASE("parameters and the convergence condition") {
    CHECK(aec::q_from_c(5, 3) == 20);
    CHECK(aec::c_from_q(5, 20) == doctest::Approx(3));
    CHECK_THROWS_AS(aec::q_from_c(1, 3), DomainError);
    const std::vector<std::pair<double, double>> frozen = {
        {2.5, 1.5450849718747}, {3, 1.8541019662497}, {4, 2.4721359549996}};
    for (const auto& [c, alpha] : frozen) {
        const auto r = aec::aec_condition(c);
        CHECK(r.closed_form_alpha == doctest::Approx(alpha).epsilon(1e-12));
        CHECK(r.closed_form_value == doctest::Approx(2 / c).epsilon(1e-12));
        CHECK(std::abs(r.value - 2 / c) <= 1e-6);
        CHECK(std::abs(r.alpha - alpha) <= 1e-3);
        CHECK(r.feasible == (2 / c < 1));
        CHECK(aec::aec_bound(c, alpha) == doctest::Approx(2 / c).epsilon(1e-12));
    }
    CHECK(aec::aec_condition(1000).value == doctest::Approx(0.002).epsilon(1e-6));
    CHECK_FALSE(aec::aec_condition(1.5).feasible);
    CHECK_THROWS_AS(aec::aec_condition(1.0), DomainError);
    CHECK_THROWS_AS(aec::aec_condition(0.5), DomainError);
}

TEST_CASE("series profile matches the closed-form bound") {
    for (double c : {2.5, 3.0, 4.0})
        for (double alpha : {1.2, 1.5, 2.0}) {
            if (alpha >= c) continue;
            CHECK(aec::aec_profile_zeta(c, alpha) == doctest::Approx(aec::aec_bound(c, alpha)).epsilon(1e-12));
            CHECK(aec::aec_profile_zeta(c, alpha, 400) == doctest::Approx(aec::aec_bound(c, alpha)).epsilon(1e-9));
        }
}

TEST_CASE("H-free profile") {
    const auto c = aec::hfree_smallest_c(1, 0.5, 1e6);
    REQUIRE(c.has_value());
    CHECK(*c >= 1);
    CHECK(*c < 2);
    CHECK(aec::aec_condition_hfree(*c, 1, 0.5, 1e6).value < 1);
    CHECK(aec::aec_condition_hfree(*c - 1e-4, 1, 0.5, 1e6).value >= 1);
    // More forbidden structure means a larger constant.
    CHECK(*aec::hfree_smallest_c(1, 0.1, 1e6) > *c);
}

TEST_CASE("exact charge tables") {
    SUBCASE("tree") {
        const auto g = Graph::from_edges(4, {{0, 1}, {1, 2}, {1, 3}});
        const auto t = aec::aec_charges(g, 7);
        CHECK(t.size() == 3);
        for (const auto& [key, gamma] : t.entries()) {
            CHECK(key.second.empty());
            CHECK(gamma == doctest::Approx(1.0 / 7));
        }
    }
    SUBCASE("C4 with 4-cycles included") {
        const auto t = aec::aec_charges(cycle4(), 3, 4);
        CHECK(t.get(0, FlawSet{0, 3}) == doctest::Approx(1.0 / 3));
        CHECK(t.get(1, FlawSet{1, 2}) == doctest::Approx(1.0 / 3));
        CHECK(t.get(2, FlawSet{2, 3}) == doctest::Approx(1.0 / 3));
        CHECK(t.get(3, FlawSet{2, 3}) == doctest::Approx(1.0 / 3));
        CHECK(t.size() == 8);
    }
    SUBCASE("C4 with q = 5 against the enumerated process") {
        const auto g = cycle4();
        const aec::AecSystem sys(g, 5);
        const auto index = enumerate_states(sys);
        const auto brute = charge_table(index, Measure::uniform(index));
        // At most 2(Δ−1) = 2 colors are forbidden, so Q = 3 available colors.
        const auto exact = aec::aec_charges(g, 3);
        CHECK(brute.size() == exact.size());
        for (const auto& [key, gamma] : exact.entries())
            CHECK(std::abs(brute.get(key.first, key.second) - gamma) <= 1e-12);
        for (FlawId e = 0; e < 4; ++e) CHECK(verify_primary(index, e));
    }
}

TEST_CASE("aec_run") {
    SUBCASE("triangle with five colors") {
        const auto g = complete(3);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng = Rng::stream(41, seed);
            const auto r = aec::aec_run(g, 5, rng, 1000, true);
            REQUIRE(r.outcome == Outcome::flawless);
            CHECK(r.steps == 3);
            CHECK(aec::verify_acyclic_proper(g, r.coloring));
        }
    }
    SUBCASE("single edge with one color") {
        Rng rng(1);
        const auto r = aec::aec_run(Graph::from_edges(2, {{0, 1}}), 1, rng, 10);
        CHECK(r.outcome == Outcome::flawless);
        CHECK(r.steps == 1);
    }
    SUBCASE("too few colors is a dead end") {
        Rng rng(2);
        const auto r = aec::aec_run(Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), 2, rng, 100);
        CHECK(r.dead_end);
        CHECK_FALSE(r.diagnostic.empty());
    }
    SUBCASE("random bounded-degree graphs") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng gen = Rng::stream(42, seed);
            const auto g = random_bounded_degree(40, 5, 80, gen);
            const auto q = aec::q_from_c(g.max_degree(), 2.5);
            Rng rng = Rng::stream(43, seed);
            const auto r = aec::aec_run(g, q, rng, 100000, true);
            REQUIRE(r.outcome == Outcome::flawless);
            CHECK(aec::verify_acyclic_proper(g, r.coloring));
            CHECK(r.max_forbidden <= 2 * (g.max_degree() - 1));
            CHECK(r.steps >= g.edges());
        }
    }
}

TEST_CASE("step bound") {
    const auto b = aec::aec_step_bound(Graph::from_edges(2, {{0, 1}}), 3, 5);
    CHECK(b.delta == 1);
    CHECK(b.feasible);
    const auto g = complete(4);
    const auto r = aec::aec_step_bound(g, aec::q_from_c(3, 3), 5);
    CHECK(r.feasible);
    CHECK(r.delta == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK(r.t0 == doctest::Approx(6 * std::log2(aec::q_from_c(3, 3) + 1.0)));
    CHECK(r.steps == doctest::Approx((r.t0 + 5) / r.delta));
}
