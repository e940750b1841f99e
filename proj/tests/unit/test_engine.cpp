#include "flawkit/certifier.hpp"
#include "flawkit/color.hpp"
#include "flawkit/errors.hpp"
#include "flawkit/sat.hpp"
#include "toys.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace flawkit;

namespace {

// Direct transcription of the witness definition: an introduced flaw is dropped when it
// disappears before it is next addressed.
WitnessSequence witness_oracle(const Trajectory& tr) {
    WitnessSequence w;
    for (std::size_t i = 0; i < tr.introduced.size(); ++i) {
        std::vector<FlawId> kept;
        for (FlawId z : tr.introduced[i]) {
            bool dropped = false;
            for (std::size_t j = i; j < tr.steps(); ++j) {
                if (tr.addressed[j] == z) break;
                if (!tr.present[j + 1].contains(z)) {
                    dropped = true;
                    break;
                }
            }
            if (!dropped) kept.push_back(z);
        }
        w.sets.push_back(FlawSet(kept));
    }
    return w;
}

} // namespace

TEST_CASE("flaw sets are sorted and duplicate free") {
    FlawSet s{3, 1, 3, 2};
    CHECK(s.ids() == std::vector<FlawId>{1, 2, 3});
    s.insert(0);
    s.erase(2);
    CHECK(s.ids() == std::vector<FlawId>{0, 1, 3});
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(2));
}

TEST_CASE("a flawless initial state needs no steps") {
    ExplicitSystem s(2, 1);
    s.set_flaw(0, {1}).set_action(0, 1, {{0, 1.0}}).set_initial({{0, 1.0}});
    Rng rng(1);
    const auto r = run(s, Strategy::identity(), rng, {});
    CHECK(r.outcome == Outcome::flawless);
    CHECK(r.steps == 0);
}

TEST_CASE("a deterministic single transition takes one step") {
    ExplicitSystem s(2, 1);
    s.set_flaw(0, {0}).set_action(0, 0, {{1, 1.0}}).set_initial({{0, 1.0}});
    Rng rng(2);
    RunOptions o;
    o.record = true;
    const auto r = run(s, Strategy::identity(), rng, o);
    CHECK(r.outcome == Outcome::flawless);
    CHECK(r.steps == 1);
    CHECK(r.final_state == State{1});
    REQUIRE(r.trajectory);
    CHECK(r.trajectory->states.size() == 2);
}

TEST_CASE("cap exhaustion is an outcome, not an error") {
    ExplicitSystem s(1, 1);
    s.set_flaw(0, {0}).set_action(0, 0, {{0, 1.0}}).set_initial({{0, 1.0}});
    Rng rng(3);
    RunOptions o;
    o.cap = 17;
    const auto r = run(s, Strategy::identity(), rng, o);
    CHECK(r.outcome == Outcome::cap_exceeded);
    CHECK(r.steps == 17);
}

TEST_CASE("run lengths follow the exact absorbing chain") {
    const auto s = toys::ping_pong();
    // Oracle: θÂ^t by hand-coded matrix powers on the two flawed states.
    std::vector<double> survive{1.0};
    double a = 1, b = 0;
    for (int t = 1; t <= 8; ++t) {
        const double na = 0.5 * b, nb = 0.5 * a;
        a = na, b = nb;
        survive.push_back(a + b);
    }
    const int runs = 100000;
    std::vector<int> count(10, 0);
    for (int k = 0; k < runs; ++k) {
        Rng rng = Rng::stream(99, k);
        const auto r = run(s, Strategy::identity(), rng, {});
        if (r.steps < count.size()) ++count[r.steps];
    }
    for (int t = 1; t <= 8; ++t) {
        const double p = survive[t - 1] - survive[t];
        const double freq = static_cast<double>(count[t]) / runs;
        const double sigma = std::sqrt(p * (1 - p) / runs);
        CHECK(std::abs(freq - p) <= 3 * sigma + 1e-12);
    }
}

TEST_CASE("malformed action distributions are configuration errors") {
    ExplicitSystem s(2, 1);
    s.set_flaw(0, {0}).set_action(0, 0, {{1, 0.9}}).set_initial({{0, 1.0}});
    CHECK_THROWS_AS(s.validate(), ConfigError);
    Rng rng(4);
    RunOptions o;
    o.check = true;
    CHECK_THROWS_AS(run(s, Strategy::identity(), rng, o), ConfigError);
}

TEST_CASE("strategies") {
    SUBCASE("permutations must be bijections") {
        CHECK_THROWS_AS(Strategy::permutation({0, 0, 1}).validate(3), ConfigError);
        CHECK_THROWS_AS(Strategy::permutation({0, 1}).validate(3), ConfigError);
        CHECK_NOTHROW(Strategy::permutation({2, 0, 1}).validate(3));
    }
    SUBCASE("a permutation chooses its highest-priority present flaw") {
        const auto st = Strategy::permutation({2, 0, 1});
        CHECK(st.choose(FlawSet{0, 1}) == 0);
        CHECK(st.choose(FlawSet{0, 1, 2}) == 2);
    }
    SUBCASE("per-step permutations replay from the key") {
        const auto st = Strategy::random_per_step(1234);
        const FlawSet all{0, 1, 2, 3, 4};
        for (std::uint64_t step = 0; step < 50; ++step) CHECK(st.choose(all, step) == st.choose(all, step));
        std::set<FlawId> seen;
        for (std::uint64_t step = 0; step < 200; ++step) seen.insert(st.choose(all, step));
        CHECK(seen.size() == 5);
    }
}

TEST_CASE("witness sequence of a single step") {
    // Flaw 0 never occurs; flaw 1 holds at state 0 and is fixed in one step.
    ExplicitSystem s(2, 2);
    s.set_flaw(1, {0}).set_action(1, 0, {{1, 1.0}}).set_initial({{0, 1.0}});
    Rng rng(5);
    RunOptions o;
    o.record = true;
    const auto r = run(s, Strategy::identity(), rng, o);
    const auto w = witness_sequence(*r.trajectory);
    CHECK(w.sets == std::vector<FlawSet>{FlawSet{1}, FlawSet{}});
}

TEST_CASE("collateral eradication is omitted from the witness") {
    // s0: {0,2} → s1: {1,2} → s2: {1} → s3: {}. Flaw 2 vanishes while flaw 1 is addressed.
    ExplicitSystem s(4, 3);
    s.set_flaw(0, {0}).set_flaw(1, {1, 2}).set_flaw(2, {0, 1});
    s.set_action(0, 0, {{1, 1.0}});
    s.set_action(1, 1, {{2, 1.0}});
    s.set_action(1, 2, {{3, 1.0}});
    s.set_action(2, 0, {{0, 1.0}});
    s.set_action(2, 1, {{1, 1.0}});
    s.set_initial({{0, 1.0}});
    Rng rng(6);
    RunOptions o;
    o.record = true;
    const auto r = run(s, Strategy::identity(), rng, o);
    REQUIRE(r.steps == 3);
    CHECK(r.trajectory->addressed == std::vector<FlawId>{0, 1, 1});
    const auto w = witness_sequence(*r.trajectory);
    CHECK(w.sets == std::vector<FlawSet>{FlawSet{0}, FlawSet{1}, FlawSet{1}, FlawSet{}});
    const auto rec = reconstruct(w, Strategy::identity());
    CHECK(rec.plausible);
    CHECK(rec.addressed == r.trajectory->addressed);
    CHECK(rec.terminal.empty());
}

TEST_CASE("reconstruct on hand sequences") {
    WitnessSequence ok{{FlawSet{1}, FlawSet{}}};
    const auto r = reconstruct(ok, Strategy::identity());
    CHECK(r.plausible);
    CHECK(r.addressed == std::vector<FlawId>{1});
    CHECK(r.terminal.empty());
    CHECK(multiset_balanced(ok, r));

    WitnessSequence bad{{FlawSet{}, FlawSet{1}}};
    CHECK_FALSE(reconstruct(bad, Strategy::identity()).plausible);
}

TEST_CASE("reconstruction identity on random recorded runs") {
    int checked = 0;
    for (std::uint64_t k = 0; k < 600; ++k) {
        Rng gen = Rng::stream(7, k);
        const auto csp = toys::random_small_cnf(2 + gen.below(5), 1 + gen.below(6), gen);
        const auto p = sat::ProductMeasure::uniform(csp);
        const sat::BacktrackSystem sys(csp, p);
        const std::vector<Strategy> strategies = {Strategy::identity(), Strategy::random_per_step(gen()),
                                                  Strategy::stack()};
        const auto& st = strategies[k % 3];
        Rng rng = gen.child(1);
        RunOptions o;
        o.record = true;
        o.cap = 200;
        const auto r = run(sys, st, rng, o);
        const auto& tr = *r.trajectory;
        const auto w = witness_sequence(tr);
        CHECK(w == witness_oracle(tr));
        const auto rec = reconstruct(w, st);
        CHECK(rec.plausible);
        CHECK(rec.addressed == tr.addressed);
        CHECK(multiset_balanced(w, rec));
        if (st.kind() == Strategy::Kind::fixed_permutation)
            for (std::size_t i = 0; i < tr.steps(); ++i) CHECK(tr.addressed[i] == tr.present[i].front());
        ++checked;
    }
    CHECK(checked == 600);
}

TEST_CASE("trajectory bookkeeping") {
    const auto s = toys::ping_pong();
    Rng rng(8);
    RunOptions o;
    o.record = true;
    const auto r = run(s, Strategy::identity(), rng, o);
    const auto& tr = *r.trajectory;
    REQUIRE(tr.states.size() == tr.steps() + 1);
    CHECK(tr.introduced.front() == tr.present.front());
    for (std::size_t i = 0; i < tr.steps(); ++i) {
        CHECK(tr.present[i].contains(tr.addressed[i]));
        std::vector<FlawId> expect;
        for (FlawId z : tr.present[i + 1])
            if (z == tr.addressed[i] || !tr.present[i].contains(z)) expect.push_back(z);
        CHECK(tr.introduced[i + 1] == FlawSet(expect));
    }
}

TEST_CASE("identical seeds reproduce runs bit for bit") {
    Rng gen(9);
    const auto csp = toys::random_small_cnf(6, 8, gen);
    const auto p = sat::ProductMeasure::uniform(csp);
    const sat::BacktrackSystem sys(csp, p);
    RunOptions o;
    o.record = true;
    Rng a = Rng::stream(10, 3), b = Rng::stream(10, 3);
    const auto ra = run(sys, Strategy::identity(), a, o);
    const auto rb = run(sys, Strategy::identity(), b, o);
    CHECK(ra.trajectory->states == rb.trajectory->states);
    CHECK(ra.trajectory->addressed == rb.trajectory->addressed);
}

TEST_CASE("verify_primary") {
    SUBCASE("single flaw") {
        ExplicitSystem s(2, 1);
        s.set_flaw(0, {0}).set_action(0, 0, {{1, 1.0}}).set_initial({{0, 1.0}});
        CHECK(verify_primary(enumerate_states(s), 0));
    }
    SUBCASE("unassigned-variable flaws of backtracking") {
        const auto csp = sat::CspInstance::cnf(3, {{1, 2}, {-2, 3}});
        const auto p = sat::ProductMeasure::uniform(csp);
        const sat::BacktrackSystem sys(csp, p);
        const auto index = enumerate_states(sys);
        for (FlawId i = 0; i < 3; ++i) CHECK(verify_primary(index, i));
    }
    SUBCASE("a flaw removable by another is not primary") {
        // State 0 has flaws 0 and 1; addressing 1 reaches state 1, which lacks flaw 0. Addressing 0 keeps flaw 1.
        ExplicitSystem s(3, 2);
        s.set_flaw(0, {0}).set_flaw(1, {0, 1});
        s.set_action(0, 0, {{1, 1.0}}).set_action(1, 0, {{1, 1.0}}).set_action(1, 1, {{2, 1.0}});
        s.set_initial({{0, 1.0}});
        const auto index = enumerate_states(s);
        CHECK_FALSE(verify_primary(index, 0));
        CHECK(verify_primary(index, 1));
    }
}

TEST_CASE("recorded runs respect declared primary flaws") {
    ExplicitSystem s(3, 2);
    s.set_flaw(0, {0}, true).set_flaw(1, {0, 1});
    s.set_action(0, 0, {{1, 1.0}}).set_action(1, 0, {{1, 1.0}}).set_action(1, 1, {{2, 1.0}});
    s.set_initial({{0, 1.0}});
    Rng rng(11);
    RunOptions o;
    o.record = true;
    CHECK_THROWS_AS(run(s, Strategy::permutation({1, 0}), rng, o), InternalError);
}

TEST_CASE("explicit systems from JSON") {
    const auto s = ExplicitSystem::from_json(
        R"({"states": 2, "flaws": [{"primary": true, "members": [0], "actions": {"0": [[1, 1.0]]}}], "initial": [[0, 1.0]]})");
    CHECK(s.flaw_count() == 1);
    CHECK(s.primary(0));
    CHECK_THROWS_AS(ExplicitSystem::from_json(R"({"states": 2, "flaws": [], "initial": [[0, 1]], "extra": 1})"),
                    ConfigError);
}
