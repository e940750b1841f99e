#include "flawkit/experiment.hpp"
#include "flawkit/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace flawkit;
using cli::Json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "flawkit-unit";
    fs::create_directories(dir);
    return dir;
}

std::string scratch_file(const std::string& name, const std::string& content) {
    const auto path = (scratch_dir() / name).string();
    io::write_file(path, content);
    return path;
}

std::size_t parse_error_line(const std::string& text, bool graph = false) {
    try {
        if (graph) io::parse_graph_text(text);
        else io::parse_cnf_text(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

Json without_wall_time(const cli::RunReport& r) {
    auto j = cli::to_json(r);
    j["wall_time_ms"] = 0.0;
    return j;
}

} // namespace

TEST_CASE("parse_cnf") {
    SUBCASE("unit clause") {
        const auto csp = io::parse_cnf_text("p cnf 1 1\n1 0\n");
        CHECK(csp.variables() == 1);
        REQUIRE(csp.clauses().size() == 1);
        CHECK(csp.clauses()[0] == std::vector<int>{1});
    }
    SUBCASE("comments, clauses across lines and the end marker") {
        const auto csp = io::parse_cnf_text("c hello\np cnf 3 2\n1 -2\n3 0 -1 0\n%\n0\n");
        CHECK(csp.clauses().size() == 2);
        CHECK(csp.clauses()[0] == std::vector<int>{1, -2, 3});
        CHECK(csp.clauses()[1] == std::vector<int>{-1});
    }
    SUBCASE("errors carry the line") {
        CHECK(parse_error_line("p cnf 2 2\n1 0\n") != 0);
        CHECK(parse_error_line("p cnf 2 1\n1 0\n2 0\n") == 3);
        CHECK(parse_error_line("p cnf 2 1\n3 0\n") == 2);
        CHECK(parse_error_line("p cnf x 1\n1 0\n") == 1);
        CHECK(parse_error_line("c\n1 0\n") == 2);
        CHECK(parse_error_line("p cnf 2 2\n1 0\n0\n") == 3);
        CHECK(parse_error_line("p cnf 2 1\n1 2\n") != 0);
        CHECK(parse_error_line("p cnf 2 1\np cnf 2 1\n1 0\n") == 2);
        CHECK(parse_error_line("p cnf 2 1\n1 b 0\n") == 2);
    }
    SUBCASE("100-clause round trip") {
        Rng rng(11);
        std::vector<std::vector<int>> clauses;
        for (int c = 0; c < 100; ++c) {
            std::vector<int> cl;
            const auto w = 1 + rng.below(5);
            for (std::uint64_t k = 0; k < w; ++k) {
                const int v = 1 + static_cast<int>(rng.below(30));
                cl.push_back(rng.bernoulli(0.5) ? v : -v);
            }
            clauses.push_back(cl);
        }
        const auto csp = sat::CspInstance::cnf(30, clauses);
        const auto text = io::emit_cnf(csp);
        const auto back = io::parse_cnf_text(text);
        CHECK(back.variables() == 30);
        CHECK(back.clauses() == csp.clauses());
        CHECK(io::emit_cnf(back) == text);
    }
}

TEST_CASE("emit_assignment") {
    CHECK(io::emit_assignment({1, 0, 1}) == "v 1 -2 3 0\n");
    State many(12, 1);
    const auto text = io::emit_assignment(many);
    CHECK(text.find("v 1 2 3 4 5 6 7 8 9 10\n") == 0);
    CHECK(text.find("v 11 12 0\n") != std::string::npos);
}

TEST_CASE("parse_graph") {
    SUBCASE("single plain edge") {
        const auto g = io::parse_graph_text("0 1\n");
        CHECK(g.vertices() == 2);
        CHECK(g.edges() == 1);
    }
    SUBCASE("DIMACS header with 1-based edges") {
        const auto g = io::parse_graph_text("c x\np edge 4 2\ne 1 2\ne 2 4\n");
        CHECK(g.vertices() == 4);
        CHECK(g.endpoints(0) == Graph::Edge{0, 1});
        CHECK(g.endpoints(1) == Graph::Edge{1, 3});
    }
    SUBCASE("errors") {
        CHECK(parse_error_line("0 1\n1 0\n", true) == 2);
        CHECK(parse_error_line("0 1\n# c\n2 2\n", true) == 3);
        CHECK(parse_error_line("p edge 2 1\ne 1 3\n", true) == 2);
        CHECK(parse_error_line("p edge 3 2\ne 1 2\n", true) != 0);
        CHECK(parse_error_line("e 1 2\n", true) == 1);
        CHECK(parse_error_line("0 x\n", true) == 1);
    }
    SUBCASE("G(n, p) round trip") {
        Rng rng(12);
        const auto g = gnp(80, 0.1, rng);
        const auto text = io::emit_graph(g);
        const auto back = io::parse_graph_text(text);
        CHECK(back.vertices() == g.vertices());
        CHECK(back.edge_list() == g.edge_list());
        CHECK(io::emit_graph(back) == text);
    }
    SUBCASE("files") {
        const auto path = scratch_file("path.graph", "0 1\n1 2\n");
        CHECK(io::parse_graph_file(path).edges() == 2);
        CHECK_THROWS_AS(io::parse_graph_file((scratch_dir() / "missing.graph").string()), IoError);
    }
}

TEST_CASE("color lists and measures") {
    const auto a = io::parse_lists("[[0, 2], [1], [2, 0]]", 3);
    CHECK(a[2] == std::vector<std::int32_t>{0, 2});
    const auto o = io::parse_lists(R"({"0": [1], "1": [0, 1]})", 2);
    CHECK(o[1] == std::vector<std::int32_t>{0, 1});
    CHECK_THROWS_AS(io::parse_lists("[[0]]", 2), ConfigError);
    CHECK_THROWS_AS(io::parse_lists("[[0], [-1]]", 2), ConfigError);
    CHECK_THROWS_AS(io::parse_lists("[[0],", 1), ParseError);

    const auto csp = sat::CspInstance::cnf(2, {{1, 2}});
    const auto m = io::parse_measure(R"({"1": [0.3, 0.7]})", csp);
    CHECK(m.p(0, 0) == doctest::Approx(0.3));
    CHECK(m.p(1, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(io::parse_measure(R"({"1": [0.3, 0.3]})", csp), ConfigError);
    CHECK_THROWS_AS(io::parse_measure(R"({"3": [0.5, 0.5]})", csp), ConfigError);
}

TEST_CASE("solution emitters") {
    CHECK(io::emit_edge_coloring({2, 0}) == "0 2\n1 0\n");
    CHECK(Json::parse(io::emit_vertex_coloring({1, 0, 2})) == Json::array({1, 0, 2}));
}

TEST_CASE("aggregate uses nearest-rank quantiles") {
    std::vector<cli::TrialRecord> runs;
    for (std::uint64_t i = 0; i < 10; ++i) runs.push_back({i, i % 3 ? "flawless" : "cap_exceeded", 10 - i, {}, ""});
    const auto a = cli::aggregate(runs);
    CHECK(a.trials == 10);
    CHECK(a.successes == 6);
    CHECK(a.success_rate == doctest::Approx(0.6));
    CHECK(a.steps_min == 1);
    CHECK(a.steps_median == 5);
    CHECK(a.steps_p90 == 9);
    CHECK(a.steps_max == 10);
    CHECK(a.steps_mean == doctest::Approx(5.5));
    CHECK(cli::aggregate({}).trials == 0);
}

TEST_CASE("reports") {
    SUBCASE("an empty report validates and keeps its version") {
        const cli::RunReport r;
        const auto j = cli::to_json(r);
        std::string why;
        CHECK(cli::validate_report(j, &why));
        CHECK(why.empty());
        CHECK(j["format_version"] == cli::format_version);
        CHECK(j["tool_version"] == cli::tool_version);
        CHECK(j.begin().key() == "tool");
    }
    SUBCASE("validation failures") {
        auto j = cli::to_json(cli::RunReport{});
        j.erase("seed");
        CHECK_FALSE(cli::validate_report(j));
        j = cli::to_json(cli::RunReport{});
        j["extra"] = 1;
        CHECK_FALSE(cli::validate_report(j));
        j = cli::to_json(cli::RunReport{});
        j["outcome"] = "great";
        CHECK_FALSE(cli::validate_report(j));
        j = cli::to_json(cli::RunReport{});
        j["format_version"] = 2;
        CHECK_FALSE(cli::validate_report(j));
        CHECK_THROWS_AS(cli::report_from_json(j), ConfigError);
    }
    SUBCASE("round trip through a file") {
        cli::ExperimentConfig c;
        c.subcommand = cli::Subcommand::sat;
        c.params = {{"n", 20}, {"k", 3}, {"delta", 1}};
        c.trials = 3;
        const auto r = cli::run_experiment(c);
        const auto path = (scratch_dir() / "report.json").string();
        cli::emit_report(r, path);
        const auto back = cli::report_from_json(io::parse_json(io::read_file(path)));
        CHECK(cli::serialize(back) == cli::serialize(r));
        CHECK(back.runs.size() == 3);
    }
}

TEST_CASE("experiment configs") {
    const auto c = cli::ExperimentConfig::from_json(
        Json{{"subcommand", "aec"}, {"seed", 7}, {"cap", 100}, {"params", {{"n", 10}, {"delta", 3}, {"q", 9}}}});
    CHECK(c.subcommand == cli::Subcommand::aec);
    CHECK(c.seed == 7);
    CHECK(cli::ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS_AS(cli::ExperimentConfig::from_json(Json{{"subcommand", "sat"}, {"colour", 1}}), ConfigError);
    CHECK_THROWS_AS(cli::ExperimentConfig::from_json(Json{{"subcommand", "sat"}, {"params", {{"q", 3}}}}),
                    ConfigError);
    CHECK_THROWS_AS(cli::ExperimentConfig::from_json(Json{{"subcommand", "sat"}, {"seed", "x"}}), ConfigError);
    CHECK_THROWS_AS(cli::ExperimentConfig::from_json(Json{{"subcommand", "nope"}}), ConfigError);
    CHECK_THROWS_AS(cli::ExperimentConfig::from_json(Json{{"subcommand", "aec"}, {"inputs", {{"cnf", "x"}}}}),
                    ConfigError);
    CHECK(cli::subcommand_from("gen-graph") == cli::Subcommand::gen_graph);
    CHECK(cli::to_string(cli::Subcommand::gen_graph) == "gen-graph");
}

TEST_CASE("run_experiment") {
    SUBCASE("satisfiable CNF succeeds") {
        cli::ExperimentConfig c;
        c.inputs["cnf"] = scratch_file("easy.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
        const auto r = cli::run_experiment(c);
        CHECK(r.outcome == "success");
        CHECK(r.exit_code == cli::exit_success);
        CHECK(r.seed == 0);
        CHECK(r.cap == c.cap);
        CHECK(cli::validate_report(cli::to_json(r)));
    }
    SUBCASE("one color on a two-edge path is a dead end") {
        cli::ExperimentConfig c;
        c.subcommand = cli::Subcommand::aec;
        c.inputs["graph"] = scratch_file("p3.graph", "0 1\n1 2\n");
        c.params = {{"q", 1}};
        const auto r = cli::run_experiment(c);
        CHECK(r.outcome == "dead_end");
        CHECK(r.exit_code != cli::exit_success);
        CHECK_FALSE(r.runs[0].diagnostic.empty());
    }
    SUBCASE("a cap below the run length") {
        cli::ExperimentConfig c;
        c.params = {{"n", 30}, {"k", 3}, {"delta", 1}};
        c.cap = 5;
        const auto r = cli::run_experiment(c);
        CHECK(r.outcome == "cap_exceeded");
        CHECK(r.exit_code == cli::exit_cap);
    }
    SUBCASE("identical configs give identical reports apart from wall time") {
        for (const auto& j : {Json{{"subcommand", "sat"}, {"seed", 5}, {"trials", 4}, {"params", {{"n", 30}, {"k", 3}, {"delta", 2}}}},
                              Json{{"subcommand", "aec"}, {"seed", 6}, {"trials", 3}, {"params", {{"n", 30}, {"delta", 4}, {"c", 3}}}},
                              Json{{"subcommand", "gen-graph"}, {"seed", 7}, {"trials", 2}, {"params", {{"n", 200}, {"d", 8}}}},
                              Json{{"subcommand", "color"}, {"seed", 8}, {"params", {{"n", 60}, {"delta", 6}, {"q", 12}}}}}) {
            const auto c = cli::ExperimentConfig::from_json(j);
            CHECK(without_wall_time(cli::run_experiment(c)) == without_wall_time(cli::run_experiment(c)));
        }
    }
    SUBCASE("a different seed changes the generated instance's runs") {
        auto c = cli::ExperimentConfig::from_json(
            Json{{"subcommand", "sat"}, {"trials", 3}, {"params", {{"n", 40}, {"k", 3}, {"delta", 2}}}});
        const auto a = cli::run_experiment(c);
        c.seed = 1;
        const auto b = cli::run_experiment(c);
        CHECK(without_wall_time(a) != without_wall_time(b));
    }
    SUBCASE("100-trial success count equals the recount") {
        cli::ExperimentConfig c;
        c.params = {{"n", 30}, {"k", 3}, {"delta", 3}};
        c.trials = 100;
        c.cap = 45;
        const auto r = cli::run_experiment(c);
        std::uint64_t ok = 0;
        for (const auto& t : r.runs) ok += t.success() ? 1 : 0;
        CHECK(r.aggregate.trials == 100);
        CHECK(r.aggregate.successes == ok);
        CHECK(ok > 0);
        CHECK(ok < 100);
        for (std::uint64_t i = 0; i < 100; ++i) CHECK(r.runs[i].index == i);
    }
    SUBCASE("solution and report files") {
        cli::ExperimentConfig c;
        c.inputs["cnf"] = scratch_file("sol.cnf", "p cnf 2 1\n1 2 0\n");
        c.solution = (scratch_dir() / "sol.txt").string();
        c.output = (scratch_dir() / "sol-report.json").string();
        const auto r = cli::run_experiment(c);
        const auto assignment = io::read_file(c.solution);
        CHECK(assignment.rfind("v ", 0) == 0);
        CHECK(io::read_file(c.output) == cli::serialize(r));
    }
}
