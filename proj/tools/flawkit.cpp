#include "flawkit/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace flawkit;
using cli::Json;

namespace {

/// Flag spelling of a parameter key: underscores become dashes.
std::string flag_name(const std::string& key) {
    std::string out = "--";
    for (char ch : key) out += ch == '_' ? '-' : ch;
    return out;
}

bool is_boolean(const std::string& key) {
    return key == "triangle_free" || key == "z_after_f" || key == "check" || key == "triangle_stats";
}

bool is_integer(const std::string& key) {
    static const std::set<std::string> keys = {"n",          "k",          "delta",       "clauses",       "edges",
                                               "q",          "states_limit", "phase2_cap", "partition_cap", "bisect_cap"};
    return keys.count(key) > 0;
}

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::uint64_t cap = 0;
    std::uint64_t trials = 1;
    std::string format = "json";
    std::string output;
    std::string solution;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
};

Json to_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        if (is_integer(key)) {
            const auto x = std::stoull(text, &used);
            if (used == text.size() && text[0] != '-') return Json(x);
        } else if (key == "psi" && text.find(',') != std::string::npos) {
            Json list = Json::array();
            std::stringstream in(text);
            for (std::string part; std::getline(in, part, ',');) list.push_back(std::stod(part));
            return list;
        } else {
            const double x = std::stod(text, &used);
            if (used == text.size()) return Json(x);
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("bad value '" + text + "' for " + flag_name(key));
}

std::string text_report(const cli::RunReport& r) {
    std::ostringstream out;
    const auto& a = r.aggregate;
    out << cli::tool_name << ' ' << r.subcommand << " seed=" << r.seed << " cap=" << r.cap << " trials=" << a.trials << '\n';
    out << "outcome: " << r.outcome << " (exit " << r.exit_code << ")\n";
    out << "successes: " << a.successes << '/' << a.trials << '\n';
    out << "steps: min " << a.steps_min << ", median " << a.steps_median << ", p90 " << a.steps_p90 << ", max "
        << a.steps_max << '\n';
    for (const auto& [key, value] : r.summary.items())
        if (value.is_primitive()) out << key << ": " << value.dump() << '\n';
        else if (value.is_object())
            for (const auto& [inner, x] : value.items())
                if (x.is_primitive()) out << key << '.' << inner << ": " << x.dump() << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
    for (const auto& t : r.runs)
        if (!t.diagnostic.empty()) out << "trial " << t.index << ": " << t.diagnostic << '\n';
    return out.str();
}

int execute(cli::Subcommand sub, const Options& o, const CLI::App& app) {
    Json j = Json::object();
    if (!o.config.empty()) {
        j = io::parse_json(io::read_file(o.config));
        if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
        if (j.contains("subcommand") && j["subcommand"] != cli::to_string(sub))
            throw ConfigError("config file is for '" + j["subcommand"].get<std::string>() + "'");
    }
    j["subcommand"] = cli::to_string(sub);
    auto given = [&](const std::string& name) { return app.count(name) > 0; };
    if (given("--seed")) j["seed"] = o.seed;
    if (given("--cap")) j["cap"] = o.cap;
    if (given("--trials")) j["trials"] = o.trials;
    if (given("--output")) j["output"] = o.output;
    if (given("--solution")) j["solution"] = o.solution;
    for (const auto& [key, path] : o.inputs)
        if (given(flag_name(key))) j["inputs"][key] = path;
    for (const auto& [key, text] : o.values)
        if (given(flag_name(key))) j["params"][key] = to_number(key, text);
    for (const auto& [key, on] : o.flags)
        if (given(flag_name(key))) j["params"][key] = on;

    auto config = cli::ExperimentConfig::from_json(j);
    if (config.output.empty())
        if (const char* dir = std::getenv("FLAWKIT_OUTPUT_DIR"); dir && *dir)
            config.output = (std::filesystem::path(dir) /
                             (cli::to_string(sub) + "-seed" + std::to_string(config.seed) + ".json"))
                                .string();
    const auto report = cli::run_experiment(config);
    if (o.format == "text") std::cout << text_report(report);
    else std::cout << cli::serialize(report);
    for (const auto& t : report.runs)
        if (!t.diagnostic.empty() && t.outcome != "flawless")
            std::cerr << "trial " << t.index << " " << t.outcome << ": " << t.diagnostic << '\n';
    return report.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flaw/action local search: solvers, certification and experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cli::tool_version));

    const std::vector<cli::Subcommand> subs = {cli::Subcommand::sat,      cli::Subcommand::aec,
                                               cli::Subcommand::color,    cli::Subcommand::certify,
                                               cli::Subcommand::spectral, cli::Subcommand::gen_graph,
                                               cli::Subcommand::decompose};
    static const std::map<cli::Subcommand, const char*> help = {
        {cli::Subcommand::sat, "Variable-setting backtracking on a CNF"},
        {cli::Subcommand::aec, "Acyclic edge coloring by backtracking"},
        {cli::Subcommand::color, "Hybrid list coloring (phase 1 and completion)"},
        {cli::Subcommand::certify, "Charges and convergence condition of an enumerable system"},
        {cli::Subcommand::spectral, "Spectral radius and survival of an enumerable system"},
        {cli::Subcommand::gen_graph, "G(n, d/n) samples with triangle statistics"},
        {cli::Subcommand::decompose, "Decompose and color a graph with few triangles"}};

    std::map<cli::Subcommand, Options> options;
    std::map<cli::Subcommand, CLI::App*> apps;
    for (auto sub : subs) {
        auto& o = options[sub];
        auto* s = app.add_subcommand(cli::to_string(sub), help.at(sub));
        apps[sub] = s;
        s->add_option("--config", o.config, "JSON experiment config; flags override its entries");
        s->add_option("--seed", o.seed, "Root seed of every random stream");
        s->add_option("--cap", o.cap, "Step cap per trial");
        s->add_option("--trials", o.trials, "Number of seeded trials");
        s->add_option("--format", o.format, "Report format on stdout")->check(CLI::IsMember({"json", "text"}));
        s->add_option("--output", o.output, "Report path (default: $FLAWKIT_OUTPUT_DIR/<subcommand>-seed<seed>.json)");
        s->add_option("--solution", o.solution, "Write trial 0's solution here");
        for (const auto& key : cli::input_keys(sub)) s->add_option(flag_name(key), o.inputs[key], key + " input file");
        for (const auto& key : cli::parameter_keys(sub)) {
            if (is_boolean(key)) s->add_flag(flag_name(key), o.flags[key], key);
            else s->add_option(flag_name(key), o.values[key], key);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config;
    }

    for (auto sub : subs) {
        if (!apps[sub]->parsed()) continue;
        try {
            return execute(sub, options[sub], *apps[sub]);
        } catch (const CapacityError& e) {
            std::cerr << "capacity error: " << e.what() << '\n';
            return cli::exit_capacity;
        } catch (const InternalError& e) {
            std::cerr << "internal error: " << e.what() << '\n';
            return cli::exit_internal;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cli::exit_config;
        }
    }
    return cli::exit_internal;
}
