#include "flawkit/aec.hpp"
#include "flawkit/decompose.hpp"
#include "flawkit/experiment.hpp"
#include "flawkit/explicit_system.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <set>

namespace flawkit::cli {

namespace {

enum class Type { integer, real, boolean, reals };

struct ParamSpec {
    const char* name;
    Type type;
    std::set<Subcommand> where;
};

using S = Subcommand;

const std::vector<ParamSpec>& param_specs() {
    static const std::vector<ParamSpec> specs = {
        {"n", Type::integer, {S::sat, S::aec, S::color, S::gen_graph, S::decompose}},
        {"k", Type::integer, {S::sat}},
        {"delta", Type::integer, {S::sat, S::aec, S::color}},
        {"clauses", Type::integer, {S::sat}},
        {"edges", Type::integer, {S::aec, S::color}},
        {"d", Type::real, {S::gen_graph, S::decompose}},
        {"q", Type::integer, {S::aec, S::color}},
        {"c", Type::real, {S::aec}},
        {"gamma", Type::real, {S::aec}},
        {"delta_h", Type::real, {S::aec}},
        {"epsilon", Type::real, {S::color, S::decompose}},
        {"f", Type::real, {S::color, S::decompose}},
        {"L", Type::real, {S::color}},
        {"s", Type::real, {S::sat, S::aec, S::certify, S::spectral}},
        {"psi", Type::reals, {S::sat, S::certify, S::spectral}},
        {"states_limit", Type::integer, {S::certify, S::spectral}},
        {"triangle_free", Type::boolean, {S::color, S::decompose}},
        {"z_after_f", Type::boolean, {S::color}},
        {"check", Type::boolean, {S::aec, S::color}},
        {"exponent", Type::real, {S::gen_graph}},
        {"triangle_stats", Type::boolean, {S::gen_graph}},
        {"phase2_cap", Type::integer, {S::color, S::decompose}},
        {"partition_cap", Type::integer, {S::decompose}},
        {"bisect_cap", Type::integer, {S::decompose}},
        {"schedule_delta", Type::real, {S::decompose}},
        {"zeta", Type::real, {S::decompose}},
    };
    return specs;
}

const std::map<Subcommand, std::vector<std::string>>& input_table() {
    static const std::map<Subcommand, std::vector<std::string>> table = {
        {S::sat, {"cnf", "measure"}},
        {S::aec, {"graph"}},
        {S::color, {"graph", "lists"}},
        {S::certify, {"system", "cnf", "measure"}},
        {S::spectral, {"system", "cnf", "measure"}},
        {S::gen_graph, {}},
        {S::decompose, {"graph"}},
    };
    return table;
}

bool type_ok(const Json& v, Type t) {
    switch (t) {
    case Type::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case Type::real: return v.is_number();
    case Type::boolean: return v.is_boolean();
    case Type::reals:
        if (v.is_number()) return true;
        return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); });
    }
    return false;
}

/// Finite doubles as numbers, the rest as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

class Params {
public:
    explicit Params(const Json& j) : j_(j) {}

    bool has(const char* key) const { return j_.contains(key); }
    std::optional<double> real(const char* key) const {
        return has(key) ? std::optional<double>(j_[key].get<double>()) : std::nullopt;
    }
    double real(const char* key, double fallback) const { return real(key).value_or(fallback); }
    std::optional<std::uint64_t> integer(const char* key) const {
        return has(key) ? std::optional<std::uint64_t>(j_[key].get<std::uint64_t>()) : std::nullopt;
    }
    std::uint64_t integer(const char* key, std::uint64_t fallback) const { return integer(key).value_or(fallback); }
    std::uint64_t need(const char* key, const char* why) const {
        if (!has(key)) throw ConfigError(std::string("parameter '") + key + "' is required " + why);
        return j_[key].get<std::uint64_t>();
    }
    double need_real(const char* key, const char* why) const {
        if (!has(key)) throw ConfigError(std::string("parameter '") + key + "' is required " + why);
        return j_[key].get<double>();
    }
    bool flag(const char* key) const { return has(key) && j_[key].get<bool>(); }
    /// A scalar is broadcast to `size` entries.
    std::optional<std::vector<double>> reals(const char* key, std::size_t size) const {
        if (!has(key)) return std::nullopt;
        const auto& v = j_[key];
        if (v.is_number()) return std::vector<double>(size, v.get<double>());
        auto out = v.get<std::vector<double>>();
        if (out.size() != size)
            throw ConfigError(std::string("parameter '") + key + "' needs " + std::to_string(size) + " entries");
        return out;
    }

private:
    const Json& j_;
};

struct Work {
    Json instance = Json::object();
    Json summary = Json::object();
    std::vector<TrialRecord> runs;
    std::vector<std::string> warnings;
    std::string solution;
};

Rng instance_rng(const ExperimentConfig& c) { return Rng::stream(c.seed, ExperimentConfig::instance_stream); }

const std::string* input(const ExperimentConfig& c, const char* key) {
    auto it = c.inputs.find(key);
    return it == c.inputs.end() ? nullptr : &it->second;
}

std::string outcome_name(Outcome o) { return o == Outcome::flawless ? "flawless" : "cap_exceeded"; }

Json graph_stats(const Graph& g) {
    return {{"vertices", g.vertices()}, {"edges", g.edges()}, {"max_degree", g.max_degree()}};
}

Json condition_json(const ConditionReport& r, double s) {
    return {{"feasible", r.feasible},
            {"delta", number(r.delta)},
            {"max_zeta", number(r.max_zeta())},
            {"t0_coarse", number(r.t0_coarse)},
            {"t0_refined", number(r.t0_refined)},
            {"s", s},
            {"step_bound", number(r.step_bound(s))}};
}

// ---------------------------------------------------------------- sat

Work run_sat(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    Rng gen = instance_rng(c);
    auto csp = input(c, "cnf") ? io::parse_cnf_file(*input(c, "cnf")) : [&] {
        const auto n = p.need("n", "without a cnf input");
        const auto k = p.need("k", "without a cnf input");
        const auto delta = p.need("delta", "without a cnf input");
        return sat::random_kcnf(n, static_cast<unsigned>(k), delta, p.integer("clauses", n * delta / std::max<std::uint64_t>(k, 1)), gen);
    }();
    const auto measure = input(c, "measure") ? io::parse_measure(io::read_file(*input(c, "measure")), csp)
                                             : sat::ProductMeasure::uniform(csp);
    w.instance = {{"variables", csp.variables()}, {"clauses", csp.constraints().size()}, {"max_degree", csp.max_degree()}};
    const double s = p.real("s", 20);
    const auto setting = sat::condition_variable_setting(csp, measure, p.reals("psi", csp.variables()));
    w.summary["variable_setting"] = {{"feasible", setting.feasible},
                                     {"max_lhs", number(setting.max_lhs)},
                                     {"alpha", setting.alpha ? number(*setting.alpha) : Json(nullptr)}};
    w.summary["condition"] = condition_json(setting.condition, s);
    const double bound = setting.condition.step_bound(s);
    std::uint64_t beyond = 0;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        const auto r = sat::backtrack_run(csp, measure, rng, c.cap);
        const bool within = static_cast<double>(r.steps) <= bound;
        beyond += within ? 0 : 1;
        w.runs.push_back({i, outcome_name(r.outcome), r.steps, {{"backtracks", r.backtracks}, {"within_bound", within}}, ""});
        if (i == 0 && r.outcome == Outcome::flawless) w.solution = io::emit_assignment(r.assignment);
    }
    w.summary["runs_beyond_bound"] = beyond;
    return w;
}

// ---------------------------------------------------------------- aec

Graph bounded_graph(const ExperimentConfig& c, const Params& p) {
    if (const auto* path = input(c, "graph")) return io::parse_graph_file(*path);
    const auto n = p.need("n", "without a graph input");
    const auto delta = p.need("delta", "without a graph input");
    Rng gen = instance_rng(c);
    return random_bounded_degree(n, delta, p.integer("edges", n * delta / 2), gen);
}

Work run_aec(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    const Graph g = bounded_graph(c, p);
    const std::size_t delta = g.max_degree();
    std::size_t q = 0;
    if (p.has("q")) q = p.integer("q", 0);
    else if (p.has("c")) q = aec::q_from_c(delta, *p.real("c"));
    else throw ConfigError("aec needs 'q' or 'c'");
    w.instance = graph_stats(g);
    w.instance["q"] = q;
    const double s = p.real("s", 20);
    const auto sb = aec::aec_step_bound(g, q, s, p.has("q") ? p.real("c") : std::nullopt);
    w.summary["step_bound"] = {{"c", number(sb.c)}, {"delta", number(sb.delta)}, {"t0", number(sb.t0)},
                               {"s", s},          {"steps", number(sb.steps)}, {"feasible", sb.feasible}};
    if (delta >= 2 && sb.c > 1) {
        const auto cond = aec::aec_condition(sb.c);
        w.summary["condition"] = {{"value", number(cond.value)}, {"alpha", number(cond.alpha)},
                                  {"closed_form_value", number(cond.closed_form_value)},
                                  {"closed_form_alpha", number(cond.closed_form_alpha)}, {"feasible", cond.feasible}};
    }
    if (p.has("gamma") || p.has("delta_h")) {
        const double gamma = p.need_real("gamma", "for the H-free calculator");
        const double dh = p.need_real("delta_h", "for the H-free calculator");
        const auto smallest = aec::hfree_smallest_c(gamma, dh, static_cast<double>(delta));
        w.summary["hfree_smallest_c"] = smallest ? number(*smallest) : Json(nullptr);
    }
    std::size_t max_forbidden = 0;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        const auto r = aec::aec_run(g, q, rng, c.cap, p.flag("check"));
        max_forbidden = std::max(max_forbidden, r.max_forbidden);
        const std::string outcome = r.dead_end ? "dead_end" : outcome_name(r.outcome);
        w.runs.push_back({i, outcome, r.steps,
                          {{"backtracks", r.backtracks},
                           {"max_forbidden", r.max_forbidden},
                           {"within_bound", static_cast<double>(r.steps) <= sb.steps}},
                          r.diagnostic});
        if (i == 0 && r.outcome == Outcome::flawless && !r.dead_end) w.solution = io::emit_edge_coloring(r.coloring);
    }
    w.summary["max_forbidden"] = max_forbidden;
    w.summary["forbidden_limit"] = delta >= 1 ? 2 * (delta - 1) : 0;
    return w;
}

// ---------------------------------------------------------------- color

Work run_color(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    Graph g = bounded_graph(c, p);
    if (p.flag("triangle_free")) g = remove_triangles(g);
    const auto stats = color::neighborhood_stats(g);
    const double delta = static_cast<double>(stats.max_degree);
    color::HybridParams hp;
    if (p.has("epsilon")) {
        hp = color::derive_params(delta, p.real("f", stats.implied_f), *p.real("epsilon"));
        if (p.has("L") || p.has("q")) w.warnings.push_back("'L' and 'q' ignored: derived from epsilon and f");
    } else if (p.has("q")) {
        const auto q = p.integer("q", 0);
        const double fallback = static_cast<double>(q) * std::exp(-delta / static_cast<double>(q)) / 2;
        hp = color::explicit_params(delta, p.real("L", fallback), q);
    } else {
        throw ConfigError("color needs 'epsilon' or 'q'");
    }
    if (!hp.guarantee_valid) w.warnings.push_back("parameters are not guarantee-valid");
    const auto lists = input(c, "lists") ? io::parse_lists(io::read_file(*input(c, "lists")), g.vertices())
                                         : color::ColorLists::shared(g.vertices(), hp.q);
    w.instance = graph_stats(g);
    w.instance["max_span"] = stats.max_span;
    w.instance["implied_f"] = number(stats.implied_f);
    w.summary["params"] = {{"delta", hp.delta},       {"f", number(hp.f)},
                           {"epsilon", hp.epsilon},   {"L", number(hp.L)},
                           {"q", hp.q},               {"f_in_range", hp.f_in_range},
                           {"guarantee_valid", hp.guarantee_valid},
                           {"flaw_order", p.flag("z_after_f") ? "B,f,Z" : "B,Z,f"}};
    color::Phase1Options options;
    options.cap = c.cap;
    options.check = p.flag("check");
    options.hybrid.z_after_f = p.flag("z_after_f");
    const auto phase2_cap = p.integer("phase2_cap", 10'000'000);
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        const auto r1 = color::phase1_run(g, lists, hp, rng, options);
        TrialRecord rec{i, outcome_name(r1.outcome), r1.steps,
                        {{"b_steps", r1.b_steps}, {"z_steps", r1.z_steps}, {"f_steps", r1.f_steps},
                         {"uncolorings", r1.uncolorings}},
                        ""};
        if (r1.outcome == Outcome::flawless) {
            const auto r2 = color::phase2_complete(g, lists, r1.state, rng, phase2_cap);
            rec.counters["phase2_resamples"] = r2.resamples;
            if (!r2.success) {
                rec.outcome = "cap_exceeded";
                rec.diagnostic = r2.diagnostic;
            } else if (!color::verify_list_coloring(g, lists, r2.coloring)) {
                throw InternalError("completed coloring failed verification");
            } else if (i == 0) {
                w.solution = io::emit_vertex_coloring(r2.coloring);
            }
        }
        w.runs.push_back(std::move(rec));
    }
    return w;
}

// ---------------------------------------------------------------- certify / spectral

/// An enumerable system with its measure, from an explicit-system JSON or a small CNF.
struct Toy {
    std::unique_ptr<ExplicitSystem> explicit_system;
    std::unique_ptr<sat::CspInstance> csp;
    std::unique_ptr<sat::ProductMeasure> measure;
    std::unique_ptr<sat::BacktrackSystem> backtrack;

    const FlawSystem& system() const {
        return explicit_system ? static_cast<const FlawSystem&>(*explicit_system) : *backtrack;
    }
    Measure mu(const StateIndex& index) const {
        if (explicit_system) return Measure::uniform(index);
        return Measure::from_function(index, [this](const State& s) { return measure->weight(s); });
    }
};

Toy load_toy(const ExperimentConfig& c) {
    Toy t;
    const auto* system = input(c, "system");
    const auto* cnf = input(c, "cnf");
    if ((system != nullptr) == (cnf != nullptr)) throw ConfigError("give exactly one of the 'system' and 'cnf' inputs");
    if (system) {
        if (input(c, "measure")) throw ConfigError("'measure' applies to cnf inputs only");
        t.explicit_system = std::make_unique<ExplicitSystem>(ExplicitSystem::from_json(io::read_file(*system)));
        return t;
    }
    t.csp = std::make_unique<sat::CspInstance>(io::parse_cnf_file(*cnf));
    t.measure = std::make_unique<sat::ProductMeasure>(
        input(c, "measure") ? io::parse_measure(io::read_file(*input(c, "measure")), *t.csp)
                            : sat::ProductMeasure::uniform(*t.csp));
    t.backtrack = std::make_unique<sat::BacktrackSystem>(*t.csp, *t.measure);
    return t;
}

Work run_certify(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    const Toy toy = load_toy(c);
    const auto index = enumerate_states(toy.system(), p.integer("states_limit", 1'000'000));
    const Measure mu = toy.mu(index);
    const auto charges = charge_table(index, mu);
    double deviation = 0;
    for (const auto& [key, gamma] : charges.entries())
        deviation = std::max(deviation, std::abs(charge_via_norm(index, key.first, key.second, mu) - gamma));
    auto psi = p.reals("psi", index.flaw_count());
    const bool optimized = !psi;
    if (!psi) psi = optimize_psi(charges);
    const double s = p.real("s", 20);
    const auto report = evaluate_condition(charges, *psi, condition_context(index, mu));
    const auto lll = evaluate_algolll(index, mu, *psi);
    w.instance = {{"states", index.size()}, {"flaws", index.flaw_count()}, {"charges", charges.size()}};
    w.summary["psi"] = *psi;
    w.summary["psi_optimized"] = optimized;
    w.summary["zeta"] = report.zeta;
    w.summary["condition"] = condition_json(report, s);
    w.summary["max_charge_norm_deviation"] = deviation;
    w.summary["algolll_feasible"] = lll.feasible;
    Json table = Json::array();
    for (const auto& [key, gamma] : charges.entries()) table.push_back({{"flaw", key.first}, {"set", key.second.ids()}, {"gamma", gamma}});
    w.summary["charge_table"] = std::move(table);
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        RunOptions options;
        options.cap = c.cap;
        const auto r = run(toy.system(), Strategy::identity(), rng, options);
        w.runs.push_back({i, outcome_name(r.outcome), r.steps, Json::object(), ""});
    }
    return w;
}

Work run_spectral(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    if (c.cap > 100'000) throw ConfigError("spectral uses the cap as its horizon; at most 100000");
    const Toy toy = load_toy(c);
    const auto index = enumerate_states(toy.system(), p.integer("states_limit", 1'000'000));
    const auto sr = spectral_analyze(index, Strategy::identity(), c.cap);
    w.instance = {{"states", index.size()}, {"flaws", index.flaw_count()}};
    w.summary["rho"] = number(sr.rho);
    w.summary["rho_lower"] = number(sr.lower);
    w.summary["rho_upper"] = number(sr.upper);
    w.summary["converged"] = sr.converged;
    w.summary["method"] = sr.method;
    w.summary["survival"] = sr.survival;
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        RunOptions options;
        options.cap = c.cap;
        const auto r = run(toy.system(), Strategy::identity(), rng, options);
        failures += r.outcome == Outcome::flawless ? 0 : 1;
        w.runs.push_back({i, outcome_name(r.outcome), r.steps, Json::object(), ""});
    }
    if (c.trials > 0) {
        const double rate = static_cast<double>(failures) / static_cast<double>(c.trials);
        const double expected = sr.survival.back();
        const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(c.trials));
        w.summary["empirical_failure"] = rate;
        w.summary["survival_at_cap"] = expected;
        w.summary["within_3_sigma"] = std::abs(rate - expected) <= 3 * sigma + 1e-12;
    }
    return w;
}

// ---------------------------------------------------------------- gen-graph

Work run_gen_graph(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    const auto n = p.need("n", "for gen-graph");
    const double d = p.need_real("d", "for gen-graph");
    if (d < 0 || d > static_cast<double>(n)) throw DomainError("need 0 <= d <= n");
    const auto exponent = p.real("exponent");
    const bool exact = p.has("triangle_stats") ? p.flag("triangle_stats") : true;
    w.instance = {{"n", n}, {"d", d}, {"p", n ? d / static_cast<double>(n) : 0.0}};
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        const Graph g = gnp(n, n ? d / static_cast<double>(n) : 0.0, rng);
        TrialRecord rec{i, "flawless", 0, graph_stats(g), ""};
        const double delta = static_cast<double>(g.max_degree());
        std::optional<double> limit;
        if (exponent) {
            limit = std::pow(delta, *exponent);
            rec.counters["triangle_limit"] = *limit;
        }
        if (exact) {
            const auto st = color::neighborhood_stats(g);
            rec.counters["max_triangles"] = st.max_span;
            rec.counters["implied_f"] = number(st.implied_f);
            if (limit && static_cast<double>(st.max_span) > *limit) rec.outcome = "failed";
        } else if (limit) {
            if (const auto v = color::first_triangle_excess(g, *limit)) {
                rec.outcome = "failed";
                rec.diagnostic = "vertex " + std::to_string(*v) + " lies in more than " + std::to_string(*limit) + " triangles";
            }
        }
        if (i == 0) w.solution = io::emit_graph(g);
        w.runs.push_back(std::move(rec));
    }
    return w;
}

// ---------------------------------------------------------------- decompose

Work run_decompose(const ExperimentConfig& c) {
    const Params p(c.params);
    Work w;
    Graph g;
    if (const auto* path = input(c, "graph")) {
        g = io::parse_graph_file(*path);
    } else {
        const auto n = p.need("n", "without a graph input");
        const double d = p.need_real("d", "without a graph input");
        Rng gen = instance_rng(c);
        g = gnp(n, n ? d / static_cast<double>(n) : 0.0, gen);
    }
    if (p.flag("triangle_free")) g = remove_triangles(g);
    w.instance = graph_stats(g);
    color::DecomposeOptions options;
    options.epsilon = p.real("epsilon", options.epsilon);
    options.phase1_cap = c.cap;
    options.phase2_cap = p.integer("phase2_cap", options.phase2_cap);
    options.partition_cap = p.integer("partition_cap", options.partition_cap);
    options.bisect_cap = p.integer("bisect_cap", options.bisect_cap);
    if (p.has("schedule_delta") || p.has("zeta")) {
        const auto sched = color::param_schedule(static_cast<double>(g.max_degree()),
                                                 p.real("f", color::neighborhood_stats(g).implied_f),
                                                 p.need_real("schedule_delta", "for the parameter schedule"),
                                                 p.need_real("zeta", "for the parameter schedule"));
        w.summary["schedule"] = {{"j", sched.j}, {"delta_j", number(sched.delta_t.back())}, {"s_j", number(sched.s_t.back())},
                                 {"delta_ok", sched.delta_ok}, {"s_ok", sched.s_ok},
                                 {"hypotheses_hold", sched.hypotheses_hold}};
        if (!sched.warning.empty()) w.warnings.push_back(sched.warning);
    }
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        Rng rng = Rng::stream(c.seed, i);
        const auto r = color::decompose_and_color(g, options, rng);
        std::uint64_t steps = 0;
        std::size_t fallbacks = 0;
        for (const auto& cls : r.classes) {
            steps += cls.phase1_steps;
            fallbacks += cls.fallback ? 1 : 0;
        }
        const bool checks = std::all_of(r.bisections.begin(), r.bisections.end(), [](const auto& b) { return b.ok(); }) &&
                            std::all_of(r.partitions.begin(), r.partitions.end(), [](const auto& x) { return x.ok(); });
        TrialRecord rec{i, r.success ? "flawless" : "failed", steps,
                        {{"branch", r.branch}, {"colors", r.colors}, {"classes", r.classes.size()},
                         {"fallback_classes", fallbacks}, {"bisect_rounds", r.bisect_rounds},
                         {"checks_ok", checks}, {"guarantee", number(r.guarantee)},
                         {"guarantee_asserted", r.guarantee_asserted}},
                        r.success ? "" : r.failed_stage + ": " + r.diagnostic};
        if (i == 0 && r.success) w.solution = io::emit_vertex_coloring(r.coloring);
        w.runs.push_back(std::move(rec));
    }
    return w;
}

} // namespace

std::string to_string(Subcommand s) {
    switch (s) {
    case S::sat: return "sat";
    case S::aec: return "aec";
    case S::color: return "color";
    case S::certify: return "certify";
    case S::spectral: return "spectral";
    case S::gen_graph: return "gen-graph";
    case S::decompose: return "decompose";
    }
    return "";
}

Subcommand subcommand_from(const std::string& name) {
    for (auto s : {S::sat, S::aec, S::color, S::certify, S::spectral, S::gen_graph, S::decompose})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown subcommand '" + name + "'");
}

const std::vector<std::string>& parameter_keys(Subcommand s) {
    static const auto table = [] {
        std::map<Subcommand, std::vector<std::string>> t;
        for (const auto& spec : param_specs())
            for (auto where : spec.where) t[where].push_back(spec.name);
        return t;
    }();
    static const std::vector<std::string> none;
    auto it = table.find(s);
    return it == table.end() ? none : it->second;
}

const std::vector<std::string>& input_keys(Subcommand s) { return input_table().at(s); }

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> top = {"subcommand", "inputs", "seed", "cap", "trials", "params", "output", "solution"};
    for (const auto& [key, _] : j.items())
        if (!top.count(key)) throw ConfigError("unknown config key '" + key + "'");
    auto expect = [&](const char* key, bool ok, const char* what) {
        if (j.contains(key) && !ok) throw ConfigError(std::string("config key '") + key + "' must be " + what);
    };
    if (!j.contains("subcommand") || !j["subcommand"].is_string()) throw ConfigError("config needs a 'subcommand' string");
    ExperimentConfig c;
    c.subcommand = subcommand_from(j["subcommand"]);
    if (c.subcommand == S::spectral) c.cap = 64;
    expect("seed", j.contains("seed") && type_ok(j["seed"], Type::integer), "a nonnegative integer");
    expect("cap", j.contains("cap") && type_ok(j["cap"], Type::integer), "a nonnegative integer");
    expect("trials", j.contains("trials") && type_ok(j["trials"], Type::integer), "a nonnegative integer");
    expect("output", j.contains("output") && j["output"].is_string(), "a string");
    expect("solution", j.contains("solution") && j["solution"].is_string(), "a string");
    expect("inputs", j.contains("inputs") && j["inputs"].is_object(), "an object");
    expect("params", j.contains("params") && j["params"].is_object(), "an object");
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("cap")) c.cap = j["cap"];
    if (j.contains("trials")) c.trials = j["trials"];
    if (j.contains("output")) c.output = j["output"];
    if (j.contains("solution")) c.solution = j["solution"];
    if (j.contains("inputs")) {
        const auto& allowed = input_keys(c.subcommand);
        for (const auto& [key, value] : j["inputs"].items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw ConfigError("input '" + key + "' does not apply to " + to_string(c.subcommand));
            if (!value.is_string()) throw ConfigError("input '" + key + "' must be a path string");
            c.inputs[key] = value.get<std::string>();
        }
    }
    if (j.contains("params")) {
        for (const auto& [key, value] : j["params"].items()) {
            auto spec = std::find_if(param_specs().begin(), param_specs().end(),
                                     [&](const ParamSpec& s) { return key == s.name; });
            if (spec == param_specs().end()) throw ConfigError("unknown parameter '" + key + "'");
            if (!spec->where.count(c.subcommand))
                throw ConfigError("parameter '" + key + "' does not apply to " + to_string(c.subcommand));
            if (!type_ok(value, spec->type)) throw ConfigError("parameter '" + key + "' has the wrong type");
            c.params[key] = value;
        }
    }
    return c;
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["subcommand"] = cli::to_string(subcommand);
    Json in = Json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    j["inputs"] = std::move(in);
    j["seed"] = seed;
    j["cap"] = cap;
    j["trials"] = trials;
    j["params"] = params;
    j["output"] = output;
    j["solution"] = solution;
    return j;
}

RunReport run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Work w;
    switch (config.subcommand) {
    case S::sat: w = run_sat(config); break;
    case S::aec: w = run_aec(config); break;
    case S::color: w = run_color(config); break;
    case S::certify: w = run_certify(config); break;
    case S::spectral: w = run_spectral(config); break;
    case S::gen_graph: w = run_gen_graph(config); break;
    case S::decompose: w = run_decompose(config); break;
    }
    RunReport r;
    r.subcommand = to_string(config.subcommand);
    r.seed = config.seed;
    r.cap = config.cap;
    r.config = config.to_json();
    r.instance = std::move(w.instance);
    r.summary = std::move(w.summary);
    r.warnings = std::move(w.warnings);
    std::sort(w.runs.begin(), w.runs.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    r.runs = std::move(w.runs);
    r.aggregate = aggregate(r.runs);
    // Dead ends outrank cap exhaustion, which outranks other failures.
    for (const auto* name : {"failed", "cap_exceeded", "dead_end"})
        if (std::any_of(r.runs.begin(), r.runs.end(), [&](const auto& t) { return t.outcome == name; }))
            r.outcome = name;
    r.exit_code = r.outcome == "success" ? exit_success : exit_cap;
    if (!config.solution.empty() && !w.solution.empty()) io::write_file(config.solution, w.solution);
    r.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!config.output.empty()) emit_report(r, config.output);
    return r;
}

} // namespace flawkit::cli
