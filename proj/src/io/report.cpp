#include "flawkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flawkit::cli {

namespace {

const std::vector<std::string> trial_outcomes = {"flawless", "cap_exceeded", "dead_end", "failed"};
const std::vector<std::string> report_outcomes = {"success", "cap_exceeded", "dead_end", "failed"};

bool one_of(const std::string& x, const std::vector<std::string>& options) {
    return std::find(options.begin(), options.end(), x) != options.end();
}

struct Checker {
    std::string why;

    bool fail(const std::string& message) {
        if (why.empty()) why = message;
        return false;
    }

    bool has(const Json& j, const char* key, Json::value_t type, const std::string& where) {
        auto it = j.find(key);
        if (it == j.end()) return fail(where + ": missing '" + key + "'");
        const bool ok = type == Json::value_t::number_unsigned ? it->is_number_unsigned()
                        : type == Json::value_t::number_integer ? it->is_number_integer()
                        : type == Json::value_t::number_float ? it->is_number()
                                                              : it->type() == type;
        return ok || fail(where + ": '" + key + "' has the wrong type");
    }
};

std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, double q) {
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

} // namespace

Aggregate aggregate(const std::vector<TrialRecord>& trials) {
    Aggregate a;
    a.trials = trials.size();
    if (trials.empty()) return a;
    std::vector<std::uint64_t> steps;
    for (const auto& t : trials) {
        a.successes += t.success() ? 1 : 0;
        steps.push_back(t.steps);
    }
    std::sort(steps.begin(), steps.end());
    a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
    a.steps_min = steps.front();
    a.steps_max = steps.back();
    a.steps_median = nearest_rank(steps, 0.5);
    a.steps_p90 = nearest_rank(steps, 0.9);
    a.steps_mean = std::accumulate(steps.begin(), steps.end(), 0.0) / static_cast<double>(steps.size());
    return a;
}

Json to_json(const RunReport& r) {
    Json j;
    j["tool"] = r.tool;
    j["tool_version"] = r.tool_version;
    j["format_version"] = r.format_version;
    j["rng"] = r.rng;
    j["subcommand"] = r.subcommand;
    j["seed"] = r.seed;
    j["cap"] = r.cap;
    j["outcome"] = r.outcome;
    j["exit_code"] = r.exit_code;
    j["wall_time_ms"] = r.wall_time_ms;
    j["config"] = r.config;
    j["instance"] = r.instance;
    j["summary"] = r.summary;
    j["warnings"] = r.warnings;
    const auto& a = r.aggregate;
    j["aggregate"] = {{"trials", a.trials},
                      {"successes", a.successes},
                      {"success_rate", a.success_rate},
                      {"steps_min", a.steps_min},
                      {"steps_median", a.steps_median},
                      {"steps_p90", a.steps_p90},
                      {"steps_max", a.steps_max},
                      {"steps_mean", a.steps_mean}};
    Json runs = Json::array();
    for (const auto& t : r.runs)
        runs.push_back({{"index", t.index},
                        {"outcome", t.outcome},
                        {"steps", t.steps},
                        {"counters", t.counters},
                        {"diagnostic", t.diagnostic}});
    j["runs"] = std::move(runs);
    return j;
}

bool validate_report(const Json& j, std::string* why) {
    using T = Json::value_t;
    Checker c;
    auto done = [&](bool ok) {
        if (why) *why = c.why;
        return ok;
    };
    if (!j.is_object()) return done(c.fail("report is not an object"));
    static const std::vector<std::pair<const char*, T>> top = {
        {"tool", T::string},          {"tool_version", T::string},       {"format_version", T::number_integer},
        {"rng", T::string},           {"subcommand", T::string},         {"seed", T::number_unsigned},
        {"cap", T::number_unsigned},  {"outcome", T::string},            {"exit_code", T::number_integer},
        {"wall_time_ms", T::number_float}, {"config", T::object},        {"instance", T::object},
        {"summary", T::object},       {"warnings", T::array},            {"aggregate", T::object},
        {"runs", T::array}};
    bool ok = true;
    for (const auto& [key, type] : top) ok = c.has(j, key, type, "report") && ok;
    if (!ok) return done(false);
    for (const auto& [key, _] : j.items())
        if (std::none_of(top.begin(), top.end(), [&](const auto& e) { return key == e.first; }))
            return done(c.fail("report: unexpected key '" + key + "'"));
    if (j["format_version"].get<int>() != format_version) return done(c.fail("report: unsupported format_version"));
    if (!one_of(j["outcome"].get<std::string>(), report_outcomes)) return done(c.fail("report: unknown outcome"));
    for (const auto& w : j["warnings"])
        if (!w.is_string()) return done(c.fail("report: non-string warning"));
    const auto& a = j["aggregate"];
    for (const char* key : {"trials", "successes", "steps_min", "steps_median", "steps_p90", "steps_max"})
        ok = c.has(a, key, T::number_unsigned, "aggregate") && ok;
    for (const char* key : {"success_rate", "steps_mean"}) ok = c.has(a, key, T::number_float, "aggregate") && ok;
    if (!ok) return done(false);
    for (const auto& t : j["runs"]) {
        if (!t.is_object()) return done(c.fail("runs: entry is not an object"));
        ok = c.has(t, "index", T::number_unsigned, "run") && c.has(t, "outcome", T::string, "run") &&
             c.has(t, "steps", T::number_unsigned, "run") && c.has(t, "counters", T::object, "run") &&
             c.has(t, "diagnostic", T::string, "run");
        if (!ok) return done(false);
        if (!one_of(t["outcome"].get<std::string>(), trial_outcomes)) return done(c.fail("run: unknown outcome"));
    }
    return done(true);
}

RunReport report_from_json(const Json& j) {
    std::string why;
    if (!validate_report(j, &why)) throw ConfigError("invalid report: " + why);
    RunReport r;
    r.tool = j["tool"];
    r.tool_version = j["tool_version"];
    r.format_version = j["format_version"];
    r.rng = j["rng"];
    r.subcommand = j["subcommand"];
    r.seed = j["seed"];
    r.cap = j["cap"];
    r.outcome = j["outcome"];
    r.exit_code = j["exit_code"];
    r.wall_time_ms = j["wall_time_ms"];
    r.config = j["config"];
    r.instance = j["instance"];
    r.summary = j["summary"];
    r.warnings = j["warnings"].get<std::vector<std::string>>();
    const auto& a = j["aggregate"];
    r.aggregate.trials = a["trials"];
    r.aggregate.successes = a["successes"];
    r.aggregate.success_rate = a["success_rate"];
    r.aggregate.steps_min = a["steps_min"];
    r.aggregate.steps_median = a["steps_median"];
    r.aggregate.steps_p90 = a["steps_p90"];
    r.aggregate.steps_max = a["steps_max"];
    r.aggregate.steps_mean = a["steps_mean"];
    for (const auto& t : j["runs"]) {
        TrialRecord rec;
        rec.index = t["index"];
        rec.outcome = t["outcome"];
        rec.steps = t["steps"];
        rec.counters = t["counters"];
        rec.diagnostic = t["diagnostic"];
        r.runs.push_back(std::move(rec));
    }
    return r;
}

std::string serialize(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

void emit_report(const RunReport& report, const std::string& path) { io::write_file(path, serialize(report)); }

} // namespace flawkit::cli
