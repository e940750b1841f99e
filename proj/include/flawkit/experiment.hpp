#pragma once

#include "flawkit/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace flawkit::cli {

using Json = nlohmann::ordered_json;

constexpr const char* tool_name = "flawkit";
constexpr const char* tool_version = "1.0.0";
constexpr int format_version = 1;

/// Exit codes shared by the command-line tool and reports.
enum ExitCode : int { exit_success = 0, exit_internal = 1, exit_cap = 2, exit_config = 3, exit_capacity = 4 };

enum class Subcommand { sat, aec, color, certify, spectral, gen_graph, decompose };

std::string to_string(Subcommand s);
/// Throws ConfigError on an unknown name.
Subcommand subcommand_from(const std::string& name);

/// Parameter and input keys a subcommand accepts.
const std::vector<std::string>& parameter_keys(Subcommand s);
const std::vector<std::string>& input_keys(Subcommand s);

/**
 * One experiment. Randomness: trial i draws from Rng::stream(seed, i); generated instances
 * draw from Rng::stream(seed, instance_stream).
 */
struct ExperimentConfig {
    static constexpr std::uint64_t instance_stream = ~std::uint64_t{0};

    Subcommand subcommand = Subcommand::sat;
    /// Input name → path; names per input_keys().
    std::map<std::string, std::string> inputs;
    std::uint64_t seed = 0;
    std::uint64_t cap = 1'000'000;
    std::uint64_t trials = 1;
    /// Scalar, boolean or array values keyed by parameter_keys().
    Json params = Json::object();
    /// Report path; empty for none.
    std::string output;
    /// Where trial 0's solution is written; empty for none.
    std::string solution;

    /// Rejects unknown keys, keys not applicable to the subcommand, and ill-typed values.
    static ExperimentConfig from_json(const Json& j);
    Json to_json() const;
};

struct TrialRecord {
    std::uint64_t index = 0;
    /// flawless, cap_exceeded, dead_end or failed.
    std::string outcome;
    std::uint64_t steps = 0;
    Json counters = Json::object();
    std::string diagnostic;

    bool success() const { return outcome == "flawless"; }
};

struct Aggregate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0;
    /// Nearest-rank quantiles over all trials.
    std::uint64_t steps_min = 0;
    std::uint64_t steps_median = 0;
    std::uint64_t steps_p90 = 0;
    std::uint64_t steps_max = 0;
    double steps_mean = 0;
};

Aggregate aggregate(const std::vector<TrialRecord>& trials);

struct RunReport {
    std::string tool = tool_name;
    std::string tool_version = cli::tool_version;
    int format_version = cli::format_version;
    std::string rng = Rng::algorithm;
    std::string subcommand;
    std::uint64_t seed = 0;
    std::uint64_t cap = 0;
    /// success, cap_exceeded, dead_end or failed.
    std::string outcome = "success";
    int exit_code = exit_success;
    /// The only field that differs between runs of the same config.
    double wall_time_ms = 0;
    Json config = Json::object();
    Json instance = Json::object();
    Json summary = Json::object();
    std::vector<std::string> warnings;
    Aggregate aggregate;
    std::vector<TrialRecord> runs;
};

Json to_json(const RunReport& report);
/// Inverse of to_json; throws ConfigError when the document does not validate.
RunReport report_from_json(const Json& j);

/// Checks a document against the bundled report schema (required fields and their types).
bool validate_report(const Json& j, std::string* why = nullptr);

/// Fixed field order, two-space indentation, trailing newline.
std::string serialize(const RunReport& report);
void emit_report(const RunReport& report, const std::string& path);

/// Runs every trial and aggregates. Deterministic in (config, seed) apart from wall time.
RunReport run_experiment(const ExperimentConfig& config);

} // namespace flawkit::cli
