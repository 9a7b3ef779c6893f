#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ulab/state_space.hpp"
#include "ulab/statistics.hpp"

namespace ulab::harness {

/// Bad config file, schema or values (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Suite { commutators, uncertainty, asymptotics, symbolic, dsl, all };

const char* to_string(Suite s);
/// Throws ConfigError for an unknown name.
Suite parse_suite(const std::string& name);

enum class ReportFormat { json, csv };

/// Thresholds per check id. Residual checks pass when value <= threshold;
/// uncertainty_product passes when the product >= (hbar/2)(1 - uncertainty_product).
struct Tolerances {
    ResidualThresholds residual;
    double uncertainty_product = 1e-8;
    double product_t_invariance = 1e-9;
    double imag_leak = 1e-8;
    double velocity_closed_form = 1e-6;  // relative
    double energy_sq_slope = 0.15;       // |slope + 1|
    double energy_sq_monotone = 0.01;    // allowed relative increase between scan points
    double energy_expectation = 0.01;    // relative, at the last scan time
    double time_reversal = 1e-8;
    double dsl_semantic = 1e-8;  // relative
};

struct AsymptoticsConfig {
    StateSpec state;
    std::vector<double> t_list;
};

struct DslConfig {
    std::uint64_t seed = 1;
    int roundtrip_cases = 500;
    int semantic_cases = 50;
    double t = 1.5;
    StateSpec state;
    GridSpec grid;  ///< defaults to the main grid
};

struct RunConfig {
    GridSpec grid;
    /// Extra grids (e.g. a different hbar) on which the uncertainty suite is repeated.
    std::vector<GridSpec> uncertainty_grids;
    std::vector<StateSpec> states;
    std::vector<double> t_values;
    double mass = 1.0;
    Tolerances tolerances;
    ComplianceOptions compliance;
    AsymptoticsConfig asymptotics;
    DslConfig dsl;
    std::vector<Suite> suites{Suite::all};
    std::optional<std::string> output_path;
    ReportFormat output_format = ReportFormat::json;
};

/// Parses and validates a schema-1 config. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

struct CheckParams {
    std::optional<double> t;
    std::optional<int> j;
    std::optional<double> m;
    std::optional<GridSpec> grid;
};

struct CheckReport {
    std::string suite;
    std::string check;
    std::string state;
    CheckParams params;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double wall_ms = 0.0;
};

/// Reports in fixed order: suites as listed, then states x t_values x checks.
/// Independent cells run in parallel (ULAB_THREADS) but never reorder.
/// Throws ConfigError for states that cannot be synthesized on a grid.
std::vector<CheckReport> run_suite(const RunConfig& config, Suite suite);

bool all_pass(const std::vector<CheckReport>& reports);

/// Array of objects with keys suite, check, state, params, value, threshold,
/// pass, wall_ms (null when timings is false). Non-finite values become null.
nlohmann::ordered_json reports_to_json(const std::vector<CheckReport>& reports, bool timings = true);
void write_json(std::ostream& out, const std::vector<CheckReport>& reports, bool timings = true);
/// Header suite,check,state,t,j,value,threshold,pass; empty t/j when absent.
void write_csv(std::ostream& out, const std::vector<CheckReport>& reports);

/// Per (state, t) cell summary written by the sweep subcommand.
/// Returns true when every cell passes.
bool write_sweep_csv(std::ostream& out, const RunConfig& config);

/// The command-line interface; returns the process exit code
/// (0 all pass, 1 a check failed, 2 usage or config error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ulab::harness
