#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "ulab/evolution.hpp"
#include "ulab/harness.hpp"
#include "ulab/opdsl.hpp"
#include "ulab/statistics.hpp"
#include "ulab/symbolic.hpp"

namespace ulab::harness {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string expression_text(const std::string& expr, const std::string& expr_file)
{
    if (!expr.empty() && !expr_file.empty()) throw UsageError("give either --expr or --expr-file, not both");
    if (!expr_file.empty()) return read_text(expr_file);
    if (expr.empty()) throw UsageError("an expression is required (--expr or --expr-file)");
    return expr;
}

void report_parse_error(std::ostream& err, const std::string& text, const dsl::ParseError& e)
{
    err << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    // echo the offending line with a caret
    std::size_t begin = text.rfind('\n', e.offset() == 0 ? 0 : e.offset() - 1);
    begin = (begin == std::string::npos || e.offset() == 0) ? 0 : begin + 1;
    std::size_t end = text.find('\n', begin);
    if (end == std::string::npos) end = text.size();
    err << "  " << text.substr(begin, end - begin) << "\n  " << std::string(e.column() - 1, ' ') << "^\n";
}

GridSpec parse_grid_option(const std::string& s)
{
    std::istringstream in(s);
    int n = 0;
    double len = 0.0, hbar = 1.0;
    char c1 = 0, c2 = 0;
    if (!(in >> n >> c1 >> len) || c1 != ',') throw UsageError("--grid expects n,L[,hbar]");
    if (in >> c2) {
        if (c2 != ',' || !(in >> hbar)) throw UsageError("--grid expects n,L[,hbar]");
    }
    if (in >> c2) throw UsageError("--grid expects n,L[,hbar]");
    try {
        return build_grid(n, len, hbar);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path + "'");
    return f;
}

int cmd_verify(const std::string& suite_name, const std::string& config_path, const std::string& out_path,
               const std::string& format, bool no_timings, std::ostream& out, std::ostream& err)
{
    RunConfig config = load_config(config_path);
    std::vector<Suite> suites = config.suites;
    if (!suite_name.empty()) suites = {parse_suite(suite_name)};
    if (!format.empty()) config.output_format = format == "csv" ? ReportFormat::csv : ReportFormat::json;
    if (!out_path.empty()) config.output_path = out_path;

    std::vector<CheckReport> reports;
    for (Suite s : suites) {
        auto part = run_suite(config, s);
        std::size_t failed = 0;
        for (const auto& r : part) failed += !r.pass;
        err << to_string(s) << ": " << part.size() << " checks, " << failed << " failed\n";
        reports.insert(reports.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }

    auto emit = [&](std::ostream& o) {
        if (config.output_format == ReportFormat::csv) write_csv(o, reports);
        else write_json(o, reports, !no_timings);
    };
    if (config.output_path) {
        std::ofstream f = open_out(*config.output_path);
        emit(f);
    } else {
        emit(out);
    }
    return all_pass(reports) ? 0 : 1;
}

int cmd_reduce(const std::string& text, std::ostream& out)
{
    out << symbolic::to_string(dsl::lower(dsl::parse(text))) << '\n';
    return 0;
}

int cmd_eval(const std::string& text, const std::string& state_json, double t, const std::string& grid_text,
             std::ostream& out)
{
    if (t == 0.0 || !std::isfinite(t)) throw UsageError("time parameter must be nonzero");
    const dsl::Ast ast = dsl::parse(text);
    StateSpec spec;
    try {
        spec = json::parse(state_json).get<StateSpec>();
    } catch (const std::exception& e) {
        throw UsageError(std::string("--state: ") + e.what());
    }
    const GridSpec grid = grid_text.empty() ? reference_grid() : parse_grid_option(grid_text);
    WaveFunction f = synthesize_state(grid, spec);
    const OperatorExpr a = dsl::compile(ast, grid, t);
    const Expectation e = expectation(a, f);
    const WaveFunction dev = apply(a, f) - cplx(e.value, 0.0) * f;
    const double sd = dev.norm();
    const ComplianceReport c = domain_compliance(f, ComplianceOptions{});
    json j{{"expr", dsl::format(ast)},
           {"state", spec.describe()},
           {"t", t},
           {"grid", {{"n", grid.n}, {"L", grid.box_length}, {"hbar", grid.hbar}}},
           {"expectation", e.value},
           {"variance", sd * sd},
           {"std_dev", sd},
           {"imag_leak", e.imag_leak},
           {"compliant", c.compliant}};
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path)
{
    const RunConfig config = load_config(config_path);
    std::ofstream f = open_out(out_path);
    return write_sweep_csv(f, config) ? 0 : 1;
}

int cmd_scan(const std::string& config_path, const std::string& out_path, std::ostream& out)
{
    const RunConfig config = load_config(config_path);
    const WaveFunction f = synthesize_state(config.grid, config.asymptotics.state);
    const ScanResult scan = asymptotic_scan(f, config.asymptotics.t_list, config.mass);
    if (out_path.empty()) {
        write_scan_csv(out, scan);
    } else {
        std::ofstream o = open_out(out_path);
        write_scan_csv(o, scan);
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numeric and symbolic checks for the 3D time and energy operators", "ulab"};
    app.require_subcommand(1);

    std::string suite, config_path, out_path, format, expr, expr_file, state_json, grid_text;
    bool no_timings = false;
    double t = 0.0;

    auto* verify = app.add_subcommand("verify", "Run verification suites and write a report");
    verify->add_option("--suite", suite, "commutators|uncertainty|asymptotics|symbolic|dsl|all");
    verify->add_option("--config", config_path, "Config file (JSON, schema 1)")->required();
    verify->add_option("--out", out_path, "Report file (default: stdout)");
    verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    verify->add_flag("--no-timings", no_timings, "Write wall_ms as null");

    auto* symbolic_cmd = app.add_subcommand("symbolic", "Symbolic engine");
    symbolic_cmd->require_subcommand(1);
    auto* reduce = symbolic_cmd->add_subcommand("reduce", "Print the normal form of an expression");
    reduce->add_option("--expr", expr, "Expression text");
    reduce->add_option("--expr-file", expr_file, "File holding the expression");

    auto* eval = app.add_subcommand("eval", "Expectation and spread of an operator on a state");
    eval->add_option("--expr", expr, "Expression text");
    eval->add_option("--expr-file", expr_file, "File holding the expression");
    eval->add_option("--state", state_json, "State as JSON")->required();
    eval->add_option("--t", t, "Time parameter")->required();
    eval->add_option("--grid", grid_text, "n,L[,hbar] (default: reference grid)");

    auto* sweep = app.add_subcommand("sweep", "Per-cell CSV over states x t_values");
    sweep->add_option("--config", config_path, "Config file")->required();
    sweep->add_option("--out", out_path, "CSV file")->required();

    auto* scan = app.add_subcommand("scan", "Asymptotic scan CSV for the configured state");
    scan->add_option("--config", config_path, "Config file")->required();
    scan->add_option("--out", out_path, "CSV file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::string text;
    try {
        if (verify->parsed()) return cmd_verify(suite, config_path, out_path, format, no_timings, out, err);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path);
        if (scan->parsed()) return cmd_scan(config_path, out_path, out);
        text = expression_text(expr, expr_file);
        if (reduce->parsed()) return cmd_reduce(text, out);
        if (eval->parsed()) return cmd_eval(text, state_json, t, grid_text, out);
    } catch (const dsl::ParseError& e) {
        report_parse_error(err, text, e);
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace ulab::harness
