#include "ulab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "ulab/evolution.hpp"
#include "ulab/opdsl.hpp"
#include "ulab/parallel.hpp"
#include "ulab/symbolic.hpp"

namespace ulab::harness {
namespace {

using nlohmann::json;

class Stopwatch {
public:
    double ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_ = Clock::now();
};

// --- config ------------------------------------------------------------------------

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

double number(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(where + ": '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

const json& object(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j.at(key).is_object()) throw ConfigError(where + ": '" + key + "' must be an object");
    return j.at(key);
}

GridSpec grid_from_json(const json& j, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    reject_unknown(j, {"n", "L", "hbar"}, where);
    if (!j.contains("n") || !j.at("n").is_number_integer()) throw ConfigError(where + ": 'n' must be an integer");
    const double hbar = j.contains("hbar") ? number(j, "hbar", where) : 1.0;
    try {
        return build_grid(j.at("n").get<int>(), number(j, "L", where), hbar);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

StateSpec state_from_json(const json& j, const std::string& where)
{
    try {
        return j.get<StateSpec>();
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::vector<double> times_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(where + " must contain numbers");
        const double t = v.get<double>();
        if (t == 0.0 || !std::isfinite(t)) throw ConfigError(where + ": time parameter must be nonzero");
        out.push_back(t);
    }
    return out;
}

void tolerances_from_json(const json& j, Tolerances& tol)
{
    const std::map<std::string, double*> fields{
        {"eq5_time_norm", &tol.residual.eq5_time_norm},
        {"eq9_x_absp", &tol.residual.eq9_x_absp},
        {"component_commutator", &tol.residual.component_commutator},
        {"sum_commutator", &tol.residual.sum_commutator},
        {"schwarz_chain", &tol.residual.schwarz_chain},
        {"uncertainty_product", &tol.uncertainty_product},
        {"product_t_invariance", &tol.product_t_invariance},
        {"imag_leak", &tol.imag_leak},
        {"velocity_closed_form", &tol.velocity_closed_form},
        {"energy_sq_slope", &tol.energy_sq_slope},
        {"energy_sq_monotone", &tol.energy_sq_monotone},
        {"energy_expectation", &tol.energy_expectation},
        {"time_reversal", &tol.time_reversal},
        {"dsl_semantic", &tol.dsl_semantic},
    };
    if (!j.is_object()) throw ConfigError("tolerances must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto f = fields.find(it.key());
        if (f == fields.end()) throw ConfigError("tolerances: unknown check '" + it.key() + "'");
        if (!it.value().is_number() || !(it.value().get<double>() >= 0.0)) {
            throw ConfigError("tolerances: '" + it.key() + "' must be a nonnegative number");
        }
        *f->second = it.value().get<double>();
    }
}

// --- report helpers ----------------------------------------------------------------

struct ReportBuilder {
    const char* suite;
    std::vector<CheckReport>* out;

    // pass: value <= threshold (and any extra condition)
    void le(const std::string& check, const std::string& state, CheckParams params, double value, double threshold,
            double wall_ms, bool extra = true) const
    {
        out->push_back({suite, check, state, std::move(params), value, threshold,
                        extra && value <= threshold, wall_ms});
    }
};

CheckParams grid_params(const GridSpec& g)
{
    CheckParams p;
    p.grid = g;
    return p;
}

WaveFunction synthesize_or_throw(const GridSpec& g, const StateSpec& s)
{
    try {
        return synthesize_state(g, s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("state " + s.describe() + " on grid (" + std::to_string(g.n) + ", " +
                          std::to_string(g.box_length) + ", " + std::to_string(g.hbar) + "): " + e.what());
    }
}

std::size_t term_count(const symbolic::NCPoly& p) { return p.terms().size(); }

// --- cells -------------------------------------------------------------------------

struct Cell {
    CellEvaluation eval;
    double wall_ms = 0.0;
};

// evaluate_cell for every (state, t) on the main grid, states-major.
std::vector<Cell> main_cells(const RunConfig& c)
{
    const std::size_t nt = c.t_values.size();
    return parallel_map(c.states.size() * nt, [&](std::size_t k) {
        Stopwatch sw;
        const WaveFunction f = synthesize_or_throw(c.grid, c.states[k / nt]);
        Cell cell{evaluate_cell(f, c.t_values[k % nt], c.tolerances.residual, c.tolerances.uncertainty_product,
                                c.compliance),
                  0.0};
        cell.wall_ms = sw.ms();
        return cell;
    });
}

class Context {
public:
    explicit Context(const RunConfig& c) : config(c) {}

    const std::vector<Cell>& cells()
    {
        if (!cells_) cells_ = main_cells(config);
        return *cells_;
    }

    const RunConfig& config;

private:
    std::optional<std::vector<Cell>> cells_;
};

// --- suites ------------------------------------------------------------------------

void commutators_suite(Context& ctx, std::vector<CheckReport>& out)
{
    const RunConfig& c = ctx.config;
    const ReportBuilder rb{"commutators", &out};
    const GridSpec coarse = build_grid(c.grid.n / 2, c.grid.box_length / 2, c.grid.hbar);

    struct StateLevel {
        ComplianceReport compliance;
        std::array<double, 3> x_absp{};
        std::array<double, 3> x_absp_coarse{};
        double wall_ms = 0.0;
    };
    const auto levels = parallel_map(c.states.size(), [&](std::size_t s) {
        Stopwatch sw;
        StateLevel lvl;
        const WaveFunction f = synthesize_or_throw(c.grid, c.states[s]);
        const WaveFunction g = synthesize_or_throw(coarse, c.states[s]);
        lvl.compliance = domain_compliance(f, c.compliance);
        for (int j = 1; j <= 3; ++j) {
            lvl.x_absp[j - 1] = residual(CheckId::eq9_x_absp, f, 1.0, j, c.tolerances.residual).value;
            lvl.x_absp_coarse[j - 1] = residual(CheckId::eq9_x_absp, g, 1.0, j, c.tolerances.residual).value;
        }
        lvl.wall_ms = sw.ms();
        return lvl;
    });
    const auto& cells = ctx.cells();

    for (std::size_t s = 0; s < c.states.size(); ++s) {
        const std::string name = c.states[s].describe();
        const StateLevel& lvl = levels[s];
        const bool ok = lvl.compliance.compliant;
        rb.le("domain_compliance", name, grid_params(c.grid),
              std::max(lvl.compliance.mass_near_zero, lvl.compliance.mass_at_edges), c.compliance.edge_tol,
              lvl.wall_ms, ok);
        for (int j = 1; j <= 3; ++j) {
            CheckParams p = grid_params(c.grid);
            p.j = j;
            rb.le("eq9_x_absp", name, p, lvl.x_absp[j - 1], c.tolerances.residual.eq9_x_absp, lvl.wall_ms, ok);
        }
        // Same spacing, half the box: the residual must not grow with the box.
        for (int j = 1; j <= 3; ++j) {
            CheckParams p = grid_params(c.grid);
            p.j = j;
            rb.le("eq9_convergence", name, p, lvl.x_absp[j - 1], lvl.x_absp_coarse[j - 1], lvl.wall_ms, ok);
        }
        for (std::size_t k = 0; k < c.t_values.size(); ++k) {
            const Cell& cell = cells[s * c.t_values.size() + k];
            for (const ResidualCheck& r : cell.eval.residuals) {
                CheckParams p = grid_params(c.grid);
                p.t = c.t_values[k];
                if (has_axis(r.id)) p.j = r.axis;
                rb.le(to_string(r.id), name, p, r.value, r.threshold, cell.wall_ms, cell.eval.uncertainty.compliant);
            }
        }
    }
}

void uncertainty_block(const RunConfig& c, const GridSpec& grid, const std::vector<UncertaintyResult>& results,
                       const std::vector<double>& wall, std::vector<CheckReport>& out)
{
    const std::size_t nt = c.t_values.size();
    for (std::size_t s = 0; s < c.states.size(); ++s) {
        const std::string name = c.states[s].describe();
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        bool compliant = true;
        double state_ms = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const UncertaintyResult& r = results[s * nt + k];
            CheckParams p = grid_params(grid);
            p.t = c.t_values[k];
            const double threshold = r.bound * (1.0 - c.tolerances.uncertainty_product);
            out.push_back({"uncertainty", "uncertainty_product", name, p, r.product, threshold,
                           r.compliant && r.product >= threshold, wall[s * nt + k]});
            out.push_back({"uncertainty", "imag_leak", name, p, r.max_imag_leak, c.tolerances.imag_leak,
                           r.compliant && r.max_imag_leak <= c.tolerances.imag_leak, wall[s * nt + k]});
            lo = std::min(lo, r.product);
            hi = std::max(hi, r.product);
            compliant = compliant && r.compliant;
            state_ms += wall[s * nt + k];
        }
        out.push_back({"uncertainty", "product_t_invariance", name, grid_params(grid), hi - lo,
                       c.tolerances.product_t_invariance, compliant && hi - lo <= c.tolerances.product_t_invariance,
                       state_ms});
    }
}

void uncertainty_suite(Context& ctx, std::vector<CheckReport>& out)
{
    const RunConfig& c = ctx.config;
    {
        std::vector<UncertaintyResult> results;
        std::vector<double> wall;
        for (const Cell& cell : ctx.cells()) {
            results.push_back(cell.eval.uncertainty);
            wall.push_back(cell.wall_ms);
        }
        uncertainty_block(c, c.grid, results, wall, out);
    }
    const std::size_t nt = c.t_values.size();
    for (const GridSpec& grid : c.uncertainty_grids) {
        auto timed = parallel_map(c.states.size() * nt, [&](std::size_t k) {
            Stopwatch sw;
            const WaveFunction f = synthesize_or_throw(grid, c.states[k / nt]);
            UncertaintyResult r = uncertainty_check(f, c.t_values[k % nt], c.tolerances.uncertainty_product, c.compliance);
            return std::make_pair(r, sw.ms());
        });
        std::vector<UncertaintyResult> results;
        std::vector<double> wall;
        for (auto& [r, ms] : timed) {
            results.push_back(r);
            wall.push_back(ms);
        }
        uncertainty_block(c, grid, results, wall, out);
    }
}

void asymptotics_suite(Context& ctx, std::vector<CheckReport>& out)
{
    const RunConfig& c = ctx.config;
    const ReportBuilder rb{"asymptotics", &out};
    const auto& a = c.asymptotics;
    const std::string name = a.state.describe();
    Stopwatch sw;
    const WaveFunction f = synthesize_or_throw(c.grid, a.state);
    ScanResult scan;
    try {
        scan = asymptotic_scan(f, a.t_list, c.mass);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("asymptotics: ") + e.what());
    }
    const double scan_ms = sw.ms();
    const double per_row = scan_ms / static_cast<double>(scan.rows.size());
    const bool compliant = domain_compliance(f, c.compliance).compliant;

    auto params = [&](std::optional<double> t, std::optional<int> j) {
        CheckParams p = grid_params(c.grid);
        p.t = t;
        p.j = j;
        p.m = c.mass;
        return p;
    };

    for (const auto& row : scan.rows) {
        for (int j = 1; j <= 3; ++j) {
            const double cf = row.closed_form_velocity[j - 1];
            const double rel = std::abs(row.velocity_residual[j - 1] - cf) / cf;
            rb.le("velocity_closed_form", name, params(row.t, j), rel, c.tolerances.velocity_closed_form, per_row,
                  compliant);
        }
    }

    const double slope_err = scan.slope ? std::abs(*scan.slope + 1.0) : std::numeric_limits<double>::quiet_NaN();
    rb.le("energy_sq_slope", name, params(std::nullopt, std::nullopt), slope_err, c.tolerances.energy_sq_slope,
          scan_ms, compliant);

    double rise = 0.0;
    for (std::size_t k = 1; k < scan.rows.size(); ++k) {
        rise = std::max(rise, scan.rows[k].energy_sq_residual / scan.rows[k - 1].energy_sq_residual - 1.0);
    }
    rb.le("energy_sq_monotone", name, params(std::nullopt, std::nullopt), rise, c.tolerances.energy_sq_monotone,
          scan_ms, compliant);

    {
        Stopwatch esw;
        const double t_last = a.t_list.back();
        const double e2 = energy_sq_expectation(f, t_last, c.mass);
        const double h2 = hamiltonian_sq_expectation(f, c.mass);
        rb.le("energy_expectation", name, params(t_last, std::nullopt), std::abs(e2 / h2 - 1.0),
              c.tolerances.energy_expectation, esw.ms(), compliant);
    }

    {
        // Free evolution commutes with time reversal up to t -> -t, so the
        // mirrored scan of the conjugated state must reproduce every residual.
        Stopwatch tsw;
        const WaveFunction fr = time_reversed(f);
        std::vector<double> mirrored;
        for (double t : a.t_list) mirrored.push_back(-t);
        const ScanResult back = asymptotic_scan(fr, mirrored, c.mass);
        double dev = 0.0;
        for (std::size_t k = 0; k < scan.rows.size(); ++k) {
            dev = std::max(dev, std::abs(back.rows[k].energy_sq_residual - scan.rows[k].energy_sq_residual));
            for (int j = 0; j < 3; ++j) {
                dev = std::max(dev, std::abs(back.rows[k].velocity_residual[j] - scan.rows[k].velocity_residual[j]));
            }
        }
        rb.le("time_reversal", name, params(std::nullopt, std::nullopt), dev, c.tolerances.time_reversal, tsw.ms(),
              compliant);
    }
}

void symbolic_suite(std::vector<CheckReport>& out)
{
    using namespace symbolic;
    const ReportBuilder rb{"symbolic", &out};
    const std::string name = "symbolic";
    const NCPoly hbar_over_i = NCPoly::scalar(GaussianRational(0, -1), 1, 0);

    {
        Stopwatch sw;
        const NCPoly sum = sum_over_axes([](int j) {
            const PaperOps o = build_paper_ops(j);
            return commutator(o.time, o.energy);
        });
        const double ms = sw.ms();
        rb.le("sum_commutator_exact", name, {}, static_cast<double>(term_count(sum - hbar_over_i)), 0.0, ms);
    }
    for (int j = 1; j <= 3; ++j) {
        Stopwatch sw;
        const PaperOps o = build_paper_ops(j);
        const NCPoly c = commutator(o.time, o.energy);
        NCMonomial pj2;
        pj2.coeff = Coefficient{GaussianRational(0, 2), 1, 0};
        pj2.p_exp[j - 1] = 2;
        pj2.r_pow = -2;
        const NCPoly target = NCPoly::scalar(GaussianRational(0, -2), 1, 0) + NCPoly::monomial(pj2);
        const NCPoly four_c = Coefficient{GaussianRational(4), 0, 0} * c;
        const double ms = sw.ms();
        CheckParams p;
        p.j = j;
        rb.le("component_commutator_exact", name, p, static_cast<double>(term_count(four_c - target)), 0.0, ms);

        std::size_t t_terms = 0;
        for (const auto& m : c.terms()) t_terms += m.coeff.t_pow != 0;
        rb.le("commutator_t_free", name, p, static_cast<double>(t_terms), 0.0, ms);

        Stopwatch sw9;
        const NCPoly x_absp = commutator(NCPoly::x(j), NCPoly::r(1));
        NCMonomial rhs;
        rhs.coeff = Coefficient{GaussianRational(0, 1), 1, 0};
        rhs.p_exp[j - 1] = 1;
        rhs.r_pow = -1;
        rb.le("eq9_exact", name, p, static_cast<double>(term_count(x_absp - NCPoly::monomial(rhs))), 0.0, sw9.ms());
    }
}

double relative_gap(const WaveFunction& a, const WaveFunction& b, const WaveFunction& f)
{
    // Floor at ‖f‖ so an expression that lowers to 0 compares absolutely.
    const double scale = std::max({a.norm(), b.norm(), f.norm()});
    return (a - b).norm() / scale;
}

void dsl_suite(Context& ctx, std::vector<CheckReport>& out)
{
    const RunConfig& c = ctx.config;
    const DslConfig& d = c.dsl;
    const ReportBuilder rb{"dsl", &out};

    {
        Stopwatch sw;
        std::mt19937_64 rng(d.seed);
        int failures = 0;
        for (int k = 0; k < d.roundtrip_cases; ++k) {
            const dsl::Ast a = dsl::random_ast(rng, 5);
            const std::string text = dsl::format(a);
            try {
                const dsl::Ast back = dsl::parse(text);
                if (!(back == a) || dsl::format(back) != text) ++failures;
            } catch (const dsl::ParseError&) {
                ++failures;
            }
        }
        rb.le("dsl_roundtrip", "dsl", {}, failures, 0.0, sw.ms());
    }

    {
        Stopwatch sw;
        int mismatches = 0;
        for (int j = 1; j <= 3; ++j) {
            const std::string js = std::to_string(j);
            const auto ops = symbolic::build_paper_ops(j);
            if (!(dsl::lower(dsl::parse("t * p" + js + " * |p|^-1")) == ops.time)) ++mismatches;
            if (!(dsl::lower(dsl::parse("1/4 * t^-1 * (|p|*x" + js + " + x" + js + "*|p|)")) == ops.energy)) {
                ++mismatches;
            }
        }
        rb.le("dsl_paper_ops", "dsl", {}, mismatches, 0.0, sw.ms());
    }

    {
        Stopwatch sw;
        const WaveFunction f = synthesize_or_throw(d.grid, d.state);
        // Expressions are drawn serially so the sequence depends only on the seed.
        std::mt19937_64 rng(d.seed ^ 0x5eed5eedULL);
        std::vector<dsl::Ast> cases;
        for (int k = 0; k < d.semantic_cases; ++k) cases.push_back(dsl::random_numeric_ast(rng));
        const auto gaps = parallel_map(cases.size(), [&](std::size_t k) {
            const dsl::Ast normal = dsl::parse(symbolic::to_string(dsl::lower(cases[k])));
            const WaveFunction a = apply(dsl::compile(cases[k], d.grid, d.t), f);
            const WaveFunction b = apply(dsl::compile(normal, d.grid, d.t), f);
            return relative_gap(a, b, f);
        });
        const double worst = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
        CheckParams p = grid_params(d.grid);
        p.t = d.t;
        rb.le("dsl_semantic", d.state.describe(), p, worst, c.tolerances.dsl_semantic, sw.ms(),
              domain_compliance(f, c.compliance).compliant);
    }
}

void run_one(Context& ctx, Suite s, std::vector<CheckReport>& out)
{
    switch (s) {
        case Suite::commutators: commutators_suite(ctx, out); break;
        case Suite::uncertainty: uncertainty_suite(ctx, out); break;
        case Suite::asymptotics: asymptotics_suite(ctx, out); break;
        case Suite::symbolic: symbolic_suite(out); break;
        case Suite::dsl: dsl_suite(ctx, out); break;
        case Suite::all:
            for (Suite each : {Suite::commutators, Suite::uncertainty, Suite::asymptotics, Suite::symbolic, Suite::dsl}) {
                run_one(ctx, each, out);
            }
            break;
    }
}

nlohmann::ordered_json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string csv_number(double v)
{
    if (!std::isfinite(v)) return "";
    return json(v).dump();  // shortest round-trip text, same as the JSON report
}

}  // namespace

const char* to_string(Suite s)
{
    switch (s) {
        case Suite::commutators: return "commutators";
        case Suite::uncertainty: return "uncertainty";
        case Suite::asymptotics: return "asymptotics";
        case Suite::symbolic: return "symbolic";
        case Suite::dsl: return "dsl";
        case Suite::all: return "all";
    }
    return "?";
}

Suite parse_suite(const std::string& name)
{
    for (Suite s : {Suite::commutators, Suite::uncertainty, Suite::asymptotics, Suite::symbolic, Suite::dsl, Suite::all}) {
        if (name == to_string(s)) return s;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

RunConfig config_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"schema", "grid", "uncertainty_grids", "states", "t_values", "mass", "tolerances", "compliance",
                    "asymptotics", "dsl", "suites", "output"},
                   "config");
    if (!j.contains("schema") || j.at("schema") != 1) throw ConfigError("config: 'schema' must be 1");

    RunConfig c;
    if (!j.contains("grid")) throw ConfigError("config: missing 'grid'");
    c.grid = grid_from_json(j.at("grid"), "grid");
    if (j.contains("uncertainty_grids")) {
        if (!j.at("uncertainty_grids").is_array()) throw ConfigError("uncertainty_grids must be an array");
        for (const auto& g : j.at("uncertainty_grids")) c.uncertainty_grids.push_back(grid_from_json(g, "uncertainty_grids[]"));
    }

    if (!j.contains("states") || !j.at("states").is_array()) throw ConfigError("config: 'states' must be an array");
    if (j.at("states").empty()) throw ConfigError("no states configured");
    for (std::size_t k = 0; k < j.at("states").size(); ++k) {
        c.states.push_back(state_from_json(j.at("states")[k], "states[" + std::to_string(k) + "]"));
    }
    if (!j.contains("t_values")) throw ConfigError("config: missing 't_values'");
    c.t_values = times_from_json(j.at("t_values"), "t_values");
    if (j.contains("mass")) c.mass = number(j, "mass", "config");
    if (!(c.mass > 0.0) || !std::isfinite(c.mass)) throw ConfigError("config: mass must be positive");
    if (j.contains("tolerances")) tolerances_from_json(j.at("tolerances"), c.tolerances);

    if (j.contains("compliance")) {
        const json& cj = object(j, "compliance", "config");
        reject_unknown(cj, {"p_min", "edge_tol"}, "compliance");
        if (cj.contains("p_min")) c.compliance.p_min = number(cj, "p_min", "compliance");
        if (cj.contains("edge_tol")) c.compliance.edge_tol = number(cj, "edge_tol", "compliance");
    }

    if (!j.contains("asymptotics")) throw ConfigError("config: missing 'asymptotics'");
    {
        const json& aj = object(j, "asymptotics", "config");
        reject_unknown(aj, {"state", "t_list"}, "asymptotics");
        if (!aj.contains("state")) throw ConfigError("asymptotics: missing 'state'");
        c.asymptotics.state = state_from_json(aj.at("state"), "asymptotics.state");
        if (!aj.contains("t_list")) throw ConfigError("asymptotics: missing 't_list'");
        c.asymptotics.t_list = times_from_json(aj.at("t_list"), "asymptotics.t_list");
    }

    if (!j.contains("dsl")) throw ConfigError("config: missing 'dsl'");
    {
        const json& dj = object(j, "dsl", "config");
        reject_unknown(dj, {"seed", "roundtrip_cases", "semantic_cases", "t", "state", "grid"}, "dsl");
        if (dj.contains("seed")) {
            if (!dj.at("seed").is_number_unsigned()) throw ConfigError("dsl: 'seed' must be a non-negative integer");
            c.dsl.seed = dj.at("seed").get<std::uint64_t>();
        }
        for (auto [key, field] : {std::pair{"roundtrip_cases", &c.dsl.roundtrip_cases},
                                  std::pair{"semantic_cases", &c.dsl.semantic_cases}}) {
            if (!dj.contains(key)) continue;
            if (!dj.at(key).is_number_integer() || dj.at(key).get<int>() < 0) {
                throw ConfigError(std::string("dsl: '") + key + "' must be a non-negative integer");
            }
            *field = dj.at(key).get<int>();
        }
        if (dj.contains("t")) c.dsl.t = number(dj, "t", "dsl");
        if (c.dsl.t == 0.0 || !std::isfinite(c.dsl.t)) throw ConfigError("dsl: time parameter must be nonzero");
        if (!dj.contains("state")) throw ConfigError("dsl: missing 'state'");
        c.dsl.state = state_from_json(dj.at("state"), "dsl.state");
        c.dsl.grid = dj.contains("grid") ? grid_from_json(dj.at("grid"), "dsl.grid") : c.grid;
    }

    if (j.contains("suites")) {
        if (!j.at("suites").is_array() || j.at("suites").empty()) throw ConfigError("suites must be a nonempty array");
        c.suites.clear();
        for (const auto& s : j.at("suites")) {
            if (!s.is_string()) throw ConfigError("suites must contain strings");
            c.suites.push_back(parse_suite(s.get<std::string>()));
        }
    }
    if (j.contains("output")) {
        const json& oj = object(j, "output", "config");
        reject_unknown(oj, {"path", "format"}, "output");
        if (oj.contains("path")) c.output_path = oj.at("path").get<std::string>();
        if (oj.contains("format")) {
            const std::string fmt = oj.at("format").get<std::string>();
            if (fmt == "json") c.output_format = ReportFormat::json;
            else if (fmt == "csv") c.output_format = ReportFormat::csv;
            else throw ConfigError("output: format must be json or csv");
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<CheckReport> run_suite(const RunConfig& config, Suite suite)
{
    if (config.states.empty()) throw ConfigError("no states configured");
    Context ctx(config);
    std::vector<CheckReport> out;
    run_one(ctx, suite, out);
    return out;
}

bool all_pass(const std::vector<CheckReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

nlohmann::ordered_json reports_to_json(const std::vector<CheckReport>& reports, bool timings)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        if (r.params.t) params["t"] = *r.params.t;
        if (r.params.j) params["j"] = *r.params.j;
        if (r.params.m) params["m"] = *r.params.m;
        if (r.params.grid) {
            params["grid"] = nlohmann::ordered_json{{"n", r.params.grid->n}, {"L", r.params.grid->box_length}, {"hbar", r.params.grid->hbar}};
        }
        arr.push_back(nlohmann::ordered_json{{"suite", r.suite},
                       {"check", r.check},
                       {"state", r.state},
                       {"params", params},
                       {"value", number_or_null(r.value)},
                       {"threshold", number_or_null(r.threshold)},
                       {"pass", r.pass},
                       {"wall_ms", timings ? number_or_null(r.wall_ms) : nlohmann::ordered_json(nullptr)}});
    }
    return arr;
}

void write_json(std::ostream& out, const std::vector<CheckReport>& reports, bool timings)
{
    out << reports_to_json(reports, timings).dump(2) << '\n';
}

void write_csv(std::ostream& out, const std::vector<CheckReport>& reports)
{
    out << "suite,check,state,t,j,value,threshold,pass\n";
    for (const auto& r : reports) {
        out << csv_field(r.suite) << ',' << csv_field(r.check) << ',' << csv_field(r.state) << ','
            << (r.params.t ? csv_number(*r.params.t) : "") << ',' << (r.params.j ? std::to_string(*r.params.j) : "")
            << ',' << csv_number(r.value) << ',' << csv_number(r.threshold) << ',' << (r.pass ? "true" : "false")
            << '\n';
    }
}

bool write_sweep_csv(std::ostream& out, const RunConfig& config)
{
    if (config.states.empty()) throw ConfigError("no states configured");
    const auto cells = main_cells(config);
    out << "state,t,delta_T,delta_E,product,bound,margin,eq5_time_norm,component_commutator_1,"
           "component_commutator_2,component_commutator_3,sum_commutator,schwarz_chain,compliant,pass\n";
    bool ok = true;
    const std::size_t nt = config.t_values.size();
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const CellEvaluation& e = cells[k].eval;
        const UncertaintyResult& u = e.uncertainty;
        bool pass = u.pass && u.compliant;
        out << csv_field(config.states[k / nt].describe()) << ',' << csv_number(config.t_values[k % nt]) << ','
            << csv_number(u.delta_T) << ',' << csv_number(u.delta_E) << ',' << csv_number(u.product) << ','
            << csv_number(u.bound) << ',' << csv_number(u.margin);
        for (const ResidualCheck& r : e.residuals) {
            out << ',' << csv_number(r.value);
            pass = pass && r.pass;
        }
        out << ',' << (u.compliant ? "true" : "false") << ',' << (pass ? "true" : "false") << '\n';
        ok = ok && pass;
    }
    return ok;
}

}  // namespace ulab::harness
