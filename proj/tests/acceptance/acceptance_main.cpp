// Acceptance run: two full verify passes over the shipped config, then one
// PASS/FAIL line per criterion computed from the report values.
//
// Criteria are judged on the measured values against their thresholds. The
// harness pass flag additionally requires domain compliance; the compliance
// count is printed next to each numeric line instead of being folded in.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ulab/harness.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Rows {
    std::vector<json> rows;

    std::vector<json> of(const std::string& check) const
    {
        std::vector<json> out;
        for (const json& r : rows) {
            if (r["check"] == check) out.push_back(r);
        }
        return out;
    }
};

bool under(const json& r) { return !r["value"].is_null() && r["value"].get<double>() <= r["threshold"].get<double>(); }
bool over(const json& r) { return !r["value"].is_null() && r["value"].get<double>() >= r["threshold"].get<double>(); }

double worst(const std::vector<json>& rs, bool larger_is_worse = true)
{
    double w = larger_is_worse ? 0.0 : INFINITY;
    for (const json& r : rs) {
        if (r["value"].is_null()) return NAN;
        const double v = r["value"].get<double>();
        w = larger_is_worse ? std::max(w, v) : std::min(w, v);
    }
    return w;
}

int failures = 0;

void line(int id, bool ok, const std::string& what)
{
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << std::endl;
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: ulab_acceptance <config.json> [scratch dir]\n";
        return 2;
    }
    const std::string config = argv[1];
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path();
    fs::create_directories(scratch);
    const fs::path out1 = scratch / "acceptance_run1.json", out2 = scratch / "acceptance_run2.json";

    std::ostringstream sink;
    int codes[2] = {0, 0};
    double minutes[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        codes[k] = ulab::harness::run_cli(
            {"verify", "--suite", "all", "--config", config, "--no-timings", "--out", (k ? out2 : out1).string()}, sink, std::cerr);
        minutes[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60;
        std::cerr << "run " << k + 1 << ": exit " << codes[k] << ", " << fmt(minutes[k]) << " min\n";
        if (codes[k] == 2) {
            std::cout << "FAIL  verify did not run (exit 2)\n";
            return 1;
        }
    }
    const std::string bytes1 = slurp(out1), bytes2 = slurp(out2);
    Rows r{json::parse(bytes1).get<std::vector<json>>()};

    std::set<std::string> noncompliant;
    std::size_t states = 0;
    for (const json& c : r.of("domain_compliance")) {
        ++states;
        if (!under(c)) noncompliant.insert(c["state"].get<std::string>());
    }
    auto flagged = [&](const std::vector<json>& rs) {
        std::size_t n = 0;
        for (const json& x : rs) n += noncompliant.count(x["state"].get<std::string>());
        return n;
    };
    auto tally = [&](const std::vector<json>& rs, const std::function<bool(const json&)>& ok, std::size_t& bad) {
        bad = 0;
        for (const json& x : rs) bad += !ok(x);
        return !rs.empty() && bad == 0;
    };

    // 1, 2: exact symbolic identities; timed separately since the suite run above is bundled
    {
        const auto cfg = ulab::harness::load_config(config);
        const auto t0 = std::chrono::steady_clock::now();
        const auto sym = ulab::harness::run_suite(cfg, ulab::harness::Suite::symbolic);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool sum_ok = false;
        for (const auto& s : sym) sum_ok |= s.check == "sum_commutator_exact" && s.pass;
        const auto rs = r.of("sum_commutator_exact");
        line(1, sum_ok && rs.size() == 1 && rs[0]["value"] == 0.0 && secs < 1.0,
             "sum_j [t_j, e_j] reduces to -i*hbar exactly (" + (rs.size() ? fmt(rs[0]["value"].get<double>()) : "no") +
                 " residual terms), symbolic suite " + fmt(secs) + " s");
    }
    {
        const auto rs = r.of("component_commutator_exact");
        std::size_t bad;
        const bool ok = tally(rs, under, bad) && rs.size() == 3;
        line(2, ok, "4 [t_j, e_j] = 2 hbar/i + 2 i hbar p_j^2 |p|^-2 exactly for " + std::to_string(rs.size() - bad) + "/" +
                        std::to_string(rs.size()) + " axes");
    }
    // 3: [x_j, |p|] residual and convergence
    {
        const auto rs = r.of("eq9_x_absp"), conv = r.of("eq9_convergence");
        std::size_t bad, bad_conv;
        const bool ok = tally(rs, under, bad) & tally(conv, under, bad_conv);
        line(3, ok && rs.size() == 3 * states,
             "[x_j,|p|] residual <= 1e-6 on " + std::to_string(rs.size() - bad) + "/" + std::to_string(rs.size()) +
                 " (state, j), worst " + fmt(worst(rs)) + "; convergence holds on " + std::to_string(conv.size() - bad_conv) + "/" +
                 std::to_string(conv.size()) + "; " + std::to_string(noncompliant.size()) + "/" + std::to_string(states) +
                 " states non-compliant");
    }
    // 4: numeric sum rule
    {
        const auto rs = r.of("sum_commutator");
        std::size_t bad;
        const bool ok = tally(rs, under, bad);
        line(4, ok, "sum rule residual <= 1e-6 on " + std::to_string(rs.size() - bad) + "/" + std::to_string(rs.size()) +
                        " cells, worst " + fmt(worst(rs)) + " (" + std::to_string(flagged(rs)) + " cells on non-compliant states)");
    }
    // 5: the bound on every grid; threshold already carries hbar/2 (1 - 1e-8)
    {
        const auto rs = r.of("uncertainty_product");
        std::size_t bad;
        const bool ok = tally(rs, over, bad);
        std::set<double> hbars;
        double margin = INFINITY;
        for (const json& x : rs) {
            hbars.insert(x["params"]["grid"]["hbar"].get<double>());
            if (!x["value"].is_null()) margin = std::min(margin, x["value"].get<double>() / x["threshold"].get<double>());
        }
        line(5, ok && hbars.count(1.0) && hbars.count(0.5),
             "dT dE >= hbar/2 (1 - 1e-8) on " + std::to_string(rs.size() - bad) + "/" + std::to_string(rs.size()) + " cells over " +
                 std::to_string(hbars.size()) + " values of hbar, min product/threshold " + fmt(margin) + " (" +
                 std::to_string(flagged(rs)) + " cells on non-compliant states)");
    }
    // 6
    {
        const auto rs = r.of("eq5_time_norm");
        std::size_t bad;
        const bool ok = tally(rs, under, bad);
        line(6, ok, "|<sum t_j^2> - t^2| <= 1e-10 on " + std::to_string(rs.size() - bad) + "/" + std::to_string(rs.size()) +
                        " cells, worst " + fmt(worst(rs)) + " (" + std::to_string(flagged(rs)) + " on non-compliant states)");
    }
    // 7
    {
        const auto rs = r.of("product_t_invariance");
        std::size_t bad;
        const bool ok = tally(rs, under, bad);
        line(7, ok, "max_t - min_t of dT dE <= 1e-9 for " + std::to_string(rs.size() - bad) + "/" + std::to_string(rs.size()) +
                        " (state, grid), worst " + fmt(worst(rs)));
    }
    // 8
    {
        const auto rs = r.of("velocity_closed_form");
        std::size_t bad;
        const bool ok = tally(rs, under, bad);
        line(8, ok, "velocity residual = ||x_j f||/|t| within 1e-6 relative on " + std::to_string(rs.size() - bad) + "/" +
                        std::to_string(rs.size()) + " (t, j), worst " + fmt(worst(rs)));
    }
    // 9
    {
        const auto slope = r.of("energy_sq_slope"), expect = r.of("energy_expectation");
        std::size_t b1, b2;
        const bool ok = tally(slope, under, b1) & tally(expect, under, b2);
        line(9, ok, "|slope + 1| = " + fmt(worst(slope)) + " (<= 0.15), <sum e_j^2> vs <H^2> at the last t off by " +
                        fmt(worst(expect)) + " (<= 0.01)");
    }
    // 10
    {
        const auto rt = r.of("dsl_roundtrip"), po = r.of("dsl_paper_ops"), se = r.of("dsl_semantic");
        const auto dsl = ulab::harness::load_config(config).dsl;
        std::size_t b1, b2, b3;
        const bool ok = tally(rt, under, b1) & tally(po, under, b2) & tally(se, under, b3);
        line(10, ok, "round trip failures " + fmt(worst(rt)) + ", time/energy text mismatches " + fmt(worst(po)) +
                         " over " + std::to_string(dsl.roundtrip_cases) + " cases, worst semantic gap " + fmt(worst(se)) + " over " +
                         std::to_string(dsl.semantic_cases) + " expressions");
    }
    // 11
    {
        const bool same = !bytes1.empty() && bytes1 == bytes2;
        line(11, same && codes[0] == 0 && codes[1] == 0,
             std::string("reports ") + (same ? "byte-identical" : "DIFFER") + " across two runs (" +
                 std::to_string(bytes1.size()) + " bytes), exit codes " + std::to_string(codes[0]) + "," +
                 std::to_string(codes[1]) + ", " + fmt(minutes[0]) + " min per run");
    }

    std::cout << (failures ? std::to_string(failures) + " of 11 criteria failed" : "all 11 criteria passed") << std::endl;
    return failures ? 1 : 0;
}
