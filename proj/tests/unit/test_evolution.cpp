#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ulab/evolution.hpp"

using namespace ulab;

namespace {

StateSpec gauss(Vec3 p0, double sigma, std::optional<std::uint64_t> seed = {})
{
    StateSpec s;
    s.shape = GaussianParams{p0, sigma};
    s.seed = seed;
    return s;
}

double dist(const WaveFunction& a, const WaveFunction& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("free propagation is unitary with a group law")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = synthesize_state(g, gauss({2, -1, 0.5}, 0.5, 3));
    CHECK(dist(propagate_free(f, 0.0, 1.0), f) == 0.0);
    for (double t : {-3.0, 0.7, 5.0}) CHECK(std::abs(propagate_free(f, t, 1.0).norm() - 1.0) <= 1e-13);
    const WaveFunction two_steps = propagate_free(propagate_free(f, 0.4, 2.0), 1.1, 2.0);
    CHECK(dist(two_steps, propagate_free(f, 1.5, 2.0)) <= 1e-12);
    // result stays in the input representation
    const WaveFunction fx = transform(f, Representation::position);
    CHECK(propagate_free(fx, 0.3, 1.0).rep() == Representation::position);
    CHECK_THROWS_WITH_AS(propagate_free(f, 1.0, 0.0), "mass must be positive", std::invalid_argument);
}

TEST_CASE("time reversal mirrors the propagator")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = synthesize_state(g, gauss({1.5, 1, 0}, 0.5, 11));
    const WaveFunction lhs = propagate_free(time_reversed(f), -0.8, 1.0);
    const WaveFunction rhs = time_reversed(propagate_free(f, 0.8, 1.0));
    CHECK(dist(lhs, rhs) <= 1e-12);
}

TEST_CASE("heisenberg conjugation")
{
    const OperatorExpr x1 = build(op::Position{1});
    const OperatorExpr h = heisenberg_free(x1, 2.0, 4.0);
    CHECK(h.describe() == "Sum[x1, Compose[Scale(0.5), p1]]");
    CHECK(heisenberg_free(build(op::Momentum{2}), 2.0, 1.0).describe() == "p2");
}

TEST_CASE("heisenberg and lattice frames agree while the packet stays inside the box")
{
    const GridSpec g = build_grid(48, 24, 1);
    const WaveFunction f = synthesize_state(g, gauss({3.0, 0.5, 0}, 0.5));
    const double t = 0.5, m = 1.0;
    for (int j = 1; j <= 3; ++j) {
        const double a = velocity_residual(j, f, t, m, Frame::heisenberg);
        const double b = velocity_residual(j, f, t, m, Frame::lattice);
        CHECK(std::abs(a - b) <= 1e-8 * a);
    }
    const double ea = energy_sq_residual(f, t, m, Frame::heisenberg);
    const double eb = energy_sq_residual(f, t, m, Frame::lattice);
    CHECK(std::abs(ea - eb) <= 1e-7 * ea);
    CHECK(energy_sq_expectation(f, t, m, Frame::heisenberg) ==
          doctest::Approx(energy_sq_expectation(f, t, m, Frame::lattice)).epsilon(1e-8));
}

TEST_CASE("velocity residual equals its closed form")
{
    const GridSpec g = build_grid(48, 24, 1);
    const WaveFunction f = synthesize_state(g, gauss({3, 0, 0}, 0.5));
    for (int j = 1; j <= 3; ++j) {
        const double xf = apply(build(op::Position{j}), f).norm();
        for (double t : {4.0, -8.0, 64.0}) {
            const double v = velocity_residual(j, f, t, 1.0);
            CHECK(std::abs(v - xf / std::abs(t)) <= 1e-6 * v);
        }
        CHECK(velocity_residual(j, f, 8.0, 1.0) == doctest::Approx(0.5 * velocity_residual(j, f, 4.0, 1.0)).epsilon(1e-6));
    }
    CHECK_THROWS_WITH_AS(velocity_residual(1, f, 0.0, 1.0), "time parameter must be nonzero", std::invalid_argument);
}

TEST_CASE("energy asymptotics on the reference gaussian")
{
    const GridSpec g = build_grid(48, 24, 1);
    const WaveFunction f = synthesize_state(g, gauss({3, 0, 0}, 0.5));
    const ScanResult scan = asymptotic_scan(f, {4, 8, 16, 32, 64}, 1.0);
    REQUIRE(scan.rows.size() == 5);
    REQUIRE(scan.slope.has_value());
    CHECK(*scan.slope >= -1.15);
    CHECK(*scan.slope <= -0.85);
    CHECK(scan.rows[3].energy_sq_residual < scan.rows[0].energy_sq_residual);
    for (std::size_t k = 1; k < scan.rows.size(); ++k) {
        CHECK(scan.rows[k].energy_sq_residual <= 1.01 * scan.rows[k - 1].energy_sq_residual);
    }
    const double ratio = energy_sq_expectation(f, 64, 1.0) / hamiltonian_sq_expectation(f, 1.0);
    CHECK(std::abs(ratio - 1.0) <= 0.01);

    // mirrored scan of the conjugated state
    const ScanResult back = asymptotic_scan(time_reversed(f), {-4, -8, -16, -32, -64}, 1.0);
    for (std::size_t k = 0; k < scan.rows.size(); ++k) {
        CHECK(std::abs(back.rows[k].energy_sq_residual - scan.rows[k].energy_sq_residual) <= 1e-8);
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(back.rows[k].velocity_residual[j] - scan.rows[k].velocity_residual[j]) <= 1e-8);
        }
    }
}

TEST_CASE("hamiltonian square by quadrature")
{
    // |f|^2 gaussian with per-axis variance s^2/2 around p0:
    // <|p|^4> = |p0|^4 + 5 s^2 |p0|^2 + 15 s^4 / 4
    const GridSpec g = build_grid(48, 24, 1);
    const double s = 0.5;
    const WaveFunction f = synthesize_state(g, gauss({2, 0, 0}, s));
    const double p4 = 16 + 5 * s * s * 4 + 15 * s * s * s * s / 4;
    CHECK(hamiltonian_sq_expectation(f, 1.0) == doctest::Approx(p4 / 4).epsilon(1e-9));
}

TEST_CASE("scan preconditions and csv")
{
    const GridSpec g = build_grid(16, 10, 1);
    const WaveFunction f = synthesize_state(g, gauss({2, 0, 0}, 0.6));
    CHECK_THROWS_AS(asymptotic_scan(f, {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_scan(f, {1, -2}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_scan(f, {2, 1}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_scan(f, {0, 1}, 1.0), std::invalid_argument);

    const ScanResult one = asymptotic_scan(f, {3}, 1.0);
    CHECK_FALSE(one.slope.has_value());
    std::ostringstream os;
    write_scan_csv(os, one);
    const std::string text = os.str();
    CHECK(text.rfind("t,vres_1,vres_2,vres_3,closed_form_1,closed_form_2,closed_form_3,eres\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
