#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ulab/statistics.hpp"

using namespace ulab;

namespace {

StateSpec gauss(Vec3 p0, double sigma, std::optional<std::uint64_t> seed = {})
{
    StateSpec s;
    s.shape = GaussianParams{p0, sigma};
    s.seed = seed;
    return s;
}

StateSpec shell(double r_in, double r_out, std::optional<std::uint64_t> seed = {})
{
    StateSpec s;
    s.shape = AnnularBumpParams{r_in, r_out};
    s.seed = seed;
    return s;
}

// Midpoint rule for  int 2 p1/|p| (pi s^2)^{-3/2} exp(-|p - p0|^2 / s^2) dp  over a box
// holding the gaussian, 128 points per axis.
double time_expectation_oracle(Vec3 p0, double sigma, double t)
{
    constexpr int n = 128;
    const double half = 6.0 * sigma;
    const double h = 2 * half / n;
    const double norm = std::pow(std::numbers::pi * sigma * sigma, -1.5);
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        const double p1 = p0[0] - half + (a + 0.5) * h;
        for (int b = 0; b < n; ++b) {
            const double p2 = p0[1] - half + (b + 0.5) * h;
            for (int c = 0; c < n; ++c) {
                const double p3 = p0[2] - half + (c + 0.5) * h;
                const double d2 = (p1 - p0[0]) * (p1 - p0[0]) + (p2 - p0[1]) * (p2 - p0[1]) + (p3 - p0[2]) * (p3 - p0[2]);
                acc += t * p1 / std::sqrt(p1 * p1 + p2 * p2 + p3 * p3) * norm * std::exp(-d2 / (sigma * sigma));
            }
        }
    }
    return acc * h * h * h;
}

}  // namespace

TEST_CASE("expectation requires a unit state")
{
    const GridSpec g = build_grid(16, 10, 1);
    const WaveFunction f = synthesize_state(g, shell(1, 4));
    CHECK_THROWS_AS(expectation(build(op::Momentum{1}), cplx(2.0, 0.0) * f), std::invalid_argument);
}

TEST_CASE("parity zeros")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction even = synthesize_state(g, shell(1, 4));  // radial and real: even in p
    const Expectation t2 = expectation(build(op::Time{2, 1.5}), even);
    CHECK(std::abs(t2.value) <= 1e-10);
    // even in x; the box must hold the packet since x_0 = -L/2 has no mirror point
    const GridSpec wide = build_grid(48, 24, 1);
    const Expectation e1 = expectation(build(op::Energy{1, 1.5}), synthesize_state(wide, gauss({0, 0, 0}, 0.7)));
    CHECK(std::abs(e1.value) <= 1e-8);
    CHECK(e1.imag_leak <= 1e-8);
}

TEST_CASE("time expectation against an independent quadrature")
{
    const GridSpec g = build_grid(48, 20, 1);
    const Vec3 p0{3, 0, 0};
    const WaveFunction f = synthesize_state(g, gauss(p0, 0.5));
    const Expectation e = expectation(build(op::Time{1, 2.0}), f);
    const double oracle = time_expectation_oracle(p0, 0.5, 2.0);
    CHECK(std::abs(e.value - oracle) <= 1e-6 * std::abs(oracle));
    CHECK(e.imag_leak <= 1e-12);
}

TEST_CASE("uncertainty bound and t symmetry")
{
    const GridSpec g = build_grid(32, 16, 1);
    for (const StateSpec& s : {gauss({2.5, 0.5, 0}, 0.45), shell(1, 4.5, 4), gauss({0, -2, 2}, 0.5, 8)}) {
        CAPTURE(s.describe());
        const WaveFunction f = synthesize_state(g, s);
        const UncertaintyResult r = uncertainty_check(f, 1.0);
        CHECK(r.pass);
        CHECK(r.product >= 0.5 * (1 - 1e-8));
        CHECK(r.bound == 0.5);
        CHECK(r.margin == doctest::Approx(r.product - 0.5));
        const UncertaintyResult m = uncertainty_check(f, -1.0);
        CHECK(std::abs(m.delta_T - r.delta_T) <= 1e-12 * r.delta_T);
        CHECK(std::abs(m.product - r.product) <= 1e-12 * r.product);
    }
}

TEST_CASE("scale laws and t invariance of the product")
{
    const GridSpec g = build_grid(32, 16, 1);
    const WaveFunction f = synthesize_state(g, gauss({2.2, -1, 0.5}, 0.5, 21));
    const UncertaintyResult base = uncertainty_check(f, 1.0);
    for (double lambda : {-2.0, -0.5, 0.5, 2.0, 3.0}) {
        CAPTURE(lambda);
        const UncertaintyResult r = uncertainty_check(f, lambda);
        CHECK(std::abs(r.delta_T - std::abs(lambda) * base.delta_T) <= 1e-10);
        CHECK(std::abs(r.delta_E - base.delta_E / std::abs(lambda)) <= 1e-10);
        CHECK(std::abs(r.product - base.product) <= 1e-9);
    }
}

TEST_CASE("uncertainty at half hbar")
{
    const GridSpec g = build_grid(32, 8, 0.5);
    const WaveFunction f = synthesize_state(g, gauss({1.5, 0.5, 0}, 0.3));
    const UncertaintyResult r = uncertainty_check(f, 2.0);
    CHECK(r.bound == 0.25);
    CHECK(r.pass);
}

TEST_CASE("self-convergence of the uncertainty numbers")
{
    // same box, twice the lattice points
    const StateSpec s = gauss({3, 0, 0}, 0.5);
    const UncertaintyResult a = uncertainty_check(synthesize_state(build_grid(48, 24, 1), s), 2.0);
    const UncertaintyResult b = uncertainty_check(synthesize_state(build_grid(96, 24, 1), s), 2.0);
    CHECK(std::abs(a.delta_T - b.delta_T) <= 1e-6 * b.delta_T);
    CHECK(std::abs(a.delta_E - b.delta_E) <= 1e-6 * b.delta_E);
    CHECK(std::abs(a.product - b.product) <= 1e-6 * b.product);
}

TEST_CASE("non-compliant states are flagged, not rejected")
{
    const GridSpec g = build_grid(16, 10, 1);
    const WaveFunction f = synthesize_state(g, gauss({0, 0, 0}, 1.0));
    const UncertaintyResult r = uncertainty_check(f, 1.0);
    CHECK_FALSE(r.compliant);
    CHECK_THROWS_WITH_AS(uncertainty_check(f, 0.0), "time parameter must be nonzero", std::invalid_argument);
}

TEST_CASE("commutator identities as residuals")
{
    const GridSpec g = build_grid(64, 32, 1);
    const WaveFunction f = synthesize_state(g, gauss({3, 0.5, -0.5}, 0.5, 5));
    CHECK(residual(CheckId::eq5_time_norm, f, 2.0).value <= 1e-10);
    CHECK(residual(CheckId::sum_commutator, f, 2.0).value <= 1e-6);
    for (int j = 1; j <= 3; ++j) {
        CHECK(residual(CheckId::eq9_x_absp, f, 1.0, j).value <= 1e-6);
        CHECK(residual(CheckId::component_commutator, f, -0.5, j).value <= 1e-6);
    }
    const ResidualCheck r = residual(CheckId::eq9_x_absp, f, 1.0, 2);
    CHECK(r.axis == 2);
    CHECK(r.grid == g);
    CHECK(r.threshold == 1e-6);
    CHECK_THROWS_AS(residual(CheckId::eq9_x_absp, f, 1.0, 0), std::invalid_argument);
}

TEST_CASE("evaluate_cell agrees with the single checks")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = synthesize_state(g, shell(1, 4, 17));
    const CellEvaluation cell = evaluate_cell(f, 1.5);
    REQUIRE(cell.residuals.size() == 6);
    const UncertaintyResult u = uncertainty_check(f, 1.5);
    CHECK(cell.uncertainty.product == doctest::Approx(u.product).epsilon(1e-14));
    for (const ResidualCheck& c : cell.residuals) {
        const ResidualCheck single = residual(c.id, f, 1.5, c.axis);
        CHECK(std::abs(single.value - c.value) <= 1e-14);
    }
}

TEST_CASE("schwarz chain clamps at zero")
{
    const GridSpec g = build_grid(24, 12, 1);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const StateSpec s = k % 2 ? shell(1 + 0.2 * u(rng), 3.8 + 0.3 * u(rng), rng() % 500)
                                  : gauss({2 + 0.3 * u(rng), u(rng), u(rng)}, 0.5 + 0.05 * u(rng), rng() % 500);
        CHECK(residual(CheckId::schwarz_chain, synthesize_state(g, s), 1.0 + u(rng) * 0.5).value == 0.0);
    }
}

TEST_CASE("sum commutator residual shrinks under refinement")
{
    // the coarse lattice clips the momentum tail
    const StateSpec s = gauss({4.2, 0, 0}, 0.5);
    const double coarse = residual(CheckId::sum_commutator, synthesize_state(build_grid(48, 24, 1), s), 1.0).value;
    const double fine = residual(CheckId::sum_commutator, synthesize_state(build_grid(96, 24, 1), s), 1.0).value;
    CHECK(fine <= coarse);
}
