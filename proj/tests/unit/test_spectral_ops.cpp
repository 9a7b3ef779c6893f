#include <doctest.h>

#include <cmath>
#include <random>

#include "ulab/spectral_ops.hpp"

using namespace ulab;

namespace {

WaveFunction state(const GridSpec& g, StateSpec s) { return synthesize_state(g, s); }

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

double dist(const WaveFunction& a, const WaveFunction& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("momentum leaf is pointwise p_j")
{
    const GridSpec g = build_grid(16, 10, 1);
    const WaveFunction f = state(g, gauss({1.5, 0.5, 0}, 0.6));
    const WaveFunction pf = apply(build(op::Momentum{1}), f);
    REQUIRE(pf.rep() == Representation::momentum);
    for (int a = 0; a < g.n; ++a) {
        for (int b = 0; b < g.n; ++b) {
            for (int c = 0; c < g.n; ++c) {
                const std::size_t k = g.index(a, b, c);
                REQUIRE(pf[k] == f[k] * g.momentum(a));
            }
        }
    }
}

TEST_CASE("position leaf on a point mass")
{
    const GridSpec g = build_grid(64, 20, 1);
    for (int k : {1, 5, 17}) {
        std::vector<cplx> amp(g.size());
        const std::size_t at = g.index(32 + k, 32, 32);  // x = (0.3125 k, 0, 0)
        amp[at] = 1.0;
        const WaveFunction f(g, Representation::position, std::move(amp));
        const WaveFunction xf = apply(build(op::Position{1}), f);
        CHECK(xf.rep() == Representation::position);
        CHECK(xf[at] == cplx(0.3125 * k, 0.0));
    }
}

TEST_CASE("power law and guarded singularity")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = state(g, shell(1, 4, 5));
    const WaveFunction r2 = apply(build(op::AbsPPow{2}), f);
    const WaveFunction rr = apply(OperatorExpr::compose({build(op::AbsPPow{1}), build(op::AbsPPow{1})}), f);
    CHECK(dist(r2, rr) <= 1e-12 * r2.norm());

    // the p = 0 value of |p|^-1 is 0 even on a state that is nonzero there
    const WaveFunction c = state(g, gauss({0, 0, 0}, 1.0));
    const WaveFunction inv = apply(build(op::AbsPPow{-1}), c);
    CHECK(inv[g.index(12, 12, 12)] == cplx(0.0, 0.0));
    CHECK(build(op::AbsPPow{-1}).singular());
    CHECK_FALSE(build(op::AbsPPow{2}).singular());
}

TEST_CASE("preconditions")
{
    CHECK_THROWS_WITH_AS(build(op::Time{1, 0.0}), "time parameter must be nonzero", std::invalid_argument);
    CHECK_THROWS_WITH_AS(build(op::Energy{2, 0.0}), "time parameter must be nonzero", std::invalid_argument);
    CHECK_THROWS_AS(build(op::FreeHamiltonian{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(build(op::Position{4}), std::invalid_argument);
}

TEST_CASE("linearity and representation of the result")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = transform(state(g, gauss({2, -1, 0.5}, 0.5, 9)), Representation::position);
    const OperatorExpr a = build(op::Energy{1, 2.0});
    const OperatorExpr b = build(op::Time{3, -1.0});
    const WaveFunction sum = apply(OperatorExpr::sum({a, b}), f);
    CHECK(sum.rep() == Representation::position);
    CHECK(dist(sum, apply(a, f) + apply(b, f)) <= 1e-12 * sum.norm());
    const WaveFunction scaled = apply(OperatorExpr::compose({OperatorExpr::scale(cplx(0, 2)), a}), f);
    CHECK(dist(scaled, cplx(0, 2) * apply(a, f)) <= 1e-12 * scaled.norm());
}

TEST_CASE("energy is the symmetrized composition")
{
    const GridSpec g = build_grid(24, 12, 1);
    const WaveFunction f = state(g, shell(1, 4, 2));
    const double t = 1.5;
    const OperatorExpr r = build(op::AbsPPow{1}), x = build(op::Position{2});
    const OperatorExpr by_hand = OperatorExpr::compose(
        {OperatorExpr::scale(1.0 / (4 * t)), OperatorExpr::sum({OperatorExpr::compose({r, x}), OperatorExpr::compose({x, r})})});
    const WaveFunction e = apply(build(op::Energy{2, t}), f);
    CHECK(dist(e, apply(by_hand, f)) <= 1e-12 * e.norm());
}

TEST_CASE("energy operator is symmetric on compliant states")
{
    const GridSpec g = build_grid(32, 16, 1);
    const OperatorExpr e = build(op::Energy{1, 2.0});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const Vec3 p0{2.5 + u(rng) * 0.5, u(rng), u(rng)};
        const WaveFunction f = state(g, gauss(p0, 0.5 + 0.1 * u(rng), rng() % 1000));
        const WaveFunction h = state(g, shell(1.0 + 0.3 * u(rng), 4.0 + 0.3 * u(rng), rng() % 1000));
        const cplx lhs = inner_product(apply(e, f), h);
        const cplx rhs = inner_product(f, apply(e, h));
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("commutator_apply")
{
    const GridSpec g = build_grid(64, 32, 1);  // x_j is a sawtooth on the torus, keep the tails off the seam
    const WaveFunction f = state(g, gauss({2, 0, 0}, 0.5));
    const OperatorExpr x = build(op::Position{1}), p = build(op::Momentum{1}), p2 = build(op::Momentum{2});
    const WaveFunction c = commutator_apply(x, p, f);
    CHECK(dist(c, apply(x, apply(p, f)) - apply(p, apply(x, f))) <= 1e-13);
    // canonical pair: [x1, p1] = i hbar
    CHECK(dist(c, cplx(0, 1) * f) <= 1e-8);
    CHECK(commutator_apply(x, p2, f).norm() <= 1e-12);
}

TEST_CASE("describe renders the pipeline")
{
    const std::string d = build(op::Energy{1, 2.0}).describe();
    CHECK(d.find("x1") != std::string::npos);
    CHECK(d.find("|p|") != std::string::npos);
}
