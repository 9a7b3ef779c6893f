#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ulab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

enum class Representation { position, momentum };

const char* to_string(Representation rep);

/// Uniform discretization of R^3 shared by the position and momentum lattices.
///
/// Position lattice: x_k = -L/2 + k*dx, dx = L/n.
/// Momentum lattice: p_k = (k - n/2)*dp, dp = 2*pi*hbar/L, so p = 0 sits on
/// lattice index n/2 of every axis and dx*dp*n = 2*pi*hbar.
struct GridSpec {
    int n = 0;
    double box_length = 0.0;
    double hbar = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
    double dx() const { return box_length / n; }
    double dp() const;
    /// Largest |p_k| on the lattice along one axis (the Nyquist momentum).
    double nyquist() const { return 0.5 * n * dp(); }
    double position(int k) const { return -0.5 * box_length + k * dx(); }
    double momentum(int k) const { return (k - n / 2) * dp(); }
    double cell_volume(Representation rep) const;

    std::size_t index(int k1, int k2, int k3) const
    {
        return (static_cast<std::size_t>(k1) * n + k2) * n + k3;
    }

    bool operator==(const GridSpec&) const = default;
};

GridSpec build_grid(int n, double box_length, double hbar = 1.0);

/// The grid every default number in this project is quoted at.
GridSpec reference_grid();

/// Complex amplitude field on a grid, tagged with its representation.
/// Immutable after construction; the other representation is computed on
/// demand by transform().
class WaveFunction {
public:
    WaveFunction(GridSpec grid, Representation rep, std::vector<cplx> amplitudes);

    const GridSpec& grid() const { return grid_; }
    Representation rep() const { return rep_; }
    std::span<const cplx> amplitudes() const { return amp_; }
    const cplx& operator[](std::size_t i) const { return amp_[i]; }

    double norm() const;

    /// Moves the amplitudes out (for building a modified copy cheaply).
    std::vector<cplx> release() && { return std::move(amp_); }

private:
    GridSpec grid_;
    Representation rep_;
    std::vector<cplx> amp_;
};

/// Unitary position <-> momentum transform with kernel exp(-i p.x / hbar) and
/// prefactor (2 pi hbar)^{-3/2}, including the lattice-offset phases so that
/// x_j in position representation corresponds to i hbar d/dp_j in momentum
/// representation. Identity when target == f.rep().
WaveFunction transform(const WaveFunction& f, Representation target);
/// Same, but reuses f's storage when no transform is needed.
WaveFunction transform(WaveFunction&& f, Representation target);

/// <f, g> = integral of f * conj(g), weighted by the cell volume. g is
/// transformed to f's representation if needed.
cplx inner_product(const WaveFunction& f, const WaveFunction& g);

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator-(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator*(cplx c, const WaveFunction& f);

/// Pointwise multiplication by a symbol on the lattice of `rep`.
/// The result is in representation `rep`.
template <class Symbol>
WaveFunction multiply_pointwise(const WaveFunction& f, Representation rep, Symbol&& symbol);

// --- synthesized states --------------------------------------------------

struct GaussianParams {
    Vec3 p0{};
    double sigma = 0.0;
};

struct AnnularBumpParams {
    double r_in = 0.0;
    double r_out = 0.0;
};

struct StateSpec {
    std::variant<GaussianParams, AnnularBumpParams> shape;
    /// When present, multiplies the profile by a smooth direction-dependent phase.
    std::optional<std::uint64_t> seed;

    std::string describe() const;
};

void to_json(nlohmann::json& j, const StateSpec& spec);
void from_json(const nlohmann::json& j, StateSpec& spec);

/// Normalized momentum-representation state. Annular bumps are exactly zero
/// for |p| <= r_in and |p| >= r_out.
WaveFunction synthesize_state(const GridSpec& grid, const StateSpec& spec);

struct ComplianceReport {
    double mass_near_zero = 0.0;
    double mass_at_edges = 0.0;
    bool compliant = false;
};

struct ComplianceOptions {
    double p_min = 0.5;
    double edge_tol = 1e-8;
};

/// Numeric stand-in for membership in F^{-1} C_0^inf(R^3 - {0}): probability
/// mass below p_min and in the outer two-cell shell of either lattice.
ComplianceReport domain_compliance(const WaveFunction& f, double p_min, double edge_tol);
inline ComplianceReport domain_compliance(const WaveFunction& f, const ComplianceOptions& opts)
{
    return domain_compliance(f, opts.p_min, opts.edge_tol);
}

// --- implementation of the template ---------------------------------------

template <class Symbol>
WaveFunction multiply_pointwise(const WaveFunction& f, Representation rep, Symbol&& symbol)
{
    std::vector<cplx> out = transform(f, rep).release();
    const GridSpec& g = f.grid();
    std::vector<double> axis(g.n);
    for (int k = 0; k < g.n; ++k) {
        axis[k] = rep == Representation::position ? g.position(k) : g.momentum(k);
    }
    std::size_t idx = 0;
    for (int a = 0; a < g.n; ++a) {
        for (int b = 0; b < g.n; ++b) {
            for (int c = 0; c < g.n; ++c, ++idx) {
                out[idx] *= symbol(Vec3{axis[a], axis[b], axis[c]});
            }
        }
    }
    return WaveFunction(g, rep, std::move(out));
}

}  // namespace ulab
