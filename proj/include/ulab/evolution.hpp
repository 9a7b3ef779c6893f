#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ulab/spectral_ops.hpp"
#include "ulab/state_space.hpp"

namespace ulab {

/// exp(-i t |p|^2 / (2 m hbar)) applied in the momentum representation;
/// the result is returned in f's representation.
WaveFunction propagate_free(const WaveFunction& f, double t, double m);

/// Complex conjugate in the position representation (antiunitary time
/// reversal): propagate_free(time_reversed(f), -t) = time_reversed(propagate_free(f, t)).
WaveFunction time_reversed(const WaveFunction& f);

/// e^{itH} A e^{-itH} for H = |p|^2/2m: every coordinate leaf x_j becomes
/// x_j + (t/m) p_j, momentum leaves are unchanged. Throws for a position
/// leaf that is not a plain coordinate.
OperatorExpr heisenberg_free(const OperatorExpr& a, double t, double m);

/// How ‖A psi_t‖ is evaluated. heisenberg computes ‖(e^{itH}Ae^{-itH}) f‖,
/// which is the same number and never leaves the periodic box; lattice
/// propagates f and applies A literally (valid only while psi_t stays
/// well inside the box).
enum class Frame { heisenberg, lattice };

/// ‖(x_j/t - p_j/m) psi_t‖, psi_t = propagate_free(f, t, m).
double velocity_residual(int j, const WaveFunction& f, double t, double m, Frame frame = Frame::heisenberg);

/// ‖(sum_j e_j^2 - H^2) psi_t‖ / ‖H^2 psi_t‖ with e_j built at the same t.
double energy_sq_residual(const WaveFunction& f, double t, double m, Frame frame = Frame::heisenberg);

/// Re <sum_j e_j^2 psi_t, psi_t>.
double energy_sq_expectation(const WaveFunction& f, double t, double m, Frame frame = Frame::heisenberg);

/// <H^2 f, f> by direct quadrature of (|p|^2/2m)^2 |f(p)|^2.
double hamiltonian_sq_expectation(const WaveFunction& f, double m);

struct AsymptoticsRow {
    double t = 0.0;
    Vec3 velocity_residual{};
    double energy_sq_residual = 0.0;
    Vec3 closed_form_velocity{};  ///< ‖x_j f‖ / |t|
};

struct ScanResult {
    std::vector<AsymptoticsRow> rows;
    /// Least-squares slope of log(energy_sq_residual) against log|t|;
    /// absent with fewer than two rows.
    std::optional<double> slope;
};

/// t_list must be nonempty, of one sign and strictly increasing in |t|.
/// Rows are computed in parallel (see ULAB_THREADS) and kept in order.
ScanResult asymptotic_scan(const WaveFunction& f, const std::vector<double>& t_list, double m);

/// Header "t,vres_1,vres_2,vres_3,closed_form_1,closed_form_2,closed_form_3,eres".
void write_scan_csv(std::ostream& out, const ScanResult& scan);

}  // namespace ulab
