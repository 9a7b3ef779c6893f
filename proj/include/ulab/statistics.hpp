#pragma once

#include <string>
#include <vector>

#include "ulab/spectral_ops.hpp"
#include "ulab/state_space.hpp"

namespace ulab {

struct Expectation {
    double value = 0.0;      ///< Re <A f, f>
    double imag_leak = 0.0;  ///< |Im <A f, f>|, zero for a symmetric A up to discretization
};

/// Requires a unit-norm state (|‖f‖ - 1| <= 1e-10).
Expectation expectation(const OperatorExpr& a, const WaveFunction& f);

struct UncertaintyResult {
    double t = 0.0;
    Vec3 tilde_T{};
    Vec3 tilde_E{};
    double delta_T = 0.0;
    double delta_E = 0.0;
    double product = 0.0;
    double bound = 0.0;  ///< hbar / 2
    double margin = 0.0;
    bool pass = false;
    bool compliant = false;
    double max_imag_leak = 0.0;
};

/// Delta T = ‖(T - T~) f‖ and Delta E = ‖(E - E~) f‖ as norms of deviation
/// vectors; pass <=> Delta T * Delta E >= (hbar/2)(1 - tol). A non-compliant f
/// is flagged (compliant = false), not rejected.
UncertaintyResult uncertainty_check(const WaveFunction& f, double t, double tol = 1e-8,
                                    const ComplianceOptions& compliance = {});

enum class CheckId { eq5_time_norm, eq9_x_absp, component_commutator, sum_commutator, schwarz_chain };

const char* to_string(CheckId id);
/// Whether the check is indexed by an axis j.
bool has_axis(CheckId id);

struct ResidualThresholds {
    double eq5_time_norm = 1e-10;
    double eq9_x_absp = 1e-6;
    double component_commutator = 1e-6;
    double sum_commutator = 1e-6;
    double schwarz_chain = 0.0;

    double get(CheckId id) const;
};

struct ResidualCheck {
    CheckId id = CheckId::eq5_time_norm;
    int axis = 0;  ///< 1..3 for per-axis checks, 0 otherwise
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    GridSpec grid;
};

/// Residual of one identity on a unit-norm state:
///   eq5_time_norm           |<sum_j t_j^2 f, f> - t^2|
///   eq9_x_absp(j)           ‖[x_j,|p|] f - i hbar p_j |p|^-1 f‖
///   component_commutator(j) ‖4[t_j,e_j] f - (2 hbar/i + 2 i hbar p_j^2 |p|^-2) f‖
///   sum_commutator          ‖sum_j [t_j,e_j] f - (hbar/i) f‖
///   schwarz_chain           max(0, |sum_j 1/2 <[t_j,e_j] f, f>| - Delta T Delta E)
ResidualCheck residual(CheckId id, const WaveFunction& f, double t, int axis = 0,
                       const ResidualThresholds& thresholds = {});

/// Everything that depends on (f, t), sharing the t_j f and e_j f vectors:
/// the uncertainty result plus eq5_time_norm, component_commutator(1..3),
/// sum_commutator and schwarz_chain residuals, in that order.
struct CellEvaluation {
    UncertaintyResult uncertainty;
    std::vector<ResidualCheck> residuals;
};

CellEvaluation evaluate_cell(const WaveFunction& f, double t, const ResidualThresholds& thresholds = {},
                             double uncertainty_tol = 1e-8, const ComplianceOptions& compliance = {});

}  // namespace ulab
