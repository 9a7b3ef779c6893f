#include "ulab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ulab {
namespace {

constexpr cplx kI{0.0, 1.0};

void require_unit_norm(const WaveFunction& f)
{
    if (std::abs(f.norm() - 1.0) > 1e-10) throw std::invalid_argument("state must be normalized");
}

void require_time(double t)
{
    if (t == 0.0 || !std::isfinite(t)) throw std::invalid_argument("time parameter must be nonzero");
}

struct Moments {
    std::vector<WaveFunction> tf;  // t_j f
    std::vector<WaveFunction> ef;  // e_j f
    Vec3 t_tilde{};
    Vec3 e_tilde{};
    double leak = 0.0;
    double delta_T = 0.0;
    double delta_E = 0.0;
};

Moments compute_moments(const WaveFunction& f, double t)
{
    Moments m;
    double var_T = 0.0;
    double var_E = 0.0;
    for (int j = 1; j <= 3; ++j) {
        m.tf.push_back(apply(build(op::Time{j, t}), f));
        m.ef.push_back(apply(build(op::Energy{j, t}), f));
        const cplx tz = inner_product(m.tf.back(), f);
        const cplx ez = inner_product(m.ef.back(), f);
        m.t_tilde[j - 1] = tz.real();
        m.e_tilde[j - 1] = ez.real();
        m.leak = std::max({m.leak, std::abs(tz.imag()), std::abs(ez.imag())});
        const double dt = (m.tf.back() - cplx(tz.real(), 0.0) * f).norm();
        const double de = (m.ef.back() - cplx(ez.real(), 0.0) * f).norm();
        var_T += dt * dt;
        var_E += de * de;
    }
    m.delta_T = std::sqrt(var_T);
    m.delta_E = std::sqrt(var_E);
    return m;
}

// [t_j, e_j] f = t_j (e_j f) - e_j (t_j f), j = 1..3.
std::vector<WaveFunction> commutators(const Moments& m, double t)
{
    std::vector<WaveFunction> out;
    for (int j = 1; j <= 3; ++j) {
        out.push_back(apply(build(op::Time{j, t}), m.ef[j - 1]) - apply(build(op::Energy{j, t}), m.tf[j - 1]));
    }
    return out;
}

UncertaintyResult make_uncertainty(const WaveFunction& f, double t, const Moments& m, double tol,
                                   const ComplianceOptions& compliance)
{
    UncertaintyResult r;
    r.t = t;
    r.tilde_T = m.t_tilde;
    r.tilde_E = m.e_tilde;
    r.delta_T = m.delta_T;
    r.delta_E = m.delta_E;
    r.product = m.delta_T * m.delta_E;
    r.bound = 0.5 * f.grid().hbar;
    r.margin = r.product - r.bound;
    r.pass = r.product >= r.bound * (1.0 - tol);
    r.compliant = domain_compliance(f, compliance).compliant;
    r.max_imag_leak = m.leak;
    return r;
}

ResidualCheck make_check(CheckId id, int axis, double value, const ResidualThresholds& th, const GridSpec& grid)
{
    ResidualCheck c;
    c.id = id;
    c.axis = axis;
    c.value = value;
    c.threshold = th.get(id);
    c.pass = value <= c.threshold;
    c.grid = grid;
    return c;
}

double eq5_value(const WaveFunction& f, double t, const Moments& m)
{
    cplx sum{0.0, 0.0};
    for (int j = 1; j <= 3; ++j) sum += inner_product(apply(build(op::Time{j, t}), m.tf[j - 1]), f);
    return std::abs(sum - cplx(t * t, 0.0));
}

double component_value(const WaveFunction& f, int j, const std::vector<WaveFunction>& comm)
{
    const double hbar = f.grid().hbar;
    const OperatorExpr pj2_over_r2 = OperatorExpr::compose(
        {build(op::Momentum{j}), build(op::Momentum{j}), build(op::AbsPPow{-2})});
    const WaveFunction expected = cplx(-2.0 * hbar, 0.0) * (kI * f) + (2.0 * kI * hbar) * apply(pj2_over_r2, f);
    return (cplx(4.0, 0.0) * comm[j - 1] - expected).norm();
}

double sum_value(const WaveFunction& f, const std::vector<WaveFunction>& comm)
{
    WaveFunction total = comm[0] + comm[1] + comm[2];
    return (total - (-kI * f.grid().hbar) * f).norm();
}

double schwarz_value(const WaveFunction& f, const std::vector<WaveFunction>& comm, const Moments& m)
{
    cplx sum{0.0, 0.0};
    for (const auto& c : comm) sum += inner_product(c, f);
    return std::max(0.0, std::abs(0.5 * sum) - m.delta_T * m.delta_E);
}

double eq9_value(const WaveFunction& f, int j)
{
    const WaveFunction lhs = commutator_apply(build(op::Position{j}), build(op::AbsPPow{1}), f);
    const OperatorExpr pj_over_r = OperatorExpr::compose({build(op::Momentum{j}), build(op::AbsPPow{-1})});
    return (lhs - (kI * f.grid().hbar) * apply(pj_over_r, f)).norm();
}

}  // namespace

Expectation expectation(const OperatorExpr& a, const WaveFunction& f)
{
    require_unit_norm(f);
    const cplx z = inner_product(apply(a, f), f);
    return Expectation{z.real(), std::abs(z.imag())};
}

UncertaintyResult uncertainty_check(const WaveFunction& f, double t, double tol, const ComplianceOptions& compliance)
{
    require_time(t);
    require_unit_norm(f);
    return make_uncertainty(f, t, compute_moments(f, t), tol, compliance);
}

const char* to_string(CheckId id)
{
    switch (id) {
        case CheckId::eq5_time_norm: return "eq5_time_norm";
        case CheckId::eq9_x_absp: return "eq9_x_absp";
        case CheckId::component_commutator: return "component_commutator";
        case CheckId::sum_commutator: return "sum_commutator";
        case CheckId::schwarz_chain: return "schwarz_chain";
    }
    return "?";
}

bool has_axis(CheckId id) { return id == CheckId::eq9_x_absp || id == CheckId::component_commutator; }

double ResidualThresholds::get(CheckId id) const
{
    switch (id) {
        case CheckId::eq5_time_norm: return eq5_time_norm;
        case CheckId::eq9_x_absp: return eq9_x_absp;
        case CheckId::component_commutator: return component_commutator;
        case CheckId::sum_commutator: return sum_commutator;
        case CheckId::schwarz_chain: return schwarz_chain;
    }
    return 0.0;
}

ResidualCheck residual(CheckId id, const WaveFunction& f, double t, int axis, const ResidualThresholds& thresholds)
{
    require_time(t);
    require_unit_norm(f);
    if (has_axis(id) && (axis < 1 || axis > 3)) throw std::invalid_argument("axis must be 1, 2 or 3");
    if (!has_axis(id)) axis = 0;
    const WaveFunction fm = transform(f, Representation::momentum);

    if (id == CheckId::eq9_x_absp) return make_check(id, axis, eq9_value(fm, axis), thresholds, f.grid());

    const Moments m = compute_moments(fm, t);
    switch (id) {
        case CheckId::eq5_time_norm: return make_check(id, 0, eq5_value(fm, t, m), thresholds, f.grid());
        case CheckId::component_commutator: {
            // Only the requested axis is needed, but commutators() is cheap
            // relative to moments and keeps one code path.
            const auto comm = commutators(m, t);
            return make_check(id, axis, component_value(fm, axis, comm), thresholds, f.grid());
        }
        case CheckId::sum_commutator:
            return make_check(id, 0, sum_value(fm, commutators(m, t)), thresholds, f.grid());
        case CheckId::schwarz_chain:
            return make_check(id, 0, schwarz_value(fm, commutators(m, t), m), thresholds, f.grid());
        case CheckId::eq9_x_absp: break;
    }
    throw std::logic_error("unhandled check id");
}

CellEvaluation evaluate_cell(const WaveFunction& f, double t, const ResidualThresholds& thresholds,
                             double uncertainty_tol, const ComplianceOptions& compliance)
{
    require_time(t);
    require_unit_norm(f);
    const WaveFunction fm = transform(f, Representation::momentum);
    const Moments m = compute_moments(fm, t);
    const auto comm = commutators(m, t);

    CellEvaluation out;
    out.uncertainty = make_uncertainty(fm, t, m, uncertainty_tol, compliance);
    out.residuals.push_back(make_check(CheckId::eq5_time_norm, 0, eq5_value(fm, t, m), thresholds, f.grid()));
    for (int j = 1; j <= 3; ++j) {
        out.residuals.push_back(
            make_check(CheckId::component_commutator, j, component_value(fm, j, comm), thresholds, f.grid()));
    }
    out.residuals.push_back(make_check(CheckId::sum_commutator, 0, sum_value(fm, comm), thresholds, f.grid()));
    out.residuals.push_back(make_check(CheckId::schwarz_chain, 0, schwarz_value(fm, comm, m), thresholds, f.grid()));
    return out;
}

}  // namespace ulab
