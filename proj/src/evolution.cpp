#include "ulab/evolution.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ulab/parallel.hpp"

namespace ulab {
namespace {

void check_mass(double m)
{
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("mass must be positive");
}

void check_time(double t)
{
    if (t == 0.0 || !std::isfinite(t)) throw std::invalid_argument("time parameter must be nonzero");
}

// ‖A psi_t‖ in the requested frame.
WaveFunction evolve_apply(const OperatorExpr& a, const WaveFunction& f, double t, double m, Frame frame)
{
    if (frame == Frame::heisenberg) return apply(heisenberg_free(a, t, m), f);
    return apply(a, propagate_free(f, t, m));
}

OperatorExpr sum_e_squared_minus(double t, const OperatorExpr* subtract)
{
    std::vector<OperatorExpr> terms;
    for (int j = 1; j <= 3; ++j) {
        const OperatorExpr e = build(op::Energy{j, t});
        terms.push_back(OperatorExpr::compose({e, e}));
    }
    if (subtract) terms.push_back(OperatorExpr::compose({OperatorExpr::scale(-1.0), *subtract}));
    return OperatorExpr::sum(std::move(terms));
}

OperatorExpr h_squared(double m)
{
    const OperatorExpr h = build(op::FreeHamiltonian{m});
    return OperatorExpr::compose({h, h});
}

}  // namespace

WaveFunction propagate_free(const WaveFunction& f, double t, double m)
{
    check_mass(m);
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    if (t == 0.0) return f;
    const double k = t / (2.0 * m * f.grid().hbar);
    WaveFunction out = multiply_pointwise(f, Representation::momentum, [k](const Vec3& p) {
        const double phase = -k * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return cplx(std::cos(phase), std::sin(phase));
    });
    return transform(std::move(out), f.rep());
}

WaveFunction time_reversed(const WaveFunction& f)
{
    std::vector<cplx> amps = transform(f, Representation::position).release();
    for (auto& z : amps) z = std::conj(z);
    return transform(WaveFunction(f.grid(), Representation::position, std::move(amps)), f.rep());
}

OperatorExpr heisenberg_free(const OperatorExpr& a, double t, double m)
{
    check_mass(m);
    const auto& node = a.node();
    if (const auto* leaf = std::get_if<OperatorExpr::DiagPosition>(&node)) {
        if (!leaf->coordinate_axis) {
            throw std::invalid_argument("cannot conjugate position symbol '" + leaf->label + "' by free evolution");
        }
        const int j = *leaf->coordinate_axis;
        return OperatorExpr::sum(
            {a, OperatorExpr::compose({OperatorExpr::scale(t / m), build(op::Momentum{j})})});
    }
    if (const auto* s = std::get_if<OperatorExpr::Sum>(&node)) {
        std::vector<OperatorExpr> terms;
        for (const auto& term : s->terms) terms.push_back(heisenberg_free(term, t, m));
        return OperatorExpr::sum(std::move(terms));
    }
    if (const auto* c = std::get_if<OperatorExpr::Compose>(&node)) {
        std::vector<OperatorExpr> factors;
        for (const auto& factor : c->factors) factors.push_back(heisenberg_free(factor, t, m));
        return OperatorExpr::compose(std::move(factors));
    }
    return a;  // momentum leaves and scalars commute with H
}

double velocity_residual(int j, const WaveFunction& f, double t, double m, Frame frame)
{
    check_time(t);
    check_mass(m);
    const OperatorExpr a = OperatorExpr::sum(
        {OperatorExpr::compose({OperatorExpr::scale(1.0 / t), build(op::Position{j})}),
         OperatorExpr::compose({OperatorExpr::scale(-1.0 / m), build(op::Momentum{j})})});
    return evolve_apply(a, f, t, m, frame).norm();
}

double energy_sq_residual(const WaveFunction& f, double t, double m, Frame frame)
{
    check_time(t);
    const OperatorExpr h2 = h_squared(m);
    const double num = evolve_apply(sum_e_squared_minus(t, &h2), f, t, m, frame).norm();
    // H^2 commutes with the propagator, so ‖H^2 psi_t‖ = ‖H^2 f‖.
    const double den = apply(h2, f).norm();
    if (den == 0.0) throw std::invalid_argument("state has zero energy");
    return num / den;
}

double energy_sq_expectation(const WaveFunction& f, double t, double m, Frame frame)
{
    check_time(t);
    check_mass(m);
    const OperatorExpr sum_e2 = sum_e_squared_minus(t, nullptr);
    if (frame == Frame::heisenberg) return inner_product(apply(heisenberg_free(sum_e2, t, m), f), f).real();
    const WaveFunction psi = propagate_free(f, t, m);
    return inner_product(apply(sum_e2, psi), psi).real();
}

double hamiltonian_sq_expectation(const WaveFunction& f, double m)
{
    check_mass(m);
    const WaveFunction fm = transform(f, Representation::momentum);
    const GridSpec& g = fm.grid();
    const auto amps = fm.amplitudes();
    double acc = 0.0;
    std::size_t idx = 0;
    for (int a = 0; a < g.n; ++a) {
        for (int b = 0; b < g.n; ++b) {
            for (int c = 0; c < g.n; ++c, ++idx) {
                const double pa = g.momentum(a), pb = g.momentum(b), pc = g.momentum(c);
                const double h = (pa * pa + pb * pb + pc * pc) / (2.0 * m);
                acc += h * h * std::norm(amps[idx]);
            }
        }
    }
    return acc * g.cell_volume(Representation::momentum);
}

ScanResult asymptotic_scan(const WaveFunction& f, const std::vector<double>& t_list, double m)
{
    check_mass(m);
    if (t_list.empty()) throw std::invalid_argument("t list is empty");
    for (std::size_t k = 0; k < t_list.size(); ++k) {
        check_time(t_list[k]);
        if (k > 0) {
            if ((t_list[k] > 0) != (t_list[0] > 0)) throw std::invalid_argument("t list mixes signs");
            if (!(std::abs(t_list[k]) > std::abs(t_list[k - 1]))) {
                throw std::invalid_argument("t list must increase in magnitude");
            }
        }
    }

    ScanResult out;
    out.rows = parallel_map(t_list.size(), [&](std::size_t k) {
        AsymptoticsRow row;
        row.t = t_list[k];
        for (int j = 1; j <= 3; ++j) {
            row.velocity_residual[j - 1] = velocity_residual(j, f, row.t, m);
            row.closed_form_velocity[j - 1] = apply(build(op::Position{j}), f).norm() / std::abs(row.t);
        }
        row.energy_sq_residual = energy_sq_residual(f, row.t, m);
        return row;
    });

    if (out.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        bool ok = true;
        for (const auto& row : out.rows) {
            if (!(row.energy_sq_residual > 0.0)) ok = false;
            const double x = std::log(std::abs(row.t));
            const double y = std::log(row.energy_sq_residual);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(out.rows.size());
        if (ok) out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return out;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan)
{
    const auto old_precision = out.precision(17);
    out << "t,vres_1,vres_2,vres_3,closed_form_1,closed_form_2,closed_form_3,eres\n";
    for (const auto& r : scan.rows) {
        out << r.t;
        for (double v : r.velocity_residual) out << ',' << v;
        for (double v : r.closed_form_velocity) out << ',' << v;
        out << ',' << r.energy_sq_residual << '\n';
    }
    out.precision(old_precision);
}

}  // namespace ulab
