#include "ulab/spectral_ops.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ulab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_axis(int j)
{
    if (j < 1 || j > 3) throw std::invalid_argument("axis must be 1, 2 or 3");
}

void check_time(double t)
{
    if (t == 0.0 || !std::isfinite(t)) throw std::invalid_argument("time parameter must be nonzero");
}

double radius_squared(const Vec3& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; }

// |p|^s with integer s; the p = 0 value is 0 for s < 0.
double abs_p_pow(const Vec3& p, int s)
{
    const double r2 = radius_squared(p);
    if (s == 0) return 1.0;
    if (s < 0 && r2 == 0.0) return 0.0;
    const int m = std::abs(s);
    double v = 1.0;
    for (int k = 0; k < m / 2; ++k) v *= r2;
    if (m % 2 == 1) v *= std::sqrt(r2);
    return s > 0 ? v : 1.0 / v;
}

OperatorExpr position_leaf(int j)
{
    check_axis(j);
    return OperatorExpr::diag_position([j](const Vec3& x) { return cplx(x[j - 1], 0.0); },
                                       "x" + std::to_string(j), j);
}

OperatorExpr abs_p_leaf(int s)
{
    return OperatorExpr::diag_momentum([s](const Vec3& p) { return cplx(abs_p_pow(p, s), 0.0); },
                                       "|p|^" + std::to_string(s), s < 0);
}

WaveFunction apply_any_rep(const OperatorExpr& a, const WaveFunction& f)
{
    return std::visit(
        Overloaded{
            [&](const OperatorExpr::DiagMomentum& leaf) {
                return multiply_pointwise(f, Representation::momentum, leaf.symbol);
            },
            [&](const OperatorExpr::DiagPosition& leaf) {
                return multiply_pointwise(f, Representation::position, leaf.symbol);
            },
            [&](const OperatorExpr::Scale& s) { return s.factor * f; },
            [&](const OperatorExpr::Sum& s) {
                if (s.terms.empty()) return cplx(0.0, 0.0) * f;
                WaveFunction acc = apply_any_rep(s.terms.front(), f);
                for (std::size_t k = 1; k < s.terms.size(); ++k) acc = acc + apply_any_rep(s.terms[k], f);
                return acc;
            },
            [&](const OperatorExpr::Compose& c) {
                WaveFunction cur = f;
                for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) cur = apply_any_rep(*it, cur);
                return cur;
            },
        },
        a.node());
}

}  // namespace

OperatorExpr OperatorExpr::diag_momentum(Symbol symbol, std::string label, bool singular)
{
    return OperatorExpr(DiagMomentum{std::move(symbol), std::move(label), singular});
}

OperatorExpr OperatorExpr::diag_position(Symbol symbol, std::string label, std::optional<int> coordinate_axis)
{
    return OperatorExpr(DiagPosition{std::move(symbol), std::move(label), coordinate_axis});
}

OperatorExpr OperatorExpr::scale(cplx factor) { return OperatorExpr(Scale{factor}); }

OperatorExpr OperatorExpr::sum(std::vector<OperatorExpr> terms) { return OperatorExpr(Sum{std::move(terms)}); }

OperatorExpr OperatorExpr::compose(std::vector<OperatorExpr> factors)
{
    return OperatorExpr(Compose{std::move(factors)});
}

bool OperatorExpr::singular() const
{
    return std::visit(Overloaded{
                          [](const DiagMomentum& leaf) { return leaf.singular; },
                          [](const DiagPosition&) { return false; },
                          [](const Scale&) { return false; },
                          [](const Sum& s) {
                              for (const auto& t : s.terms) {
                                  if (t.singular()) return true;
                              }
                              return false;
                          },
                          [](const Compose& c) {
                              for (const auto& t : c.factors) {
                                  if (t.singular()) return true;
                              }
                              return false;
                          },
                      },
                      node());
}

std::string OperatorExpr::describe() const
{
    auto list = [](const char* head, const std::vector<OperatorExpr>& items) {
        std::string out = std::string(head) + "[";
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k) out += ", ";
            out += items[k].describe();
        }
        return out + "]";
    };
    return std::visit(Overloaded{
                          [](const DiagMomentum& leaf) { return leaf.label; },
                          [](const DiagPosition& leaf) { return leaf.label; },
                          [](const Scale& s) {
                              std::ostringstream os;
                              os << "Scale(" << s.factor.real();
                              if (s.factor.imag() != 0.0) os << (s.factor.imag() < 0 ? "" : "+") << s.factor.imag() << "i";
                              os << ")";
                              return os.str();
                          },
                          [&](const Sum& s) { return list("Sum", s.terms); },
                          [&](const Compose& c) { return list("Compose", c.factors); },
                      },
                      node());
}

OperatorExpr build(const OpKind& kind)
{
    return std::visit(
        Overloaded{
            [](const op::Position& k) { return position_leaf(k.j); },
            [](const op::Momentum& k) {
                check_axis(k.j);
                const int j = k.j;
                return OperatorExpr::diag_momentum([j](const Vec3& p) { return cplx(p[j - 1], 0.0); },
                                                   "p" + std::to_string(j));
            },
            [](const op::AbsPPow& k) { return abs_p_leaf(k.s); },
            [](const op::Time& k) {
                check_axis(k.j);
                check_time(k.t);
                const int j = k.j;
                const double t = k.t;
                return OperatorExpr::diag_momentum(
                    [j, t](const Vec3& p) { return cplx(t * p[j - 1] * abs_p_pow(p, -1), 0.0); },
                    "t" + std::to_string(j), true);
            },
            [](const op::Energy& k) {
                check_axis(k.j);
                check_time(k.t);
                const OperatorExpr x = position_leaf(k.j);
                const OperatorExpr r = abs_p_leaf(1);
                return OperatorExpr::compose(
                    {OperatorExpr::scale(cplx(1.0 / (4.0 * k.t), 0.0)),
                     OperatorExpr::sum({OperatorExpr::compose({r, x}), OperatorExpr::compose({x, r})})});
            },
            [](const op::FreeHamiltonian& k) {
                if (!(k.m > 0.0) || !std::isfinite(k.m)) throw std::invalid_argument("mass must be positive");
                const double m = k.m;
                return OperatorExpr::diag_momentum(
                    [m](const Vec3& p) { return cplx(radius_squared(p) / (2.0 * m), 0.0); }, "H");
            },
        },
        kind);
}

WaveFunction apply(const OperatorExpr& a, const WaveFunction& f)
{
    return transform(apply_any_rep(a, f), f.rep());
}

WaveFunction commutator_apply(const OperatorExpr& a, const OperatorExpr& b, const WaveFunction& f)
{
    return apply(a, apply(b, f)) - apply(b, apply(a, f));
}

}  // namespace ulab
