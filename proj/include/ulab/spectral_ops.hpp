#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ulab/state_space.hpp"

namespace ulab {

using Symbol = std::function<cplx(const Vec3&)>;

/// Immutable operator pipeline. Leaves are diagonal in one representation;
/// Compose applies its rightmost factor first.
class OperatorExpr {
public:
    struct DiagMomentum {
        Symbol symbol;
        std::string label;
        /// Symbol blows up at p = 0 (its value there is guarded to 0).
        bool singular = false;
    };
    struct DiagPosition {
        Symbol symbol;
        std::string label;
        /// Set when the symbol is exactly the coordinate x_j (1-based axis).
        std::optional<int> coordinate_axis;
    };
    struct Scale {
        cplx factor;
    };
    struct Sum {
        std::vector<OperatorExpr> terms;
    };
    struct Compose {
        std::vector<OperatorExpr> factors;
    };
    using Node = std::variant<DiagMomentum, DiagPosition, Scale, Sum, Compose>;

    static OperatorExpr diag_momentum(Symbol symbol, std::string label, bool singular = false);
    static OperatorExpr diag_position(Symbol symbol, std::string label,
                                      std::optional<int> coordinate_axis = std::nullopt);
    static OperatorExpr scale(cplx factor);
    static OperatorExpr sum(std::vector<OperatorExpr> terms);
    static OperatorExpr compose(std::vector<OperatorExpr> factors);

    const Node& node() const { return *node_; }

    /// True when any momentum leaf is singular at p = 0.
    bool singular() const;
    std::string describe() const;

private:
    explicit OperatorExpr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}
    std::shared_ptr<const Node> node_;
};

namespace op {
struct Position { int j; };
struct Momentum { int j; };
struct AbsPPow { int s; };
struct Time { int j; double t; };
struct Energy { int j; double t; };
struct FreeHamiltonian { double m; };
}  // namespace op

using OpKind = std::variant<op::Position, op::Momentum, op::AbsPPow, op::Time, op::Energy,
                            op::FreeHamiltonian>;

/// Momentum(j), AbsPPow(s), Time(j,t) and FreeHamiltonian(m) become momentum
/// leaves, Position(j) a position leaf, and Energy(j,t) the symmetrized
/// composition (1/4t)(|p| x_j + x_j |p|).
OperatorExpr build(const OpKind& kind);

/// Leaves act in their own representation (transforms are inserted as
/// needed); the result comes back in f's representation.
WaveFunction apply(const OperatorExpr& a, const WaveFunction& f);

/// A(B f) - B(A f).
WaveFunction commutator_apply(const OperatorExpr& a, const OperatorExpr& b, const WaveFunction& f);

}  // namespace ulab
