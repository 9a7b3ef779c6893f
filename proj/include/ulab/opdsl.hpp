#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ulab/spectral_ops.hpp"
#include "ulab/state_space.hpp"
#include "ulab/symbolic.hpp"

namespace ulab::dsl {

/// Immutable shared child pointer with deep equality.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}
    const T& operator*() const { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::shared_ptr<const T> ptr_;
};

struct Ast;

enum class AtomKind { x, p, abs_p, i, hbar, t, rational };

struct Atom {
    AtomKind kind = AtomKind::rational;
    int axis = 0;  // 1..3 for x and p
    std::int64_t num = 0;
    std::optional<std::int64_t> den;  // kept as written, "2/4" stays 2/4

    bool operator==(const Atom&) const = default;
};

struct SignedTerm {
    bool negative = false;
    Box<Ast> term;
    bool operator==(const SignedTerm&) const = default;
};

struct Sum {
    std::vector<SignedTerm> terms;  // first term is never negative
    bool operator==(const Sum&) const = default;
};

struct Product {
    std::vector<Box<Ast>> factors;
    bool operator==(const Product&) const = default;
};

struct Power {
    Box<Ast> base;
    int exponent = 1;
    bool operator==(const Power&) const = default;
};

struct Commutator {
    Box<Ast> lhs;
    Box<Ast> rhs;
    bool operator==(const Commutator&) const = default;
};

struct Ast {
    std::variant<Atom, Sum, Product, Power, Commutator> node;
    bool operator==(const Ast&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset, std::size_t line, std::size_t column)
        : std::runtime_error(message), offset_(offset), line_(line), column_(column)
    {
    }
    std::size_t offset() const { return offset_; }
    std::size_t line() const { return line_; }      // 1-based
    std::size_t column() const { return column_; }  // 1-based

private:
    std::size_t offset_;
    std::size_t line_;
    std::size_t column_;
};

/// Grammar (whitespace-insensitive):
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := atom ('^' int)?
///   atom   := x1|x2|x3|p1|p2|p3|'|p|'|i|hbar|t|rational|'(' expr ')'|'[' expr ',' expr ']'
///   rational := int ('/' posint)?     int may carry a leading '-'
/// Single-element sums and products collapse to their element.
Ast parse(std::string_view text);

/// Canonical text; parse(format(a)) == a.
std::string format(const Ast& ast);

/// Exact lowering into the symbolic algebra. Negative powers are accepted
/// for |p| and t only (std::invalid_argument otherwise).
symbolic::NCPoly lower(const Ast& ast);

/// Numeric pipeline with t fixed to t_value and hbar taken from the grid.
/// A negative power of t with t_value = 0 throws.
OperatorExpr compile(const Ast& ast, const GridSpec& grid, double t_value);
OperatorExpr compile(const symbolic::NCPoly& poly, const GridSpec& grid, double t_value);

/// Unrestricted trees for round-trip testing: depth <= max_depth, any
/// integer exponents in [-3, 3], rationals with optional denominators.
Ast random_ast(std::mt19937_64& rng, int max_depth = 5);

/// Trees that are cheap and well conditioned to evaluate numerically: depth
/// <= 4, total x/p/|p| degree <= 4, at most two |p|^-1 factors, exponents
/// nonnegative except on |p|.
Ast random_numeric_ast(std::mt19937_64& rng);

}  // namespace ulab::dsl
