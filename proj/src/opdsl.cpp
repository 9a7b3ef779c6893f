#include "ulab/opdsl.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace ulab::dsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// --- lexer -------------------------------------------------------------------------

enum class Tok { ident, abs_p, integer, plus, minus, star, caret, slash, lparen, rparen, lbracket, rbracket, comma, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
};

[[noreturn]] void fail(std::string_view src, std::size_t offset, const std::string& message)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k < offset && k < src.size(); ++k) {
        if (src[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    throw ParseError(message, offset, line, column);
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t k = 0;
    while (k < src.size()) {
        const char c = src[k];
        if (is_space(c)) {
            ++k;
            continue;
        }
        const std::size_t start = k;
        auto single = [&](Tok kind) {
            out.push_back({kind, start, src.substr(start, 1)});
            ++k;
        };
        if (is_alpha(c)) {
            while (k < src.size() && (is_alpha(src[k]) || is_digit(src[k]))) ++k;
            out.push_back({Tok::ident, start, src.substr(start, k - start)});
        } else if (is_digit(c)) {
            while (k < src.size() && is_digit(src[k])) ++k;
            out.push_back({Tok::integer, start, src.substr(start, k - start)});
        } else if (c == '|') {
            if (src.substr(k, 3) != "|p|") fail(src, start, "expected '|p|'");
            out.push_back({Tok::abs_p, start, src.substr(start, 3)});
            k += 3;
        } else {
            switch (c) {
                case '+': single(Tok::plus); break;
                case '-': single(Tok::minus); break;
                case '*': single(Tok::star); break;
                case '^': single(Tok::caret); break;
                case '/': single(Tok::slash); break;
                case '(': single(Tok::lparen); break;
                case ')': single(Tok::rparen); break;
                case '[': single(Tok::lbracket); break;
                case ']': single(Tok::rbracket); break;
                case ',': single(Tok::comma); break;
                default: fail(src, start, std::string("unexpected character '") + c + "'");
            }
        }
    }
    out.push_back({Tok::end, src.size(), {}});
    return out;
}

// --- parser ------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    Ast run()
    {
        Ast e = expr();
        if (peek().kind != Tok::end) {
            fail(src_, peek().offset, "unexpected '" + std::string(peek().text) + "'");
        }
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& take() { return toks_[pos_++]; }

    void expect(Tok kind, const char* message)
    {
        if (peek().kind != kind) fail(src_, peek().offset, message);
        ++pos_;
    }

    Ast expr()
    {
        Sum s;
        s.terms.push_back({false, term()});
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const bool negative = take().kind == Tok::minus;
            s.terms.push_back({negative, term()});
        }
        if (s.terms.size() == 1) return *s.terms.front().term;
        return Ast{std::move(s)};
    }

    Ast term()
    {
        Product p;
        p.factors.push_back(factor());
        while (peek().kind == Tok::star) {
            ++pos_;
            p.factors.push_back(factor());
        }
        if (p.factors.size() == 1) return *p.factors.front();
        return Ast{std::move(p)};
    }

    Ast factor()
    {
        Ast base = atom();
        if (peek().kind != Tok::caret) return base;
        ++pos_;
        const std::int64_t e = signed_integer("expected integer exponent");
        if (e < std::numeric_limits<int>::min() || e > std::numeric_limits<int>::max()) {
            fail(src_, toks_[pos_ - 1].offset, "exponent out of range");
        }
        return Ast{Power{std::move(base), static_cast<int>(e)}};
    }

    // Optional '-' then an integer token.
    std::int64_t signed_integer(const char* message)
    {
        bool negative = false;
        if (peek().kind == Tok::minus) {
            negative = true;
            ++pos_;
        }
        if (peek().kind != Tok::integer) fail(src_, peek().offset, message);
        const Token& tok = take();
        std::string digits = (negative ? "-" : "") + std::string(tok.text);
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) {
            fail(src_, tok.offset, "integer literal out of range");
        }
        return value;
    }

    Ast rational()
    {
        Atom a;
        a.kind = AtomKind::rational;
        a.num = signed_integer("expected integer literal");
        if (peek().kind == Tok::slash) {
            ++pos_;
            const std::size_t at = peek().offset;
            if (peek().kind != Tok::integer) fail(src_, at, "expected positive denominator");
            const std::int64_t den = signed_integer("expected positive denominator");
            if (den <= 0) fail(src_, at, "denominator must be positive");
            a.den = den;
        }
        return Ast{a};
    }

    Ast atom()
    {
        const Token& tok = peek();
        switch (tok.kind) {
            case Tok::ident: {
                ++pos_;
                Atom a;
                const std::string_view s = tok.text;
                if (s.size() == 2 && (s[0] == 'x' || s[0] == 'p') && s[1] >= '1' && s[1] <= '3') {
                    a.kind = s[0] == 'x' ? AtomKind::x : AtomKind::p;
                    a.axis = s[1] - '0';
                } else if (s == "i") {
                    a.kind = AtomKind::i;
                } else if (s == "hbar") {
                    a.kind = AtomKind::hbar;
                } else if (s == "t") {
                    a.kind = AtomKind::t;
                } else {
                    fail(src_, tok.offset, "unknown identifier '" + std::string(s) + "'");
                }
                return Ast{a};
            }
            case Tok::abs_p:
                ++pos_;
                return Ast{Atom{AtomKind::abs_p, 0, 0, std::nullopt}};
            case Tok::integer:
            case Tok::minus:
                return rational();
            case Tok::lparen: {
                ++pos_;
                Ast inner = expr();
                expect(Tok::rparen, "expected ')'");
                return inner;
            }
            case Tok::lbracket: {
                ++pos_;
                Ast lhs = expr();
                expect(Tok::comma, "expected ','");
                Ast rhs = expr();
                expect(Tok::rbracket, "expected ']'");
                return Ast{Commutator{std::move(lhs), std::move(rhs)}};
            }
            case Tok::end:
                fail(src_, tok.offset, "unexpected end of input");
            default:
                fail(src_, tok.offset, "expected operand, got '" + std::string(tok.text) + "'");
        }
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// --- formatter ---------------------------------------------------------------------

std::string atom_text(const Atom& a)
{
    switch (a.kind) {
        case AtomKind::x: return "x" + std::to_string(a.axis);
        case AtomKind::p: return "p" + std::to_string(a.axis);
        case AtomKind::abs_p: return "|p|";
        case AtomKind::i: return "i";
        case AtomKind::hbar: return "hbar";
        case AtomKind::t: return "t";
        case AtomKind::rational: {
            std::string s = std::to_string(a.num);
            if (a.den) s += "/" + std::to_string(*a.den);
            return s;
        }
    }
    return "?";
}

bool is_sum(const Ast& a) { return std::holds_alternative<Sum>(a.node); }
bool is_product(const Ast& a) { return std::holds_alternative<Product>(a.node); }
bool is_power(const Ast& a) { return std::holds_alternative<Power>(a.node); }

std::string paren(const std::string& s) { return "(" + s + ")"; }

// --- lowering helpers --------------------------------------------------------------

mpq_class to_mpq(const Atom& a)
{
    mpq_class q(std::to_string(a.num) + "/" + std::to_string(a.den.value_or(1)));
    q.canonicalize();
    return q;
}

const Atom* as_atom(const Ast& a) { return std::get_if<Atom>(&a.node); }

symbolic::NCPoly lower_atom(const Atom& a)
{
    using symbolic::NCPoly;
    switch (a.kind) {
        case AtomKind::x: return NCPoly::x(a.axis);
        case AtomKind::p: return NCPoly::p(a.axis);
        case AtomKind::abs_p: return NCPoly::r(1);
        case AtomKind::i: return NCPoly::imaginary_unit();
        case AtomKind::hbar: return NCPoly::hbar();
        case AtomKind::t: return NCPoly::time(1);
        case AtomKind::rational: return NCPoly::scalar(symbolic::GaussianRational(to_mpq(a)));
    }
    return {};
}

OperatorExpr scale(cplx c) { return OperatorExpr::scale(c); }

void require_t(double t)
{
    if (t == 0.0) throw std::invalid_argument("time parameter must be nonzero");
}

OperatorExpr compile_atom(const Atom& a, const GridSpec& grid, double t)
{
    switch (a.kind) {
        case AtomKind::x: return build(op::Position{a.axis});
        case AtomKind::p: return build(op::Momentum{a.axis});
        case AtomKind::abs_p: return build(op::AbsPPow{1});
        case AtomKind::i: return scale({0.0, 1.0});
        case AtomKind::hbar: return scale(grid.hbar);
        case AtomKind::t: return scale(t);
        case AtomKind::rational: return scale(static_cast<double>(a.num) / static_cast<double>(a.den.value_or(1)));
    }
    return scale(0.0);
}

// --- random trees ------------------------------------------------------------------

// Plain modulo keeps results identical across standard libraries; the bias
// is irrelevant for test generation.
int pick(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
int pick_range(std::mt19937_64& rng, int lo, int hi) { return lo + pick(rng, hi - lo + 1); }

Ast make_atom(AtomKind kind, int axis = 0) { return Ast{Atom{kind, axis, 0, std::nullopt}}; }

Ast random_rational(std::mt19937_64& rng, int max_num, int max_den, bool allow_zero)
{
    Atom a;
    do {
        a.num = pick_range(rng, -max_num, max_num);
    } while (!allow_zero && a.num == 0);
    if (pick(rng, 2) == 1) a.den = pick_range(rng, 1, max_den);
    return Ast{a};
}

Ast random_leaf(std::mt19937_64& rng)
{
    switch (pick(rng, 7)) {
        case 0: return make_atom(AtomKind::x, pick_range(rng, 1, 3));
        case 1: return make_atom(AtomKind::p, pick_range(rng, 1, 3));
        case 2: return make_atom(AtomKind::abs_p);
        case 3: return make_atom(AtomKind::i);
        case 4: return make_atom(AtomKind::hbar);
        case 5: return make_atom(AtomKind::t);
        default: return random_rational(rng, 20, 12, true);
    }
}

Ast random_tree(std::mt19937_64& rng, int depth)
{
    if (depth <= 1 || pick(rng, 4) == 0) return random_leaf(rng);
    switch (pick(rng, 4)) {
        case 0: {
            Sum s;
            const int n = pick_range(rng, 2, 3);
            for (int k = 0; k < n; ++k) s.terms.push_back({k > 0 && pick(rng, 2) == 1, random_tree(rng, depth - 1)});
            return Ast{std::move(s)};
        }
        case 1: {
            Product p;
            const int n = pick_range(rng, 2, 3);
            for (int k = 0; k < n; ++k) p.factors.push_back(random_tree(rng, depth - 1));
            return Ast{std::move(p)};
        }
        case 2: return Ast{Power{random_tree(rng, depth - 1), pick_range(rng, -3, 3)}};
        default: return Ast{Commutator{random_tree(rng, depth - 1), random_tree(rng, depth - 1)}};
    }
}

Ast random_generator(std::mt19937_64& rng)
{
    switch (pick(rng, 3)) {
        case 0: return make_atom(AtomKind::x, pick_range(rng, 1, 3));
        case 1: return make_atom(AtomKind::p, pick_range(rng, 1, 3));
        default: return make_atom(AtomKind::abs_p);
    }
}

struct Budget {
    int degree = 4;
    int inverse = 2;
};

Ast numeric_piece(std::mt19937_64& rng, Budget& budget)
{
    for (;;) {
        switch (pick(rng, 7)) {
            case 0: return random_rational(rng, 5, 6, false);
            case 1: {
                const AtomKind k[] = {AtomKind::i, AtomKind::hbar, AtomKind::t};
                return make_atom(k[pick(rng, 3)]);
            }
            case 2:
            case 3:
                if (budget.degree >= 1) {
                    --budget.degree;
                    return random_generator(rng);
                }
                break;
            case 4:
                if (budget.degree >= 2) {
                    budget.degree -= 2;
                    return Ast{Power{random_generator(rng), 2}};
                }
                break;
            case 5:
                if (budget.inverse >= 1) {
                    const int e = budget.inverse >= 2 && pick(rng, 3) == 0 ? -2 : -1;
                    budget.inverse += e;
                    return Ast{Power{make_atom(AtomKind::abs_p), e}};
                }
                break;
            default:
                if (budget.degree >= 2) {
                    budget.degree -= 2;
                    return Ast{Commutator{random_generator(rng), random_generator(rng)}};
                }
                break;
        }
    }
}

}  // namespace

Ast parse(std::string_view text) { return Parser(text).run(); }

std::string format(const Ast& ast)
{
    return std::visit(Overloaded{
                          [](const Atom& a) { return atom_text(a); },
                          [](const Sum& s) {
                              std::string out;
                              for (std::size_t k = 0; k < s.terms.size(); ++k) {
                                  const Ast& t = *s.terms[k].term;
                                  if (k) out += s.terms[k].negative ? " - " : " + ";
                                  out += is_sum(t) ? paren(format(t)) : format(t);
                              }
                              return out;
                          },
                          [](const Product& p) {
                              std::string out;
                              for (std::size_t k = 0; k < p.factors.size(); ++k) {
                                  const Ast& f = *p.factors[k];
                                  if (k) out += "*";
                                  out += (is_sum(f) || is_product(f)) ? paren(format(f)) : format(f);
                              }
                              return out;
                          },
                          [](const Power& p) {
                              const Ast& b = *p.base;
                              std::string base = (is_sum(b) || is_product(b) || is_power(b)) ? paren(format(b)) : format(b);
                              return base + "^" + std::to_string(p.exponent);
                          },
                          [](const Commutator& c) { return "[" + format(*c.lhs) + ", " + format(*c.rhs) + "]"; },
                      },
                      ast.node);
}

symbolic::NCPoly lower(const Ast& ast)
{
    using symbolic::NCPoly;
    return std::visit(Overloaded{
                          [](const Atom& a) { return lower_atom(a); },
                          [](const Sum& s) {
                              NCPoly acc;
                              for (const auto& t : s.terms) acc = t.negative ? acc - lower(*t.term) : acc + lower(*t.term);
                              return acc;
                          },
                          [](const Product& p) {
                              NCPoly acc = NCPoly::rational(1);
                              for (const auto& f : p.factors) acc = symbolic::nc_mul(acc, lower(*f));
                              return acc;
                          },
                          [](const Power& p) {
                              const Atom* a = as_atom(*p.base);
                              if (a && a->kind == AtomKind::abs_p) return NCPoly::r(p.exponent);
                              if (a && a->kind == AtomKind::t) return NCPoly::time(p.exponent);
                              if (p.exponent < 0) {
                                  throw std::invalid_argument("negative power is only allowed for |p| and t");
                              }
                              const NCPoly base = lower(*p.base);
                              NCPoly acc = NCPoly::rational(1);
                              for (int k = 0; k < p.exponent; ++k) acc = symbolic::nc_mul(acc, base);
                              return acc;
                          },
                          [](const Commutator& c) { return symbolic::commutator(lower(*c.lhs), lower(*c.rhs)); },
                      },
                      ast.node);
}

OperatorExpr compile(const Ast& ast, const GridSpec& grid, double t_value)
{
    return std::visit(
        Overloaded{
            [&](const Atom& a) { return compile_atom(a, grid, t_value); },
            [&](const Sum& s) {
                std::vector<OperatorExpr> terms;
                for (const auto& t : s.terms) {
                    OperatorExpr c = compile(*t.term, grid, t_value);
                    terms.push_back(t.negative ? OperatorExpr::compose({scale(-1.0), c}) : c);
                }
                return OperatorExpr::sum(std::move(terms));
            },
            [&](const Product& p) {
                std::vector<OperatorExpr> factors;
                for (const auto& f : p.factors) factors.push_back(compile(*f, grid, t_value));
                return OperatorExpr::compose(std::move(factors));
            },
            [&](const Power& p) {
                const Atom* a = as_atom(*p.base);
                if (a && a->kind == AtomKind::abs_p) return build(op::AbsPPow{p.exponent});
                if (a && a->kind == AtomKind::t) {
                    if (p.exponent < 0) require_t(t_value);
                    return scale(std::pow(t_value, p.exponent));
                }
                if (p.exponent < 0) throw std::invalid_argument("negative power is only allowed for |p| and t");
                if (p.exponent == 0) return scale(1.0);
                const OperatorExpr base = compile(*p.base, grid, t_value);
                return OperatorExpr::compose(std::vector<OperatorExpr>(static_cast<std::size_t>(p.exponent), base));
            },
            [&](const Commutator& c) {
                const OperatorExpr l = compile(*c.lhs, grid, t_value);
                const OperatorExpr r = compile(*c.rhs, grid, t_value);
                return OperatorExpr::sum(
                    {OperatorExpr::compose({l, r}), OperatorExpr::compose({scale(-1.0), r, l})});
            },
        },
        ast.node);
}

OperatorExpr compile(const symbolic::NCPoly& poly, const GridSpec& grid, double t_value)
{
    if (poly.is_zero()) return scale(0.0);
    std::vector<OperatorExpr> terms;
    for (const auto& m : poly.terms()) {
        if (m.coeff.t_pow < 0) require_t(t_value);
        const cplx value(m.coeff.value.re().get_d(), m.coeff.value.im().get_d());
        const double factor = std::pow(grid.hbar, m.coeff.hbar_pow) * std::pow(t_value, m.coeff.t_pow);
        std::vector<OperatorExpr> factors{scale(value * factor)};
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < m.x_exp[j]; ++k) factors.push_back(build(op::Position{j + 1}));
        }
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < m.p_exp[j]; ++k) factors.push_back(build(op::Momentum{j + 1}));
        }
        if (m.r_pow != 0) factors.push_back(build(op::AbsPPow{m.r_pow}));
        terms.push_back(OperatorExpr::compose(std::move(factors)));
    }
    return terms.size() == 1 ? terms.front() : OperatorExpr::sum(std::move(terms));
}

Ast random_ast(std::mt19937_64& rng, int max_depth) { return random_tree(rng, max_depth); }

Ast random_numeric_ast(std::mt19937_64& rng)
{
    Sum s;
    const int n_terms = pick_range(rng, 1, 3);
    for (int k = 0; k < n_terms; ++k) {
        Budget budget;
        Product p;
        const int n_factors = pick_range(rng, 1, 3);
        for (int f = 0; f < n_factors; ++f) p.factors.push_back(numeric_piece(rng, budget));
        Ast term = p.factors.size() == 1 ? *p.factors.front() : Ast{std::move(p)};
        s.terms.push_back({k > 0 && pick(rng, 2) == 1, std::move(term)});
    }
    if (s.terms.size() == 1) return *s.terms.front().term;
    return Ast{std::move(s)};
}

}  // namespace ulab::dsl
