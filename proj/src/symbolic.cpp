#include "ulab/symbolic.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace ulab::symbolic {
namespace {

void check_axis(int j)
{
    if (j < 1 || j > 3) throw std::invalid_argument("axis must be 1, 2 or 3");
}

using Key = std::tuple<MultiIndex, MultiIndex, int, int, int>;

Key key_of(const NCMonomial& m) { return {m.x_exp, m.p_exp, m.r_pow, m.coeff.hbar_pow, m.coeff.t_pow}; }

NCMonomial from_key(const Key& k, GaussianRational value)
{
    NCMonomial m;
    std::tie(m.x_exp, m.p_exp, m.r_pow, m.coeff.hbar_pow, m.coeff.t_pow) = k;
    m.coeff.value = std::move(value);
    return m;
}

using Accumulator = std::map<Key, GaussianRational>;

void accumulate(Accumulator& acc, const Key& key, const GaussianRational& value)
{
    auto [it, inserted] = acc.try_emplace(key, value);
    if (!inserted) it->second = it->second + value;
}

std::vector<NCMonomial> drain(Accumulator& acc)
{
    std::vector<NCMonomial> out;
    for (auto& [key, value] : acc) {
        if (!value.is_zero()) out.push_back(from_key(key, value));
    }
    return out;
}

// --- word rewriting ------------------------------------------------------------

enum class Letter : unsigned char { x, p, r };

struct Glyph {
    Letter kind;
    int axis = 0;   // 0-based, for x and p
    int power = 1;  // 1 for x and p, nonzero integer for r
};

using Word = std::vector<Glyph>;

struct Pending {
    GaussianRational value;
    int hbar_pow;
    int t_pow;
    Word word;
};

void append_letters(Word& w, const NCMonomial& m)
{
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < m.x_exp[j]; ++k) w.push_back({Letter::x, j, 1});
    }
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < m.p_exp[j]; ++k) w.push_back({Letter::p, j, 1});
    }
    if (m.r_pow != 0) w.push_back({Letter::r, 0, m.r_pow});
}

// Rewrites the word to fixpoint with (R1) and (R2) and adds the resulting
// normal-ordered monomials to acc.
void normal_order(Pending start, Accumulator& acc)
{
    const GaussianRational minus_i{0, -1};
    std::vector<Pending> work;
    work.push_back(std::move(start));
    while (!work.empty()) {
        Pending item = std::move(work.back());
        work.pop_back();

        std::size_t at = item.word.size();
        for (std::size_t k = 0; k + 1 < item.word.size(); ++k) {
            if (item.word[k].kind != Letter::x && item.word[k + 1].kind == Letter::x) {
                at = k;
                break;
            }
        }

        if (at == item.word.size()) {
            Key key{};
            auto& [xs, ps, r, hb, tp] = key;
            for (const Glyph& g : item.word) {
                if (g.kind == Letter::x) ++xs[g.axis];
                if (g.kind == Letter::p) ++ps[g.axis];
                if (g.kind == Letter::r) r += g.power;
            }
            hb = item.hbar_pow;
            tp = item.t_pow;
            accumulate(acc, key, item.value);
            continue;
        }

        const Glyph left = item.word[at];
        const Glyph xk = item.word[at + 1];

        // Correction term: the pair (left, x_k) is replaced by what the rule
        // leaves behind, times -i hbar (times s for R^s).
        if (left.kind == Letter::p && left.axis == xk.axis) {
            Pending extra{item.value * minus_i, item.hbar_pow + 1, item.t_pow, {}};
            extra.word.reserve(item.word.size() - 2);
            extra.word.insert(extra.word.end(), item.word.begin(), item.word.begin() + at);
            extra.word.insert(extra.word.end(), item.word.begin() + at + 2, item.word.end());
            work.push_back(std::move(extra));
        } else if (left.kind == Letter::r) {
            const int s = left.power;
            Pending extra{item.value * minus_i * GaussianRational(s), item.hbar_pow + 1, item.t_pow, {}};
            extra.word.insert(extra.word.end(), item.word.begin(), item.word.begin() + at);
            extra.word.push_back({Letter::p, xk.axis, 1});
            if (s - 2 != 0) extra.word.push_back({Letter::r, 0, s - 2});
            extra.word.insert(extra.word.end(), item.word.begin() + at + 2, item.word.end());
            work.push_back(std::move(extra));
        }

        std::swap(item.word[at], item.word[at + 1]);
        work.push_back(std::move(item));
    }
}

bool needs_rewrite(const NCMonomial& left, const NCMonomial& right)
{
    const bool left_has_pr = left.r_pow != 0 || left.p_exp[0] + left.p_exp[1] + left.p_exp[2] > 0;
    const bool right_has_x = right.x_exp[0] + right.x_exp[1] + right.x_exp[2] > 0;
    return left_has_pr && right_has_x;
}

// --- text rendering ------------------------------------------------------------

std::string rational_text(const mpq_class& q)
{
    // mpq get_str gives "n" or "n/d", matching the DSL literal grammar.
    return q.get_str();
}

// Renders one monomial; the sign is returned separately so the caller can
// emit " - " between terms.
std::pair<bool, std::string> monomial_text(const NCMonomial& m)
{
    std::vector<std::string> factors;
    bool negative = false;
    const auto& v = m.coeff.value;
    const bool real_only = sgn(v.im()) == 0;
    const bool imag_only = sgn(v.re()) == 0;
    if (real_only || imag_only) {
        mpq_class magnitude = real_only ? v.re() : v.im();
        negative = sgn(magnitude) < 0;
        if (negative) magnitude = -magnitude;
        if (magnitude != 1) factors.push_back(rational_text(magnitude));
        if (imag_only) factors.push_back("i");
    } else {
        std::string re = rational_text(v.re());
        mpq_class im = v.im();
        const bool im_negative = sgn(im) < 0;
        if (im_negative) im = -im;
        factors.push_back("(" + re + (im_negative ? " - " : " + ") + rational_text(im) + "*i)");
    }

    auto power = [&factors](const std::string& base, int e) {
        if (e == 0) return;
        factors.push_back(e == 1 ? base : base + "^" + std::to_string(e));
    };
    power("hbar", m.coeff.hbar_pow);
    power("t", m.coeff.t_pow);
    for (int j = 0; j < 3; ++j) power("x" + std::to_string(j + 1), m.x_exp[j]);
    for (int j = 0; j < 3; ++j) power("p" + std::to_string(j + 1), m.p_exp[j]);
    power("|p|", m.r_pow);

    if (factors.empty()) factors.push_back("1");
    std::string out;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        if (k) out += "*";
        out += factors[k];
    }
    return {negative, out};
}

}  // namespace

// --- NCPoly ----------------------------------------------------------------------

NCPoly NCPoly::from_terms(std::vector<NCMonomial> terms)
{
    Accumulator acc;
    for (const auto& m : terms) accumulate(acc, key_of(m), m.coeff.value);
    NCPoly out;
    out.terms_ = drain(acc);
    return out;
}

NCPoly NCPoly::monomial(NCMonomial m) { return from_terms({std::move(m)}); }

NCPoly NCPoly::scalar(GaussianRational value, int hbar_pow, int t_pow)
{
    if (hbar_pow < 0) throw std::invalid_argument("hbar power must be nonnegative");
    NCMonomial m;
    m.coeff = Coefficient{std::move(value), hbar_pow, t_pow};
    return monomial(std::move(m));
}

NCPoly NCPoly::rational(long num, long den)
{
    if (den == 0) throw std::invalid_argument("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return scalar(GaussianRational(q));
}

NCPoly NCPoly::x(int j)
{
    check_axis(j);
    NCMonomial m;
    m.coeff.value = GaussianRational(1);
    m.x_exp[j - 1] = 1;
    return monomial(std::move(m));
}

NCPoly NCPoly::p(int j)
{
    check_axis(j);
    NCMonomial m;
    m.coeff.value = GaussianRational(1);
    m.p_exp[j - 1] = 1;
    return monomial(std::move(m));
}

NCPoly NCPoly::r(int s)
{
    NCMonomial m;
    m.coeff.value = GaussianRational(1);
    m.r_pow = s;
    return monomial(std::move(m));
}

NCPoly operator+(const NCPoly& a, const NCPoly& b)
{
    std::vector<NCMonomial> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return NCPoly::from_terms(std::move(all));
}

NCPoly operator-(const NCPoly& a)
{
    NCPoly out = a;
    for (auto& m : out.terms_) m.coeff.value = -m.coeff.value;
    return out;
}

NCPoly operator-(const NCPoly& a, const NCPoly& b) { return a + (-b); }

NCPoly operator*(const Coefficient& c, const NCPoly& a)
{
    std::vector<NCMonomial> all = a.terms_;
    for (auto& m : all) m.coeff = c * m.coeff;
    return NCPoly::from_terms(std::move(all));
}

NCPoly nc_mul(const NCPoly& a, const NCPoly& b)
{
    Accumulator acc;
    for (const auto& l : a.terms()) {
        for (const auto& r : b.terms()) {
            const Coefficient c = l.coeff * r.coeff;
            if (!needs_rewrite(l, r)) {
                NCMonomial m;
                m.coeff = c;
                for (int j = 0; j < 3; ++j) {
                    m.x_exp[j] = l.x_exp[j] + r.x_exp[j];
                    m.p_exp[j] = l.p_exp[j] + r.p_exp[j];
                }
                m.r_pow = l.r_pow + r.r_pow;
                accumulate(acc, key_of(m), m.coeff.value);
                continue;
            }
            Pending start{c.value, c.hbar_pow, c.t_pow, {}};
            append_letters(start.word, l);
            append_letters(start.word, r);
            normal_order(std::move(start), acc);
        }
    }
    return NCPoly::from_terms(drain(acc));
}

NCPoly commutator(const NCPoly& a, const NCPoly& b) { return nc_mul(a, b) - nc_mul(b, a); }

PaperOps build_paper_ops(int j)
{
    check_axis(j);
    const NCPoly t_j = nc_mul(NCPoly::time(1), nc_mul(NCPoly::p(j), NCPoly::r(-1)));
    const NCPoly sym = nc_mul(NCPoly::r(1), NCPoly::x(j)) + nc_mul(NCPoly::x(j), NCPoly::r(1));
    const NCPoly e_j = nc_mul(NCPoly::rational(1, 4), nc_mul(NCPoly::time(-1), sym));
    return {t_j, e_j};
}

NCPoly isotropic_reduce(NCPoly poly)
{
    for (;;) {
        const auto& terms = poly.terms();
        bool merged = false;
        for (std::size_t a = 0; a < terms.size() && !merged; ++a) {
            const NCMonomial& first = terms[a];
            if (first.p_exp[0] < 2) continue;
            MultiIndex base = first.p_exp;
            base[0] -= 2;
            auto partner = [&](int axis) -> std::ptrdiff_t {
                MultiIndex want = base;
                want[axis] += 2;
                for (std::size_t b = 0; b < terms.size(); ++b) {
                    const NCMonomial& m = terms[b];
                    if (m.p_exp == want && m.x_exp == first.x_exp && m.r_pow == first.r_pow &&
                        m.coeff == first.coeff) {
                        return static_cast<std::ptrdiff_t>(b);
                    }
                }
                return -1;
            };
            const auto second = partner(1);
            const auto third = partner(2);
            if (second < 0 || third < 0) continue;

            NCMonomial reduced = first;
            reduced.p_exp = base;
            reduced.r_pow += 2;
            NCPoly rest = poly - NCPoly::monomial(first) - NCPoly::monomial(terms[second]) -
                          NCPoly::monomial(terms[third]);
            poly = rest + NCPoly::monomial(reduced);
            merged = true;
        }
        if (!merged) return poly;
    }
}

NCPoly sum_over_axes(const std::function<NCPoly(int)>& template_)
{
    return isotropic_reduce(template_(1) + template_(2) + template_(3));
}

std::string to_string(const NCPoly& poly)
{
    if (poly.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& m : poly.terms()) {
        auto [negative, text] = monomial_text(m);
        if (first) {
            if (negative) {
                // A leading sign can only attach to an integer literal.
                out += (text.front() >= '0' && text.front() <= '9') ? "-" + text : "-1*" + text;
            } else {
                out += text;
            }
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += text;
        }
    }
    return out;
}

}  // namespace ulab::symbolic
