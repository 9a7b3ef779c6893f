#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ulab::symbolic {

/// Exact a + b i with rational a, b.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(int re) : re_(re) {}
    GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im))
    {
        // mpq_class(n, d) is not reduced on construction
        re_.canonicalize();
        im_.canonicalize();
    }
    static GaussianRational i() { return {0, 1}; }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }
    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

/// value * hbar^hbar_pow * t^t_pow.
struct Coefficient {
    GaussianRational value;
    int hbar_pow = 0;
    int t_pow = 0;

    friend Coefficient operator*(const Coefficient& a, const Coefficient& b)
    {
        return {a.value * b.value, a.hbar_pow + b.hbar_pow, a.t_pow + b.t_pow};
    }
    bool operator==(const Coefficient&) const = default;
};

using MultiIndex = std::array<int, 3>;

/// coeff * x^x_exp * p^p_exp * R^r_pow, with R = |p|. The word is normal
/// ordered: x factors leftmost, then p factors, then the power of R.
struct NCMonomial {
    Coefficient coeff;
    MultiIndex x_exp{};
    MultiIndex p_exp{};
    int r_pow = 0;

    bool operator==(const NCMonomial&) const = default;
};

/// Sum of normal-ordered monomials, sorted lexicographically on
/// (x_exp, p_exp, r_pow, hbar_pow, t_pow) with no duplicate keys and no
/// zero coefficients.
class NCPoly {
public:
    NCPoly() = default;

    static NCPoly monomial(NCMonomial m);
    /// Merges like terms, drops zeros and sorts.
    static NCPoly from_terms(std::vector<NCMonomial> terms);
    static NCPoly scalar(GaussianRational value, int hbar_pow = 0, int t_pow = 0);
    static NCPoly rational(long num, long den = 1);
    static NCPoly imaginary_unit() { return scalar(GaussianRational::i()); }
    static NCPoly hbar() { return scalar(1, 1, 0); }
    static NCPoly time(int power = 1) { return scalar(1, 0, power); }
    static NCPoly x(int j);
    static NCPoly p(int j);
    static NCPoly r(int s = 1);

    const std::vector<NCMonomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend NCPoly operator+(const NCPoly& a, const NCPoly& b);
    friend NCPoly operator-(const NCPoly& a, const NCPoly& b);
    friend NCPoly operator-(const NCPoly& a);
    /// Multiplication by a scalar coefficient (central, so no reordering).
    friend NCPoly operator*(const Coefficient& c, const NCPoly& a);
    bool operator==(const NCPoly&) const = default;

private:
    std::vector<NCMonomial> terms_;
};

/// Normal-ordered product using only
///   (R1) p_j x_k = x_k p_j - i hbar delta_jk
///   (R2) R^s x_k = x_k R^s - i hbar s p_k R^(s-2)
/// applied until no p or R stands left of an x.
NCPoly nc_mul(const NCPoly& a, const NCPoly& b);

/// nc_mul(a, b) - nc_mul(b, a).
NCPoly commutator(const NCPoly& a, const NCPoly& b);

struct PaperOps {
    NCPoly time;    ///< t_j = t p_j R^-1
    NCPoly energy;  ///< e_j = (1/4) t^-1 (R x_j + x_j R), normal ordered
};

PaperOps build_paper_ops(int j);

/// Merges any three monomials that agree except for p_exp = q + 2e_1,
/// q + 2e_2, q + 2e_3 into one monomial with p_exp = q and r_pow + 2
/// (p1^2 + p2^2 + p3^2 = R^2), until no triple remains.
NCPoly isotropic_reduce(NCPoly poly);

/// template_(1) + template_(2) + template_(3), then isotropic_reduce.
NCPoly sum_over_axes(const std::function<NCPoly(int)>& template_);

/// Canonical text in operator-DSL syntax, e.g. "i*hbar*p1*|p|^-1".
std::string to_string(const NCPoly& poly);

}  // namespace ulab::symbolic
