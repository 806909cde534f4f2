#pragma once

// Exact arithmetic substrate: rationals (GMP-backed), dense univariate
// polynomials over Q, quadratic extension fields Q(sqrt(d)), algebraic
// points (minimal polynomial + isolating approximation), and the parser
// for polynomial expressions.

#include "odeconn/mp.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace odeconn {

// Dense polynomial over Q, coefficients indexed by degree.
// Trailing zeros are trimmed; the zero polynomial has empty coefficients.
struct RatPoly {
    std::vector<BigRat> c;

    RatPoly() = default;
    explicit RatPoly(std::vector<BigRat> coeffs) : c(std::move(coeffs)) { trim(); }
    static RatPoly constant(const BigRat& v);
    static RatPoly monomial(const BigRat& v, int deg);

    void trim();
    bool is_zero() const { return c.empty(); }
    int degree() const { return (int)c.size() - 1; }  // -1 for zero
    BigRat coeff(int k) const { return k >= 0 && k < (int)c.size() ? c[k] : BigRat(0); }
    BigRat lead() const { return c.empty() ? BigRat(0) : c.back(); }

    BigRat eval(const BigRat& x) const;
    BigComplex eval(const BigComplex& x) const;
    RatPoly derivative() const;

    RatPoly operator-() const;
    RatPoly& operator+=(const RatPoly& o);
    RatPoly& operator-=(const RatPoly& o);

    bool operator==(const RatPoly& o) const { return c == o.c; }
};

RatPoly operator+(RatPoly a, const RatPoly& b);
RatPoly operator-(RatPoly a, const RatPoly& b);
RatPoly operator*(const RatPoly& a, const RatPoly& b);
RatPoly operator*(const BigRat& s, RatPoly p);
RatPoly poly_pow(const RatPoly& a, unsigned e);

// Quotient and remainder of exact division over Q (b nonzero).
std::pair<RatPoly, RatPoly> poly_divmod(const RatPoly& a, const RatPoly& b);
bool poly_divides(const RatPoly& b, const RatPoly& a);  // b | a

// Monic gcd over Q.
RatPoly poly_gcd(RatPoly a, RatPoly b);

// Content (gcd of integerized coefficients over Z, positive) and the
// primitive integer polynomial a / content. sign convention: the primitive
// part has positive leading coefficient.
BigRat poly_content(const RatPoly& a);
RatPoly poly_primitive(const RatPoly& a);

// Yun squarefree decomposition: returns factors g_i with a = lead * prod g_i^i.
std::vector<RatPoly> squarefree_decomposition(const RatPoly& a);

// w -> a + b*x substitution, exact.
RatPoly compose_affine(const RatPoly& p, const BigRat& a, const BigRat& b);
// coefficient reversal: x^deg * p(1/x)
RatPoly poly_reverse(const RatPoly& p);

std::string poly_to_string(const RatPoly& p, const std::string& var = "w");

// Parses integers, rational literals a/b, one variable symbol, + - * ^ and
// parentheses. Floating literals are rejected so that parsing is exact.
// Throws ParseError carrying a byte offset on malformed input.
struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& msg, size_t off)
        : std::runtime_error(msg + " (byte " + std::to_string(off) + ")"), offset(off) {}
};
RatPoly parse_poly(const std::string& text, const std::string& var = "w");

// ---------------------------------------------------------------------------
// Q(sqrt(d)) for a squarefree integer d (possibly negative): a + b*sqrt(d).

struct QuadExt {
    BigRat a, b;
    BigInt d;  // shared discriminant; d of an arithmetic result follows operands

    QuadExt() : a(0), b(0), d(0) {}
    QuadExt(const BigRat& ra) : a(ra), b(0), d(0) {}
    QuadExt(const BigRat& ra, const BigRat& rb, const BigInt& dd) : a(ra), b(rb), d(dd) {}

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }

    QuadExt conj() const { return {a, -b, d}; }
    BigComplex to_complex() const;

    QuadExt operator-() const { return {-a, -b, d}; }
    QuadExt& operator+=(const QuadExt& o);
    QuadExt& operator-=(const QuadExt& o);
    QuadExt& operator*=(const QuadExt& o);
    QuadExt& operator/=(const QuadExt& o);
    bool operator==(const QuadExt& o) const { return a == o.a && b == o.b; }
};

QuadExt operator+(QuadExt x, const QuadExt& y);
QuadExt operator-(QuadExt x, const QuadExt& y);
QuadExt operator*(QuadExt x, const QuadExt& y);
QuadExt operator/(QuadExt x, const QuadExt& y);

// ---------------------------------------------------------------------------
// Algebraic points.

struct AlgebraicPoint {
    RatPoly min_poly;       // irreducible over Q (degree <= 2 certified; higher
                            // degrees are "as factored", no closed form)
    BigComplex approx;      // refined to working precision
    int im_sign = 0;        // root selector: sign of the imaginary part,
                            // 0 for real roots
    int real_index = 0;     // among real roots of min_poly, index in ascending order
    // closed form a + b*sqrt(d) when min_poly is quadratic
    std::optional<QuadExt> closed_form;

    bool is_rational() const { return min_poly.degree() == 1; }
    BigRat rational_value() const;  // valid when degree 1
    std::string describe() const;
};

// All roots of a squarefree polynomial, Aberth-Ehrlich at working precision.
std::vector<BigComplex> numeric_roots(const RatPoly& p);

// Newton refinement of a simple root to working precision.
BigComplex refine_root(const RatPoly& p, BigComplex z);

struct FactorRoots {
    RatPoly factor;     // irreducible-or-unsplit factor over Q
    int multiplicity;
    std::vector<AlgebraicPoint> points;
    bool exact;         // degree <= 2: closed forms available
};

// Squarefree factorization over Q; linear and quadratic rational factors are
// split off exactly (closed forms attached), anything of higher degree is
// returned whole with isolated numeric roots.
std::vector<FactorRoots> poly_roots_exact(const RatPoly& p);

// Continued-fraction rationalization: smallest-denominator rational within
// tol of x, denominator capped by max_den. nullopt if none.
std::optional<BigRat> rationalize(const BigFloat& x, const BigFloat& tol, const BigInt& max_den);

std::string rat_to_string(const BigRat& r);
BigRat rat_from_string(const std::string& s);

}  // namespace odeconn
