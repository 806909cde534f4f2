#pragma once

// Arbitrary-precision real/complex arithmetic and the constant library.
// One global precision context per run; values created after set_precision()
// carry the context precision plus guard digits.

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace odeconn {

namespace bmp = boost::multiprecision;

using BigInt = bmp::number<bmp::gmp_int, bmp::et_off>;
using BigRat = bmp::number<bmp::gmp_rational, bmp::et_off>;
using BigFloat = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;

// Global precision context (decimal digits requested by the run).
// Working precision adds guard digits on top.
struct Precision {
    static void set(unsigned digits);
    static unsigned digits();          // requested digits
    static unsigned working_digits();  // digits + guard
    static BigFloat epsilon();         // 10^(-digits)
    static BigFloat tiny();            // 10^(-working+5), structural zero threshold
};

inline BigFloat to_float(const BigRat& r) {
    return BigFloat(numerator(r)) / BigFloat(denominator(r));
}
inline BigFloat to_float(const BigInt& z) { return BigFloat(z); }

BigFloat pow10(long e);

struct BigComplex {
    BigFloat re, im;

    BigComplex() : re(0), im(0) {}
    BigComplex(const BigFloat& r) : re(r), im(0) {}
    BigComplex(const BigFloat& r, const BigFloat& i) : re(r), im(i) {}
    BigComplex(long v) : re(v), im(0) {}
    explicit BigComplex(const BigRat& r) : re(to_float(r)), im(0) {}

    bool is_zero() const { return re == 0 && im == 0; }

    BigComplex operator-() const { return {-re, -im}; }
    BigComplex& operator+=(const BigComplex& o) { re += o.re; im += o.im; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re -= o.re; im -= o.im; return *this; }
    BigComplex& operator*=(const BigComplex& o) {
        BigFloat r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    BigComplex& operator/=(const BigComplex& o);
};

inline BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
inline BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
inline BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
inline BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
inline bool operator==(const BigComplex& a, const BigComplex& b) { return a.re == b.re && a.im == b.im; }

inline BigComplex conj(const BigComplex& z) { return {z.re, -z.im}; }
BigFloat abs(const BigComplex& z);
BigFloat abs_upper(const BigComplex& z);  // |re|+|im|, cheap norm
BigComplex sqrt(const BigComplex& z);
BigComplex exp(const BigComplex& z);

// Principal logarithm with the cut on the negative real axis; on the cut
// itself returns ln|x| + i*pi (the upper-lip value).
BigComplex log_branch(const BigComplex& z);

// z^q for rational q, principal branch consistent with log_branch.
BigComplex pow_rat(const BigComplex& z, const BigRat& q);
BigComplex ipow(const BigComplex& z, long n);

std::string to_string(const BigFloat& x, unsigned digits = 0);  // 0 = full precision
std::string to_string(const BigComplex& z, unsigned digits = 0);

// Named high-precision constants. Each evaluator self-checks against an
// independent identity to the context precision minus 10 digits (checked
// once per precision context).
struct Constants {
    static BigFloat pi();
    static BigFloat ln2();
    static BigFloat ln3();
    static BigFloat sqrt3();
    static BigFloat sqrt7();
    static BigFloat euler_gamma();
    static BigFloat catalan();
    static BigFloat zeta3();
    static BigFloat clausen2(const BigFloat& theta);
    static BigComplex two_pi_i() { return BigComplex(BigFloat(0), 2 * pi()); }
    static void self_check();  // throws on mismatch
};

// Gauss hypergeometric series 2F1(a,b;c;x) summed directly; |x| must be < 1.
// Returns the value and reports the magnitude of the first neglected term.
BigComplex hyp2f1_series(const BigRat& a, const BigRat& b, const BigRat& c,
                         const BigComplex& x, int terms, BigFloat* tail = nullptr);

// Complete elliptic integral K as 2F1(1/2,1/2;1;x), via the AGM (oracle path).
BigFloat elliptic_k_agm(const BigFloat& x);

// Gamma function at a real argument (MPFR).
BigFloat gamma_real(const BigFloat& x);

// Tiny constant-expression evaluator used by fixture files and tests.
// Grammar: + - * / ^ ( ), integer and a/b literals, i, pi, ln(expr),
// sqrt(expr), exp(expr). Exactness is not required here; everything is
// evaluated in BigComplex at working precision.
BigComplex eval_const_expr(const std::string& text);

}  // namespace odeconn
