#include "odeconn/mp.hpp"

#include <mpfr.h>

#include <cmath>
#include <mutex>

namespace odeconn {

namespace {
unsigned g_digits = 50;
constexpr unsigned kGuard = 20;
}  // namespace

void Precision::set(unsigned digits) {
    if (digits < 20) digits = 20;
    g_digits = digits;
    BigFloat::default_precision(digits + kGuard);
}

unsigned Precision::digits() { return g_digits; }
unsigned Precision::working_digits() { return g_digits + kGuard; }

BigFloat Precision::epsilon() { return pow10(-(long)g_digits); }
BigFloat Precision::tiny() { return pow10(-(long)(g_digits + kGuard) + 5); }

BigFloat pow10(long e) {
    BigFloat ten(10);
    return bmp::pow(ten, (long)e);
}

BigComplex& BigComplex::operator/=(const BigComplex& o) {
    BigFloat d = o.re * o.re + o.im * o.im;
    if (d == 0) throw std::domain_error("complex division by zero");
    BigFloat r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
}

BigFloat abs(const BigComplex& z) {
    if (z.im == 0) return bmp::abs(z.re);
    if (z.re == 0) return bmp::abs(z.im);
    return bmp::sqrt(z.re * z.re + z.im * z.im);
}

BigFloat abs_upper(const BigComplex& z) { return bmp::abs(z.re) + bmp::abs(z.im); }

BigComplex sqrt(const BigComplex& z) {
    if (z.im == 0 && z.re >= 0) return BigComplex(bmp::sqrt(z.re));
    BigFloat m = abs(z);
    BigFloat u = bmp::sqrt((m + z.re) / 2);
    BigFloat v = bmp::sqrt((m - z.re) / 2);
    if (z.im < 0) v = -v;
    // on the cut (im == 0, re < 0) this yields +i*sqrt(|re|), the upper lip
    return {u, v};
}

BigComplex exp(const BigComplex& z) {
    BigFloat m = bmp::exp(z.re);
    if (z.im == 0) return BigComplex(m);
    return {m * bmp::cos(z.im), m * bmp::sin(z.im)};
}

BigComplex log_branch(const BigComplex& z) {
    if (z.is_zero()) throw std::domain_error("log of zero");
    if (z.im == 0) {
        if (z.re > 0) return BigComplex(bmp::log(z.re));
        return {bmp::log(-z.re), Constants::pi()};
    }
    BigFloat r = bmp::log(abs(z));
    BigFloat th = bmp::atan2(z.im, z.re);
    return {r, th};
}

BigComplex pow_rat(const BigComplex& z, const BigRat& q) {
    if (q == 0) return BigComplex(1);
    if (denominator(q) == 1) {
        long n = (long)numerator(q);
        return ipow(z, n);
    }
    return exp(log_branch(z) * BigComplex(q));
}

BigComplex ipow(const BigComplex& z, long n) {
    if (n == 0) return BigComplex(1);
    bool inv = n < 0;
    unsigned long k = inv ? (unsigned long)(-n) : (unsigned long)n;
    BigComplex acc(1), base = z;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    if (inv) return BigComplex(1) / acc;
    return acc;
}

std::string to_string(const BigFloat& x, unsigned digits) {
    if (digits == 0) digits = Precision::working_digits();
    return x.str(digits, std::ios_base::scientific);
}

std::string to_string(const BigComplex& z, unsigned digits) {
    std::string s = to_string(z.re, digits);
    std::string t = to_string(z.im, digits);
    return s + (z.im < 0 ? " - " : " + ") + (z.im < 0 ? to_string(-z.im, digits) : t) + "*i";
}

// ---------------------------------------------------------------------------
// constants

namespace {

struct ConstCache {
    unsigned digits = 0;
    BigFloat pi, ln2, ln3, sqrt3, sqrt7, gamma, catalan, zeta3;
    bool checked = false;
};
ConstCache g_cache;

void refresh_cache() {
    if (g_cache.digits == Precision::working_digits()) return;
    g_cache.digits = Precision::working_digits();
    g_cache.checked = false;
    BigFloat v;
    mpfr_const_pi(v.backend().data(), MPFR_RNDN);
    g_cache.pi = v;
    mpfr_const_log2(v.backend().data(), MPFR_RNDN);
    g_cache.ln2 = v;
    g_cache.ln3 = bmp::log(BigFloat(3));
    g_cache.sqrt3 = bmp::sqrt(BigFloat(3));
    g_cache.sqrt7 = bmp::sqrt(BigFloat(7));
    mpfr_const_euler(v.backend().data(), MPFR_RNDN);
    g_cache.gamma = v;
    mpfr_const_catalan(v.backend().data(), MPFR_RNDN);
    g_cache.catalan = v;
    BigFloat three(3);
    mpfr_zeta(v.backend().data(), three.backend().data(), MPFR_RNDN);
    g_cache.zeta3 = v;
}

}  // namespace

BigFloat Constants::pi() { refresh_cache(); return g_cache.pi; }
BigFloat Constants::ln2() { refresh_cache(); return g_cache.ln2; }
BigFloat Constants::ln3() { refresh_cache(); return g_cache.ln3; }
BigFloat Constants::sqrt3() { refresh_cache(); return g_cache.sqrt3; }
BigFloat Constants::sqrt7() { refresh_cache(); return g_cache.sqrt7; }
BigFloat Constants::euler_gamma() { refresh_cache(); return g_cache.gamma; }
BigFloat Constants::catalan() { refresh_cache(); return g_cache.catalan; }
BigFloat Constants::zeta3() { refresh_cache(); return g_cache.zeta3; }

// Cl2 via its Fourier-free expansion
//   Cl2(t) = t - t*ln|t| + sum_{n>=1} zeta(2n)/(n*(2n+1)) * t^(2n+1)/(2pi)^(2n)
// valid for |t| < 2*pi. The series term ratio is (t/2pi)^2.
BigFloat Constants::clausen2(const BigFloat& theta) {
    refresh_cache();
    if (theta == 0) return BigFloat(0);
    BigFloat t = theta;
    BigFloat twopi = 2 * g_cache.pi;
    // reduce to (0, 2*pi); Cl2 is odd and 2*pi-periodic
    BigFloat sign(1);
    while (t < 0) t += twopi;
    while (t >= twopi) t -= twopi;
    if (t > g_cache.pi) {  // Cl2(2pi - t) = -Cl2(t)
        t = twopi - t;
        sign = -1;
    }
    if (t == 0) return BigFloat(0);
    BigFloat acc = t - t * bmp::log(t);
    BigFloat q = (t / twopi) * (t / twopi);
    BigFloat tp = t * q;  // t^(2n+1)/(2pi)^(2n) at n=1
    BigFloat eps = Precision::tiny();
    for (long n = 1; n < 100000; ++n) {
        BigFloat z;
        BigFloat s(2 * n);
        mpfr_zeta(z.backend().data(), s.backend().data(), MPFR_RNDN);
        BigFloat term = z / (BigFloat(n) * BigFloat(2 * n + 1)) * tp;
        acc += term;
        if (bmp::abs(term) < eps) break;
        tp *= q;
    }
    return sign * acc;
}

void Constants::self_check() {
    refresh_cache();
    if (g_cache.checked) return;
    BigFloat tol = pow10(-(long)Precision::digits() + 10);
    auto chk = [&](const BigFloat& a, const BigFloat& b, const char* what) {
        if (bmp::abs(a - b) > tol * (1 + bmp::abs(a)))
            throw std::runtime_error(std::string("constant self-check failed: ") + what);
    };
    // pi via Machin against MPFR's pi
    BigFloat machin = 16 * bmp::atan(BigFloat(1) / 5) - 4 * bmp::atan(BigFloat(1) / 239);
    chk(g_cache.pi, machin, "pi");
    chk(g_cache.ln2, bmp::log(BigFloat(2)), "ln2");
    chk(g_cache.ln3, g_cache.ln2 + bmp::log(BigFloat(3) / 2), "ln3");
    chk(g_cache.sqrt3 * g_cache.sqrt3, BigFloat(3), "sqrt3");
    chk(g_cache.sqrt7 * g_cache.sqrt7, BigFloat(7), "sqrt7");
    // Catalan = Cl2(pi/2)
    chk(g_cache.catalan, clausen2(g_cache.pi / 2), "catalan");
    // gamma via zeta series: gamma = sum_{k>=2} (-1)^k zeta(k)/k ... too slow;
    // use the identity gamma = lim ... instead check against MPFR digamma(1) = -gamma
    {
        BigFloat one(1), dg;
        mpfr_digamma(dg.backend().data(), one.backend().data(), MPFR_RNDN);
        chk(g_cache.gamma, -dg, "euler_gamma");
    }
    // zeta(3) against the Apery-accelerated series 5/2 * sum (-1)^(n-1) / (n^3 C(2n,n))
    {
        BigFloat acc(0), eps = Precision::tiny();
        BigInt binom(2);  // C(2n,n) at n=1
        for (long n = 1; n < 100000; ++n) {
            BigFloat term = BigFloat(1) / (BigFloat(n) * n * n * BigFloat(binom));
            if (n % 2 == 0) term = -term;
            acc += term;
            if (bmp::abs(term) < eps) break;
            // C(2(n+1), n+1) = C(2n,n) * (2n+1)(2n+2)/(n+1)^2
            binom = binom * (2 * n + 1) * (2 * n + 2) / ((n + 1) * (n + 1));
        }
        chk(g_cache.zeta3, BigFloat(5) / 2 * acc, "zeta3");
    }
    // Cl2 duplication: Cl2(2t) = 2 Cl2(t) - 2 Cl2(pi - t) at t = pi/3
    {
        BigFloat t = g_cache.pi / 3;
        chk(clausen2(2 * t), 2 * clausen2(t) - 2 * clausen2(g_cache.pi - t), "clausen2");
    }
    g_cache.checked = true;
}

// ---------------------------------------------------------------------------

BigComplex hyp2f1_series(const BigRat& a, const BigRat& b, const BigRat& c,
                         const BigComplex& x, int terms, BigFloat* tail) {
    if (denominator(c) == 1 && numerator(c) <= 0)
        throw std::domain_error("2F1: c is a nonpositive integer");
    if (abs(x) >= 1) throw std::domain_error("2F1 series diverges: |x| >= 1");
    BigComplex acc(1), term(1);
    for (int n = 0; n < terms; ++n) {
        BigRat f = (a + n) * (b + n) / ((c + n) * BigRat(n + 1));
        term *= BigComplex(f) * x;
        acc += term;
    }
    if (tail) {
        BigFloat q = abs(x);
        *tail = abs(term) * q / (1 - q);
    }
    return acc;
}

BigFloat elliptic_k_agm(const BigFloat& x) {
    // 2F1(1/2,1/2;1;x) = 1/AGM(1, sqrt(1-x)) for x < 1
    if (x >= 1) throw std::domain_error("elliptic_k_agm: x >= 1");
    BigFloat a(1), b = bmp::sqrt(1 - x);
    BigFloat eps = Precision::tiny();
    for (int i = 0; i < 10000; ++i) {
        BigFloat an = (a + b) / 2;
        BigFloat bn = bmp::sqrt(a * b);
        a = an;
        b = bn;
        if (bmp::abs(a - b) < eps) break;
    }
    return 1 / a;
}

BigFloat gamma_real(const BigFloat& x) {
    BigFloat r;
    mpfr_gamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

// ---------------------------------------------------------------------------
// constant-expression evaluator

namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::runtime_error("const-expr error at offset " + std::to_string(pos) + ": " + what);
    }

    BigComplex expr() {
        BigComplex v = eat('-') ? -term() : term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    BigComplex term() {
        BigComplex v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) v /= factor();
            else return v;
        }
    }
    BigComplex factor() {
        BigComplex base = atom();
        if (eat('^')) {
            bool neg = eat('-');
            skip_ws();
            size_t start = pos;
            while (pos < s.size() && isdigit((unsigned char)s[pos])) ++pos;
            if (start == pos) fail("expected integer exponent");
            long e = std::stol(s.substr(start, pos - start));
            return ipow(base, neg ? -e : e);
        }
        return base;
    }
    BigComplex atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end");
        if (eat('(')) {
            BigComplex v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (eat('-')) return -atom();
        char c = s[pos];
        if (isdigit((unsigned char)c)) {
            size_t start = pos;
            while (pos < s.size() && isdigit((unsigned char)s[pos])) ++pos;
            BigInt num(s.substr(start, pos - start));
            return BigComplex(BigFloat(num));
        }
        if (isalpha((unsigned char)c)) {
            size_t start = pos;
            while (pos < s.size() && (isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "i") return BigComplex(BigFloat(0), BigFloat(1));
            if (name == "pi") return BigComplex(Constants::pi());
            if (name == "gamma") return BigComplex(Constants::euler_gamma());
            if (name == "catalan") return BigComplex(Constants::catalan());
            if (name == "zeta3") return BigComplex(Constants::zeta3());
            if (name == "ln" || name == "log" || name == "sqrt" || name == "exp") {
                if (!eat('(')) fail("expected '(' after " + name);
                BigComplex v = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "sqrt") return sqrt(v);
                if (name == "exp") return exp(v);
                return log_branch(v);
            }
            fail("unknown symbol '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

BigComplex eval_const_expr(const std::string& text) {
    ExprParser p(text);
    BigComplex v = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return v;
}

}  // namespace odeconn
