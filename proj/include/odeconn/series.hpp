#pragma once

// Truncated power-series arithmetic over an abstract coefficient field:
// exact rationals, Q(sqrt(d)), or arbitrary-precision complex numbers.

#include "odeconn/exact.hpp"

#include <functional>
#include <vector>

namespace odeconn {

template <class F>
struct FieldOps;

template <>
struct FieldOps<BigRat> {
    static constexpr bool exact = true;
    static BigRat from_rat(const BigRat& r) { return r; }
    static bool is_zero(const BigRat& v, const BigFloat& /*scale*/) { return v == 0; }
    static BigComplex to_complex(const BigRat& v) { return BigComplex(v); }
};

template <>
struct FieldOps<QuadExt> {
    static constexpr bool exact = true;
    static QuadExt from_rat(const BigRat& r) { return QuadExt(r); }
    static bool is_zero(const QuadExt& v, const BigFloat& /*scale*/) { return v.is_zero(); }
    static BigComplex to_complex(const QuadExt& v) { return v.to_complex(); }
};

template <>
struct FieldOps<BigComplex> {
    static constexpr bool exact = false;
    static BigComplex from_rat(const BigRat& r) { return BigComplex(r); }
    // structural zero decision relative to the scale of surrounding data
    static bool is_zero(const BigComplex& v, const BigFloat& scale) {
        BigFloat thr = pow10(-(long)Precision::digits() / 2) * (scale == 0 ? BigFloat(1) : scale);
        return abs_upper(v) < thr;
    }
    static BigComplex to_complex(const BigComplex& v) { return v; }
};

// Dense polynomial / truncated series with coefficients in F.
template <class F>
struct Poly {
    std::vector<F> c;

    Poly() = default;
    explicit Poly(std::vector<F> v) : c(std::move(v)) {}

    int degree_bound() const { return (int)c.size() - 1; }
    F coeff(int k) const { return k >= 0 && k < (int)c.size() ? c[k] : F(BigRat(0)); }

    static Poly from_ratpoly(const RatPoly& p) {
        Poly q;
        q.c.reserve(p.c.size());
        for (const auto& v : p.c) q.c.push_back(FieldOps<F>::from_rat(v));
        return q;
    }

    F eval(const F& x) const {
        F acc = F(BigRat(0));
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * F(BigRat((long)k));
        return d;
    }
};

// series combinators (all truncated to n terms)
template <class F>
std::vector<F> series_mul(const std::vector<F>& a, const std::vector<F>& b, int n) {
    std::vector<F> r(n, F(BigRat(0)));
    for (int i = 0; i < (int)a.size() && i < n; ++i) {
        for (int j = 0; j < (int)b.size() && i + j < n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <class F>
std::vector<F> series_add(std::vector<F> a, const std::vector<F>& b) {
    if (b.size() > a.size()) a.resize(b.size(), F(BigRat(0)));
    for (size_t k = 0; k < b.size(); ++k) a[k] += b[k];
    return a;
}

template <class F>
std::vector<F> series_scale(const F& s, std::vector<F> a) {
    for (auto& v : a) v = v * s;
    return a;
}

// 1 / a with a[0] != 0
template <class F>
std::vector<F> series_inverse(const std::vector<F>& a, int n) {
    std::vector<F> r(n, F(BigRat(0)));
    F inv0 = F(BigRat(1)) / a[0];
    r[0] = inv0;
    for (int k = 1; k < n; ++k) {
        F acc = F(BigRat(0));
        for (int j = 1; j <= k && j < (int)a.size(); ++j) acc += a[j] * r[k - j];
        r[k] = -inv0 * acc;
    }
    return r;
}

// a^q for rational q, a[0] == 1; the standard first-order recurrence
// n*c_n = sum_{j=1..n} ((q+1)j - n) a_j c_{n-j}.
template <class F>
std::vector<F> series_pow_rat(const std::vector<F>& a, const BigRat& q, int n) {
    std::vector<F> r(n, F(BigRat(0)));
    r[0] = F(BigRat(1));
    for (int k = 1; k < n; ++k) {
        F acc = F(BigRat(0));
        for (int j = 1; j <= k && j < (int)a.size(); ++j) {
            BigRat w = (q + 1) * BigRat(j) - BigRat(k);
            acc += F(w) * (a[j] * r[k - j]);
        }
        r[k] = acc / F(BigRat(k));
    }
    return r;
}

template <class F>
std::vector<F> series_derivative(const std::vector<F>& a) {
    std::vector<F> d;
    if (a.size() <= 1) return d;
    d.resize(a.size() - 1);
    for (size_t k = 1; k < a.size(); ++k) d[k - 1] = a[k] * F(BigRat((long)k));
    return d;
}

}  // namespace odeconn
