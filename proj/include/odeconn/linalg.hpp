#pragma once

// Dense complex matrices at working precision: solve, inverse, determinant,
// rank with threshold, norms.

#include "odeconn/mp.hpp"

#include <vector>

namespace odeconn {

struct CMatrix {
    int rows = 0, cols = 0;
    std::vector<BigComplex> a;  // row-major

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), a(r * c) {}
    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = BigComplex(1);
        return m;
    }

    BigComplex& operator()(int i, int j) { return a[i * cols + j]; }
    const BigComplex& operator()(int i, int j) const { return a[i * cols + j]; }
};

inline CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw std::domain_error("matrix product shape mismatch");
    CMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x(i, k).is_zero()) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
        }
    return r;
}

inline CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    CMatrix r(x.rows, x.cols);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    CMatrix r(x.rows, x.cols);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline CMatrix conj(const CMatrix& x) {
    CMatrix r = x;
    for (auto& v : r.a) v = conj(v);
    return r;
}

inline BigFloat max_norm(const CMatrix& x) {
    BigFloat m(0);
    for (auto& v : x.a) m = (std::max)(m, abs_upper(v));
    return m;
}

// LU solve with partial pivoting; returns X solving A X = B. det receives the
// determinant, cond_est a crude pivot-ratio condition estimate.
CMatrix lu_solve(CMatrix A, CMatrix B, BigComplex* det = nullptr, BigFloat* cond_est = nullptr);

inline CMatrix inverse(const CMatrix& A, BigComplex* det = nullptr, BigFloat* cond = nullptr) {
    return lu_solve(A, CMatrix::identity(A.rows), det, cond);
}

// numeric rank with relative threshold
int rank_threshold(CMatrix A, const BigFloat& rel_tol);

CMatrix matpow(const CMatrix& A, int k);

}  // namespace odeconn
