#pragma once

// Exact differential-operator algebra over Q[w]: construction, Leibniz
// multiplication, application to series, right Euclidean division, operator
// file I/O, recentering at a point, and singular-point analysis.

#include "odeconn/series.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace odeconn {

// sum_k coeff[k] * D^k with D = d/dw; coeff[order] nonzero.
// Stored denominator-cleared and in primitive form: no common polynomial or
// rational content across the coefficient list, leading polynomial has
// positive leading coefficient.
struct DiffOperator {
    std::vector<RatPoly> coeff;
    std::string label;

    DiffOperator() = default;
    explicit DiffOperator(std::vector<RatPoly> c, std::string lbl = "");

    int order() const { return (int)coeff.size() - 1; }
    const RatPoly& lead() const { return coeff.back(); }
    void normalize();  // clear common polynomial/rational content

    bool operator==(const DiffOperator& o) const { return coeff == o.coeff; }
};

// Product in the operator ring over Q(w). A stored operator stands for its
// normalized form (1/lead)*sum p_k D^k, so the factors' cleared denominators
// are reinstated before composing and the result is cleared again.
DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b);

// Literal Leibniz composition of the written polynomial forms (no
// normalization): op_mul_raw(D, w*D) = w*D^2 + D.
DiffOperator op_mul_raw(const DiffOperator& a, const DiffOperator& b);

// Apply the operator to a truncated Taylor series at w=0 (plain series, no
// logs); input of length N yields max(N - order, 0) trustworthy output terms
// but the full array is returned.
template <class F>
std::vector<F> op_apply(const DiffOperator& a, const std::vector<F>& s) {
    int n = (int)s.size();
    std::vector<F> acc(n, F(BigRat(0)));
    std::vector<F> der(s);
    for (int k = 0; k <= a.order(); ++k) {
        if (!a.coeff[k].is_zero()) {
            auto pk = Poly<F>::from_ratpoly(a.coeff[k]);
            acc = series_add(acc, series_mul(pk.c, der, n));
        }
        der = series_derivative(der);
        der.resize(n, F(BigRat(0)));
    }
    return acc;
}

// Right Euclidean division in the noncommutative operator ring over Q(w):
// a = q * b + r with ord(r) < ord(b). verify_factor reports whether r = 0.
struct RightDivision {
    bool divides;
    DiffOperator quotient;   // denominator-cleared primitive form
    int remainder_order;     // -1 when divides
    std::string remainder_note;
};
RightDivision verify_factor(const DiffOperator& a, const DiffOperator& right);

// file format: 'order:', 'var: w', 'label:', 'coeff[k]: <poly-expr>' lines
DiffOperator read_operator(std::istream& in);
DiffOperator read_operator_file(const std::string& path);
std::string write_operator(const DiffOperator& op);

// ---------------------------------------------------------------------------
// Local form at a point.

// Local variable conventions: x = w at 0; x = 1 - w/ws at finite ws != 0;
// x = 1/w at infinity.
struct LocalMap {
    enum Kind { AtZero, AtFinite, AtInfinity } kind = AtZero;
    // ws for AtFinite; exact when available
    std::optional<BigRat> ws_rat;
    std::optional<QuadExt> ws_quad;
    BigComplex ws_num;

    std::string describe() const;
    BigComplex to_local(const BigComplex& w) const;    // x(w)
    BigComplex from_local(const BigComplex& x) const;  // w(x)
};

// Operator recentred to the local variable, coefficients in F.
template <class F>
struct LocalOperator {
    std::vector<Poly<F>> coeff;  // sum coeff[k](x) D_x^k
    int order() const { return (int)coeff.size() - 1; }
};

LocalOperator<BigRat> recenter_rational(const DiffOperator& op, const LocalMap& map);
LocalOperator<QuadExt> recenter_quadratic(const DiffOperator& op, const QuadExt& ws);
LocalOperator<BigComplex> recenter_numeric(const DiffOperator& op, const LocalMap& map);

// f_j(s) data: L x^s = sum_j f_j(s) x^(s + j0 + j); f[0] is the indicial
// polynomial, deg f[0] == order iff the point is regular (Fuchs condition).
template <class F>
struct IndicialData {
    int j0 = 0;
    std::vector<Poly<F>> f;
};

template <class F>
IndicialData<F> indicial_data(const LocalOperator<F>& lop);

// ---------------------------------------------------------------------------
// Singular points.

struct SingularPointInfo {
    bool at_infinity = false;
    AlgebraicPoint location;  // meaningful when !at_infinity
    LocalMap map;
    bool fuchsian = true;
    int offending_pole_order = 0;  // when !fuchsian
    std::vector<BigRat> exponents;  // indicial roots (all rational for the
                                    // operators handled here)
    bool exponents_exact = true;    // false when recovered from numeric roots
    int log_count = 0;      // number of independent solutions carrying logs
    int max_log_power = 0;
    bool apparent = false;
    bool ordinary = false;  // only possible for the point at infinity

    std::string describe_location() const;
};

struct SingularAnalysis {
    std::vector<SingularPointInfo> points;
    // Fuchs relation: sum of all exponents == order(order-1)/2 * (#points-2)
    BigRat exponent_sum() const;
};

// Full singular-point analysis: exact at rational/quadratic points, numeric
// probing elsewhere. probe_guard extends the Frobenius probe depth past the
// largest exponent gap.
SingularAnalysis singular_points(const DiffOperator& op, int probe_guard = 10);

}  // namespace odeconn
