#include "odeconn/diffop.hpp"

#include <fstream>
#include <sstream>

namespace odeconn {

DiffOperator::DiffOperator(std::vector<RatPoly> c, std::string lbl)
    : coeff(std::move(c)), label(std::move(lbl)) {
    while (!coeff.empty() && coeff.back().is_zero()) coeff.pop_back();
    if (coeff.empty()) throw std::domain_error("zero differential operator");
    normalize();
}

void DiffOperator::normalize() {
    // common rational content
    RatPoly g;
    for (const auto& p : coeff) {
        if (p.is_zero()) continue;
        g = g.is_zero() ? p : poly_gcd(g, p);
        if (g.degree() == 0) break;
    }
    if (!g.is_zero() && g.degree() > 0) {
        for (auto& p : coeff)
            if (!p.is_zero()) p = poly_divmod(p, g).first;
    }
    // integer content, sign fixed by the leading polynomial
    BigRat content(0);
    for (const auto& p : coeff) {
        for (const auto& v : p.c) {
            if (v == 0) continue;
            if (content == 0) content = abs(v);
            else content = BigRat(gcd(numerator(content) * denominator(v),
                                      numerator(abs(v)) * denominator(content)),
                                  denominator(content) * denominator(v));
        }
    }
    if (content != 0) {
        if (coeff.back().lead() < 0) content = -content;
        BigRat inv = 1 / content;
        for (auto& p : coeff) p = inv * p;
    }
}

// ---------------------------------------------------------------------------
// rational functions over Q(w)

namespace {

struct RF {  // rational function
    RatPoly n, d;

    RF() : n(), d(RatPoly::constant(BigRat(1))) {}
    explicit RF(RatPoly num) : n(std::move(num)), d(RatPoly::constant(BigRat(1))) {}
    RF(RatPoly num, RatPoly den) : n(std::move(num)), d(std::move(den)) { reduce(); }

    bool is_zero() const { return n.is_zero(); }

    void reduce() {
        if (n.is_zero()) {
            d = RatPoly::constant(BigRat(1));
            return;
        }
        RatPoly g = poly_gcd(n, d);
        if (g.degree() > 0) {
            n = poly_divmod(n, g).first;
            d = poly_divmod(d, g).first;
        }
        BigRat lead = d.lead();
        if (lead != 1) {
            n = (1 / lead) * n;
            d = (1 / lead) * d;
        }
    }
};

RF operator+(const RF& a, const RF& b) { return RF(a.n * b.d + b.n * a.d, a.d * b.d); }
RF operator-(const RF& a, const RF& b) { return RF(a.n * b.d - b.n * a.d, a.d * b.d); }
RF operator*(const RF& a, const RF& b) { return RF(a.n * b.n, a.d * b.d); }
RF operator/(const RF& a, const RF& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return RF(a.n * b.d, a.d * b.n);
}

RF rf_derivative(const RF& a) {
    return RF(a.n.derivative() * a.d - a.n * a.d.derivative(), a.d * a.d);
}

// clear denominators of an RF coefficient list into a DiffOperator
DiffOperator clear_denominators(const std::vector<RF>& rf, std::string lbl) {
    RatPoly common = RatPoly::constant(BigRat(1));
    for (const auto& q : rf)
        if (!q.is_zero()) common = poly_divmod(common * q.d, poly_gcd(common, q.d)).first;
    std::vector<RatPoly> out(rf.size());
    for (size_t k = 0; k < rf.size(); ++k) {
        if (rf[k].is_zero()) continue;
        out[k] = rf[k].n * poly_divmod(common, rf[k].d).first;
    }
    return DiffOperator(std::move(out), std::move(lbl));
}

}  // namespace

// A stored operator represents (1/lead) * sum p_k D^k, the paper's normalized
// form; the product is taken in the ring over Q(w) and the result is cleared
// back to primitive polynomial form.
DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b) {
    int n = a.order() + b.order();
    std::vector<RF> out(n + 1);
    RF blead(b.lead());
    for (int k = 0; k <= a.order(); ++k) {
        if (a.coeff[k].is_zero()) continue;
        RF ak(a.coeff[k]);
        for (int j = 0; j <= b.order(); ++j) {
            if (b.coeff[j].is_zero()) continue;
            RF der = RF(b.coeff[j]) / blead;
            BigRat binom(1);
            for (int i = k; i >= 0; --i) {
                // C(k, k-i) * a_k * (b_j/b_lead)^(k-i) * D^(i+j)
                RF term = ak * der;
                term.n = binom * term.n;
                out[i + j] = out[i + j] + term;
                if (i > 0) {
                    der = rf_derivative(der);
                    binom = binom * BigRat(i) / BigRat(k - i + 1);
                }
            }
        }
    }
    std::string lbl;
    if (!a.label.empty() && !b.label.empty()) lbl = a.label + "*" + b.label;
    return clear_denominators(out, std::move(lbl));
}

// literal Leibniz composition of the written polynomial forms
DiffOperator op_mul_raw(const DiffOperator& a, const DiffOperator& b) {
    int n = a.order() + b.order();
    std::vector<RatPoly> out(n + 1);
    for (int k = 0; k <= a.order(); ++k) {
        if (a.coeff[k].is_zero()) continue;
        for (int j = 0; j <= b.order(); ++j) {
            if (b.coeff[j].is_zero()) continue;
            RatPoly der = b.coeff[j];
            BigRat binom(1);
            for (int i = k; i >= 0; --i) {
                out[i + j] += binom * (a.coeff[k] * der);
                if (i > 0) {
                    der = der.derivative();
                    binom = binom * BigRat(i) / BigRat(k - i + 1);
                }
            }
        }
    }
    return DiffOperator(std::move(out));
}

RightDivision verify_factor(const DiffOperator& a, const DiffOperator& right) {
    if (right.order() > a.order())
        throw std::domain_error("verify_factor: divisor order exceeds dividend order");
    // divide the normalized forms: (1/alead) a = q * (1/blead) b + r
    int m = a.order(), n = right.order();
    RF alead(a.lead()), blead(right.lead());
    std::vector<RF> rem(m + 1);
    for (int k = 0; k <= m; ++k) rem[k] = RF(a.coeff[k]) / alead;
    std::vector<RF> bt(n + 1);
    for (int j = 0; j <= n; ++j) bt[j] = RF(right.coeff[j]) / blead;
    std::vector<RF> quot(m - n + 1);

    for (int i = m - n; i >= 0; --i) {
        RF q = rem[i + n];  // bt[n] == 1
        quot[i] = q;
        // rem -= (q D^i) * (1/blead) b
        for (int j = 0; j <= n; ++j) {
            RF der = bt[j];
            BigRat binom(1);
            for (int t = i; t >= 0; --t) {
                RF term = q * der;
                term.n = binom * term.n;
                rem[t + j] = rem[t + j] - term;
                if (t > 0) {
                    der = rf_derivative(der);
                    binom = binom * BigRat(t) / BigRat(i - t + 1);
                }
            }
        }
    }

    RightDivision out;
    out.remainder_order = -1;
    for (int k = 0; k <= m; ++k) {
        rem[k].reduce();
        if (!rem[k].is_zero()) out.remainder_order = k;
    }
    out.divides = out.remainder_order < 0;
    if (!out.divides) {
        std::ostringstream os;
        os << "nonzero remainder of order " << out.remainder_order;
        out.remainder_note = os.str();
    }
    bool all_zero = true;
    for (auto& q : quot) all_zero = all_zero && q.is_zero();
    if (!all_zero) out.quotient = clear_denominators(quot, "");
    return out;
}

// ---------------------------------------------------------------------------
// operator file I/O

DiffOperator read_operator(std::istream& in) {
    std::string line, var = "w", label;
    int order = -1;
    std::vector<RatPoly> coeff;
    auto strip = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        size_t b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::runtime_error("operator file: missing ':' in line '" + line + "'");
        std::string key = strip(line.substr(0, colon));
        std::string val = strip(line.substr(colon + 1));
        if (key == "order") {
            order = std::stoi(val);
            coeff.assign(order + 1, RatPoly());
        } else if (key == "var") {
            var = val;
        } else if (key == "label") {
            label = val;
        } else if (key.rfind("coeff[", 0) == 0) {
            auto close = key.find(']');
            int k = std::stoi(key.substr(6, close - 6));
            if (order < 0 || k > order) throw std::runtime_error("operator file: coeff index out of range");
            coeff[k] = parse_poly(val, var);
        } else {
            throw std::runtime_error("operator file: unknown key '" + key + "'");
        }
    }
    if (order < 0) throw std::runtime_error("operator file: missing order");
    return DiffOperator(std::move(coeff), label);
}

DiffOperator read_operator_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open operator file: " + path);
    return read_operator(in);
}

std::string write_operator(const DiffOperator& op) {
    std::ostringstream os;
    if (!op.label.empty()) os << "label: " << op.label << "\n";
    os << "order: " << op.order() << "\n";
    os << "var: w\n";
    for (int k = 0; k <= op.order(); ++k)
        os << "coeff[" << k << "]: " << poly_to_string(op.coeff[k]) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// local maps and recentering

std::string LocalMap::describe() const {
    switch (kind) {
        case AtZero: return "x = w";
        case AtInfinity: return "x = 1/w";
        case AtFinite: {
            std::string ws;
            if (ws_rat) ws = rat_to_string(*ws_rat);
            else ws = to_string(ws_num, 12);
            return "x = 1 - w/(" + ws + ")";
        }
    }
    return "";
}

BigComplex LocalMap::to_local(const BigComplex& w) const {
    switch (kind) {
        case AtZero: return w;
        case AtInfinity: return BigComplex(1) / w;
        case AtFinite: return BigComplex(1) - w / ws_num;
    }
    return w;
}

BigComplex LocalMap::from_local(const BigComplex& x) const {
    switch (kind) {
        case AtZero: return x;
        case AtInfinity: return BigComplex(1) / x;
        case AtFinite: return ws_num * (BigComplex(1) - x);
    }
    return x;
}

namespace {

template <class F>
Poly<F> compose_affine_f(const RatPoly& p, const F& a, const F& b) {
    // p(a + b x)
    Poly<F> acc;
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
        // acc = acc * (a + b x) + *it
        std::vector<F> next(acc.c.size() + 1, F(BigRat(0)));
        for (size_t k = 0; k < acc.c.size(); ++k) {
            next[k] += acc.c[k] * a;
            next[k + 1] += acc.c[k] * b;
        }
        if (next.empty()) next.resize(1, F(BigRat(0)));
        next[0] += F(*it);
        acc.c = std::move(next);
    }
    return acc;
}

template <class F>
LocalOperator<F> recenter_finite(const DiffOperator& op, const F& ws) {
    // x = 1 - w/ws, w = ws(1-x), d/dw = (-1/ws) d/dx
    LocalOperator<F> out;
    out.coeff.resize(op.order() + 1);
    F minus_ws = -ws;
    F scale = F(BigRat(1));
    F inv = F(BigRat(-1)) / ws;
    for (int k = 0; k <= op.order(); ++k) {
        Poly<F> q = compose_affine_f<F>(op.coeff[k], ws, minus_ws);
        for (auto& v : q.c) v = v * scale;
        out.coeff[k] = std::move(q);
        scale = scale * inv;
    }
    return out;
}

template <class F>
LocalOperator<F> recenter_zero(const DiffOperator& op) {
    LocalOperator<F> out;
    out.coeff.resize(op.order() + 1);
    for (int k = 0; k <= op.order(); ++k) out.coeff[k] = Poly<F>::from_ratpoly(op.coeff[k]);
    return out;
}

// x = 1/w: D_w = -x^2 D_x; p_k(1/x) cleared by x^maxdeg.
LocalOperator<BigRat> recenter_infinity(const DiffOperator& op) {
    int r = op.order();
    int maxdeg = 0;
    for (auto& p : op.coeff) maxdeg = std::max(maxdeg, p.degree());
    // T_k = (-x^2 D)^k as sum_j q_{k,j}(x) D^j
    std::vector<std::vector<RatPoly>> T(r + 1);
    T[0] = {RatPoly::constant(BigRat(1))};
    RatPoly mx2 = RatPoly::monomial(BigRat(-1), 2);
    for (int k = 1; k <= r; ++k) {
        // apply -x^2 * d/dx composition: (-x^2 D)(q D^j) = -x^2 (q' D^j + q D^{j+1})
        std::vector<RatPoly> next(k + 1);
        for (int j = 0; j < (int)T[k - 1].size(); ++j) {
            const RatPoly& q = T[k - 1][j];
            if (q.is_zero()) continue;
            next[j] += mx2 * q.derivative();
            next[j + 1] += mx2 * q;
        }
        T[k] = std::move(next);
    }
    std::vector<RatPoly> out(r + 1);
    for (int k = 0; k <= r; ++k) {
        if (op.coeff[k].is_zero()) continue;
        // p_k(1/x) * x^maxdeg = rev(p_k) * x^(maxdeg - deg_k)
        RatPoly pk = poly_reverse(op.coeff[k]);
        pk = pk * RatPoly::monomial(BigRat(1), maxdeg - op.coeff[k].degree());
        for (int j = 0; j < (int)T[k].size(); ++j) {
            if (T[k][j].is_zero()) continue;
            out[j] += pk * T[k][j];
        }
    }
    LocalOperator<BigRat> lout;
    lout.coeff.resize(r + 1);
    for (int k = 0; k <= r; ++k) lout.coeff[k] = Poly<BigRat>::from_ratpoly(out[k]);
    return lout;
}

}  // namespace

LocalOperator<BigRat> recenter_rational(const DiffOperator& op, const LocalMap& map) {
    switch (map.kind) {
        case LocalMap::AtZero: return recenter_zero<BigRat>(op);
        case LocalMap::AtInfinity: return recenter_infinity(op);
        case LocalMap::AtFinite: return recenter_finite<BigRat>(op, *map.ws_rat);
    }
    throw std::logic_error("bad map");
}

LocalOperator<QuadExt> recenter_quadratic(const DiffOperator& op, const QuadExt& ws) {
    return recenter_finite<QuadExt>(op, ws);
}

LocalOperator<BigComplex> recenter_numeric(const DiffOperator& op, const LocalMap& map) {
    switch (map.kind) {
        case LocalMap::AtZero: {
            LocalOperator<BigComplex> out;
            out.coeff.resize(op.order() + 1);
            for (int k = 0; k <= op.order(); ++k)
                out.coeff[k] = Poly<BigComplex>::from_ratpoly(op.coeff[k]);
            return out;
        }
        case LocalMap::AtInfinity: {
            auto lr = recenter_infinity(op);
            LocalOperator<BigComplex> out;
            out.coeff.resize(lr.coeff.size());
            for (size_t k = 0; k < lr.coeff.size(); ++k) {
                out.coeff[k].c.reserve(lr.coeff[k].c.size());
                for (auto& v : lr.coeff[k].c) out.coeff[k].c.push_back(BigComplex(v));
            }
            return out;
        }
        case LocalMap::AtFinite: return recenter_finite<BigComplex>(op, map.ws_num);
    }
    throw std::logic_error("bad map");
}

// ---------------------------------------------------------------------------

template <class F>
IndicialData<F> indicial_data(const LocalOperator<F>& lop) {
    int r = lop.order();
    // falling factorials s(s-1)...(s-k+1)
    std::vector<Poly<F>> ff(r + 1);
    ff[0].c = {F(BigRat(1))};
    for (int k = 1; k <= r; ++k) {
        // ff[k] = ff[k-1] * (s - (k-1))
        std::vector<F> next(ff[k - 1].c.size() + 1, F(BigRat(0)));
        for (size_t t = 0; t < ff[k - 1].c.size(); ++t) {
            next[t] += ff[k - 1].c[t] * F(BigRat(-(long)(k - 1)));
            next[t + 1] += ff[k - 1].c[t];
        }
        ff[k].c = std::move(next);
    }
    // structural-zero mask per coefficient list (relative threshold for the
    // numeric field, exact test otherwise)
    std::vector<std::vector<bool>> nonzero(r + 1);
    int jmin = INT32_MAX, jmax = INT32_MIN;
    for (int k = 0; k <= r; ++k) {
        const auto& q = lop.coeff[k].c;
        BigFloat scale(0);
        for (auto& v : q) scale = (std::max)(scale, abs_upper(FieldOps<F>::to_complex(v)));
        nonzero[k].resize(q.size(), false);
        for (int m = 0; m < (int)q.size(); ++m) {
            if (FieldOps<F>::is_zero(q[m], scale)) continue;
            nonzero[k][m] = true;
            jmin = std::min(jmin, m - k);
            jmax = std::max(jmax, m - k);
        }
    }
    IndicialData<F> out;
    if (jmin > jmax) throw std::domain_error("indicial_data: zero operator");
    out.j0 = jmin;
    out.f.resize(jmax - jmin + 1);
    for (int k = 0; k <= r; ++k) {
        const auto& q = lop.coeff[k].c;
        for (int m = 0; m < (int)q.size(); ++m) {
            if (!nonzero[k][m]) continue;
            int j = m - k - jmin;
            // f_j += q_{k,m} * ff_k(s)
            auto& fj = out.f[j].c;
            if (fj.size() < ff[k].c.size()) fj.resize(ff[k].c.size(), F(BigRat(0)));
            for (size_t t = 0; t < ff[k].c.size(); ++t) fj[t] += q[m] * ff[k].c[t];
        }
    }
    return out;
}

template IndicialData<BigRat> indicial_data(const LocalOperator<BigRat>&);
template IndicialData<QuadExt> indicial_data(const LocalOperator<QuadExt>&);
template IndicialData<BigComplex> indicial_data(const LocalOperator<BigComplex>&);

std::string SingularPointInfo::describe_location() const {
    if (at_infinity) return "inf";
    return location.describe();
}

BigRat SingularAnalysis::exponent_sum() const {
    BigRat s(0);
    for (const auto& pt : points)
        for (const auto& e : pt.exponents) s += e;
    return s;
}

}  // namespace odeconn
