#include "odeconn/frobenius.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace odeconn {

template <class F>
F LogSeriesT<F>::coeff_at(int k, const BigRat& power) const {
    if (k < 0 || k > maxlog) return F(BigRat(0));
    BigRat off = power - rho0;
    if (denominator(off) != 1) return F(BigRat(0));
    BigInt n = numerator(off);
    if (n < 0 || n >= nterms) return F(BigRat(0));
    return c[k][(long)n];
}

template <class F>
void LogSeriesT<F>::raise_maxlog(int k) {
    if (k <= maxlog) return;
    c.resize(k + 1, std::vector<F>(nterms, F(BigRat(0))));
    maxlog = k;
}

template <class F>
void LogSeriesT<F>::add_scaled(const F& s, const LogSeriesT<F>& other) {
    if (!(other.rho0 == rho0)) throw std::domain_error("add_scaled: incompatible grids");
    raise_maxlog(other.maxlog);
    int n = std::min(nterms, other.nterms);
    for (int k = 0; k <= other.maxlog; ++k)
        for (int i = 0; i < n; ++i) c[k][i] += s * other.c[k][i];
}

template struct LogSeriesT<BigRat>;
template struct LogSeriesT<QuadExt>;
template struct LogSeriesT<BigComplex>;

std::vector<ClassPlan> exponent_classes(const std::vector<BigRat>& exponents) {
    // group by fractional part
    std::vector<std::pair<BigRat, std::vector<BigRat>>> groups;
    for (const auto& e : exponents) {
        bool placed = false;
        for (auto& [base, members] : groups) {
            BigRat diff = e - base;
            if (denominator(diff) == 1) {
                members.push_back(e);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({e, {e}});
    }
    std::vector<ClassPlan> plans;
    for (auto& [base, members] : groups) {
        BigRat rho0 = members[0];
        for (const auto& e : members) rho0 = (std::min)(rho0, e);
        std::map<long, int> mult;
        for (const auto& e : members) mult[(long)numerator(e - rho0)]++;
        ClassPlan p;
        p.rho0 = rho0;
        for (auto& [off, m] : mult) p.resonances.push_back({(int)off, m});
        plans.push_back(std::move(p));
    }
    std::sort(plans.begin(), plans.end(),
              [](const ClassPlan& a, const ClassPlan& b) { return a.rho0 < b.rho0; });
    return plans;
}

// ---------------------------------------------------------------------------
// the engine

namespace {

// cached evaluations f_j^(l)(rho0 + m) for m = 0..N-1
template <class F>
struct FTable {
    std::vector<std::vector<std::vector<F>>> val;  // [j][l][m]
    int J, L, N;

    FTable(const IndicialData<F>& ind, const BigRat& rho0, int maxderiv, int nterms) {
        J = (int)ind.f.size();
        L = maxderiv + 1;
        N = nterms;
        val.assign(J, {});
        for (int j = 0; j < J; ++j) {
            Poly<F> p = ind.f[j];
            val[j].resize(L);
            for (int l = 0; l < L; ++l) {
                auto& row = val[j][l];
                row.resize(N);
                for (int m = 0; m < N; ++m) {
                    F s = F(rho0 + m);
                    row[m] = p.eval(s);
                }
                p = p.derivative();
            }
        }
    }
    const F& operator()(int j, int l, int m) const { return val[j][l][m]; }
};

long binom_l(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

template <class F>
std::vector<LogSeriesT<F>> class_solutions(const IndicialData<F>& ind, const ClassPlan& plan,
                                           int nterms) {
    int maxdim = plan.dim();
    FTable<F> ft(ind, plan.rho0, maxdim, nterms);
    std::map<int, int> res;  // offset -> multiplicity
    for (auto& [off, m] : plan.resonances) res[off] = m;

    std::vector<LogSeriesT<F>> out;
    for (auto& [nseed, mult] : plan.resonances) {
        for (int seedlog = 0; seedlog < mult; ++seedlog) {
            LogSeriesT<F> y;
            y.rho0 = plan.rho0;
            y.seed_offset = nseed;
            y.seed_logdepth = seedlog;
            y.maxlog = seedlog;
            y.nterms = nterms;
            y.c.assign(seedlog + 1, std::vector<F>(nterms, F(BigRat(0))));
            y.c[seedlog][nseed] = F(BigRat(1));
            BigFloat scale(1);  // running magnitude for float-mode zero tests

            for (int n = nseed + 1; n < nterms; ++n) {
                int K = y.maxlog;
                // right-hand sides b_q, q = 0..K
                std::vector<F> b(K + 1, F(BigRat(0)));
                int jmax = std::min(n - nseed, ft.J - 1);
                for (int j = 1; j <= jmax; ++j) {
                    for (int k = 0; k <= K; ++k) {
                        const F& cv = y.c[k][n - j];
                        if constexpr (FieldOps<F>::exact) {
                            if (FieldOps<F>::is_zero(cv, scale)) continue;
                        }
                        for (int q = k; q >= 0; --q) {
                            long bl = binom_l(k, k - q);
                            F term = cv * ft(j, k - q, n - j);
                            if (bl != 1) term = term * F(BigRat(bl));
                            b[q] -= term;
                        }
                    }
                }
                auto it = res.find(n);
                int mu = it == res.end() ? 0 : it->second;
                if (mu == 0) {
                    const F& f0 = ft(0, 0, n);
                    for (int q = K; q >= 0; --q) {
                        F acc = b[q];
                        for (int k = q + 1; k <= K; ++k)
                            acc -= F(BigRat(binom_l(k, k - q))) * (ft(0, k - q, n) * y.c[k][n]);
                        y.c[q][n] = acc / f0;
                    }
                } else {
                    // resonance: consistency of the top mu equations decides
                    // whether new log powers appear
                    int need = -1;
                    for (int q = K; q > K - mu; --q) {
                        if (q < 0) break;
                        if (!FieldOps<F>::is_zero(b[q], scale)) { need = q; break; }
                    }
                    if (need >= 0) {
                        int newK = need + mu;
                        y.raise_maxlog(newK);
                        b.resize(newK + 1, F(BigRat(0)));
                        K = newK;
                    }
                    for (int q = K - mu; q >= 0; --q) {
                        F acc = b[q];
                        for (int k = q + mu + 1; k <= K; ++k)
                            acc -= F(BigRat(binom_l(k, k - q))) * (ft(0, k - q, n) * y.c[k][n]);
                        y.c[q + mu][n] = acc / (F(BigRat(binom_l(q + mu, mu))) * ft(0, mu, n));
                    }
                    // free coefficients below log level mu stay 0 (canonical)
                }
                if constexpr (!FieldOps<F>::exact) {
                    for (int k = 0; k <= y.maxlog; ++k)
                        scale = (std::max)(scale, abs_upper(FieldOps<F>::to_complex(y.c[k][n])));
                }
            }
            out.push_back(std::move(y));
        }
    }
    return out;
}

template std::vector<LogSeriesT<BigRat>> class_solutions(const IndicialData<BigRat>&,
                                                         const ClassPlan&, int);
template std::vector<LogSeriesT<QuadExt>> class_solutions(const IndicialData<QuadExt>&,
                                                          const ClassPlan&, int);
template std::vector<LogSeriesT<BigComplex>> class_solutions(const IndicialData<BigComplex>&,
                                                             const ClassPlan&, int);

// ---------------------------------------------------------------------------
// residual

template <class F>
BigFloat logseries_residual(const LocalOperator<F>& lop, const LogSeriesT<F>& y) {
    IndicialData<F> ind = indicial_data(lop);
    int N = y.nterms;
    int safe = N - (int)ind.f.size() - 1;
    FTable<F> ft(ind, y.rho0, y.maxlog, N);
    BigFloat worst(0);
    for (int n = 0; n < safe; ++n) {
        for (int q = 0; q <= y.maxlog; ++q) {
            F acc = F(BigRat(0));
            for (int j = 0; j <= std::min(n, ft.J - 1); ++j)
                for (int k = q; k <= y.maxlog; ++k) {
                    long bl = binom_l(k, k - q);
                    F t = y.c[k][n - j] * ft(j, k - q, n - j);
                    if (bl != 1) t = t * F(BigRat(bl));
                    acc += t;
                }
            worst = (std::max)(worst, abs(FieldOps<F>::to_complex(acc)));
        }
    }
    return worst;
}

template BigFloat logseries_residual(const LocalOperator<BigRat>&, const LogSeriesT<BigRat>&);
template BigFloat logseries_residual(const LocalOperator<BigComplex>&, const LogSeriesT<BigComplex>&);

// ---------------------------------------------------------------------------
// singular point analysis (declared in diffop.hpp)

namespace {

template <class F>
std::vector<BigRat> rational_indicial_roots(const Poly<F>& f0, bool& all_exact) {
    // numeric roots, rationalized and verified in F when the field is exact
    all_exact = true;
    RatPoly approx_poly;  // complex magnitude proxy for root isolation
    std::vector<BigComplex> croots;
    {
        // build a complex polynomial and use Aberth directly
        int d = f0.degree_bound();
        while (d >= 0 && FieldOps<F>::is_zero(f0.c[d], BigFloat(1))) --d;
        std::vector<BigComplex> cc(d + 1);
        for (int i = 0; i <= d; ++i) cc[i] = FieldOps<F>::to_complex(f0.c[i]);
        // Aberth on complex coefficients: reuse numeric_roots via RatPoly when
        // possible, otherwise run a local Newton-Aberth here
        bool rational_coeffs = true;
        if constexpr (std::is_same_v<F, BigRat>) {
            approx_poly.c.assign(f0.c.begin(), f0.c.begin() + d + 1);
            approx_poly.trim();
            croots = numeric_roots(approx_poly);
        } else {
            rational_coeffs = false;
        }
        if (!rational_coeffs) {
            // Durand-Kerner on complex coefficients
            int n = d;
            std::vector<BigComplex> z(n);
            BigFloat bound(1);
            for (int i = 0; i < d; ++i)
                bound = (std::max)(bound, abs(cc[i]) / abs(cc[d]));
            bound += 1;
            BigFloat pi = Constants::pi();
            for (int i = 0; i < n; ++i) {
                BigFloat th = 2 * pi * i / n + BigFloat(1) / 2;
                z[i] = BigComplex(bound * bmp::cos(th) / 2, bound * bmp::sin(th) / 2);
            }
            auto evalp = [&](const BigComplex& x) {
                BigComplex acc;
                for (int i = d; i >= 0; --i) acc = acc * x + cc[i];
                return acc;
            };
            BigFloat eps = pow10(-(long)Precision::digits() - 5);
            for (int iter = 0; iter < 500; ++iter) {
                BigFloat worst(0);
                for (int i = 0; i < n; ++i) {
                    BigComplex denom = cc[d];
                    for (int j = 0; j < n; ++j)
                        if (j != i) denom *= (z[i] - z[j]);
                    BigComplex step = evalp(z[i]) / denom;
                    z[i] -= step;
                    worst = (std::max)(worst, abs(step));
                }
                if (worst < eps) break;
            }
            croots = z;
        }
    }
    std::vector<BigRat> out;
    BigFloat tol = pow10(-(long)Precision::digits() / 3);
    for (auto& z : croots) {
        if (bmp::abs(z.im) > tol) { all_exact = false; continue; }
        auto cand = rationalize(z.re, tol, BigInt(1000000));
        if (!cand) { all_exact = false; continue; }
        if constexpr (FieldOps<F>::exact) {
            Poly<F> p = f0;
            F v = p.eval(F(*cand));
            if (!FieldOps<F>::is_zero(v, BigFloat(1))) { all_exact = false; continue; }
        }
        out.push_back(*cand);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// dimension of the subspace of class solutions whose log components above
// level ell vanish; the canonical march basis spans the class, so this is a
// rank computation on its truncated log components.
template <class F>
int subspace_dim_maxlog(const std::vector<LogSeriesT<F>>& sols, int ell) {
    int dim = (int)sols.size();
    int maxk = 0, depth = 0;
    for (auto& s : sols) {
        maxk = std::max(maxk, s.maxlog);
        depth = std::max(depth, s.nterms);
    }
    if (maxk <= ell) return dim;
    // rows: solutions; cols: slots (k, n) for k > ell
    std::vector<std::vector<F>> m(dim);
    BigFloat scale(0);
    for (int i = 0; i < dim; ++i) {
        for (int k = ell + 1; k <= maxk; ++k)
            for (int n = 0; n < depth; ++n) {
                F v = (k <= sols[i].maxlog && n < sols[i].nterms) ? sols[i].c[k][n] : F(BigRat(0));
                scale = (std::max)(scale, abs_upper(FieldOps<F>::to_complex(v)));
                m[i].push_back(v);
            }
    }
    if (scale == 0) return dim;
    // row rank by elimination
    int cols = (int)m[0].size();
    int rank = 0;
    std::vector<bool> used(dim, false);
    for (int c = 0; c < cols && rank < dim; ++c) {
        int piv = -1;
        BigFloat best(0);
        for (int r = 0; r < dim; ++r) {
            if (used[r]) continue;
            BigFloat mag = abs_upper(FieldOps<F>::to_complex(m[r][c]));
            if (piv < 0 || mag > best) { piv = r; best = mag; }
        }
        if (piv < 0 || FieldOps<F>::is_zero(m[piv][c], scale)) continue;
        used[piv] = true;
        ++rank;
        for (int r = 0; r < dim; ++r) {
            if (r == piv || FieldOps<F>::is_zero(m[r][c], scale)) continue;
            F f = m[r][c] / m[piv][c];
            for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[piv][cc];
        }
    }
    return dim - rank;
}

template <class F>
void probe_log_structure(const LocalOperator<F>& lop, SingularPointInfo& info, int guard) {
    IndicialData<F> ind = indicial_data(lop);
    auto plans = exponent_classes(info.exponents);
    int depth = guard + 2;
    for (auto& p : plans)
        if (!p.resonances.empty()) depth = std::max(depth, p.resonances.back().first + guard + 2);
    info.log_count = 0;
    info.max_log_power = 0;
    for (auto& p : plans) {
        auto sols = class_solutions(ind, p, depth);
        int dim = (int)sols.size();
        // log count and max power are structure-minimal over bases of the
        // class: N = dim - dim(log-free), P = smallest ell covering everything
        info.log_count += dim - subspace_dim_maxlog(sols, 0);
        int ell = 0;
        while (subspace_dim_maxlog(sols, ell) < dim) ++ell;
        info.max_log_power = std::max(info.max_log_power, ell);
    }
}

template <class F>
bool analyze_point(const DiffOperator& op, const LocalOperator<F>& lop, SingularPointInfo& info,
                   int guard) {
    IndicialData<F> ind = indicial_data(lop);
    int d = (int)ind.f[0].c.size() - 1;
    while (d >= 0 && FieldOps<F>::is_zero(ind.f[0].c[d], BigFloat(1))) --d;
    if (d != op.order()) {
        info.fuchsian = false;
        // largest pole-order excess of p_k/p_r over the Fuchs bound r-k
        int r = op.order();
        std::vector<int> valn(r + 1, INT32_MAX);
        for (int k = 0; k <= r; ++k) {
            const auto& q = lop.coeff[k].c;
            for (int m = 0; m < (int)q.size(); ++m)
                if (!FieldOps<F>::is_zero(q[m], BigFloat(1))) { valn[k] = m; break; }
        }
        int worst = 0;
        for (int k = 0; k < r; ++k) {
            if (valn[k] == INT32_MAX) continue;
            int pole = valn[r] - valn[k];
            if (pole > r - k) worst = std::max(worst, pole);
        }
        info.offending_pole_order = worst;
        return false;
    }
    bool exact = true;
    info.exponents = rational_indicial_roots(ind.f[0], exact);
    info.exponents_exact = exact && FieldOps<F>::exact;
    if ((int)info.exponents.size() == op.order()) {
        probe_log_structure(lop, info, guard);
        // apparent: all solutions analytic
        bool nonneg_int = true;
        std::set<BigRat> distinct(info.exponents.begin(), info.exponents.end());
        for (auto& e : info.exponents)
            if (denominator(e) != 1 || e < 0) nonneg_int = false;
        info.apparent = nonneg_int && distinct.size() == info.exponents.size() &&
                        info.log_count == 0;
        // ordinary pattern 0..r-1
        if (info.apparent) {
            bool ordinary = true;
            for (int k = 0; k <= op.order(); ++k)
                if (!distinct.count(BigRat(k))) { ordinary = false; break; }
            info.ordinary = ordinary && (int)distinct.size() == op.order() + 1;
        }
    }
    return true;
}

}  // namespace

SingularAnalysis singular_points(const DiffOperator& op, int probe_guard) {
    SingularAnalysis out;
    auto factors = poly_roots_exact(op.lead());
    for (auto& fr : factors) {
        for (auto& pt : fr.points) {
            SingularPointInfo info;
            info.location = pt;
            if (pt.is_rational()) {
                BigRat ws = pt.rational_value();
                if (ws == 0) info.map.kind = LocalMap::AtZero;
                else {
                    info.map.kind = LocalMap::AtFinite;
                    info.map.ws_rat = ws;
                }
                info.map.ws_num = BigComplex(ws);
                auto lop = recenter_rational(op, info.map);
                analyze_point(op, lop, info, probe_guard);
            } else if (pt.closed_form) {
                info.map.kind = LocalMap::AtFinite;
                info.map.ws_quad = *pt.closed_form;
                info.map.ws_num = pt.approx;
                auto lop = recenter_quadratic(op, *pt.closed_form);
                analyze_point(op, lop, info, probe_guard);
            } else {
                info.map.kind = LocalMap::AtFinite;
                info.map.ws_num = pt.approx;
                auto lop = recenter_numeric(op, info.map);
                analyze_point(op, lop, info, probe_guard);
            }
            out.points.push_back(std::move(info));
        }
    }
    // the point at infinity
    {
        SingularPointInfo info;
        info.at_infinity = true;
        info.map.kind = LocalMap::AtInfinity;
        auto lop = recenter_rational(op, info.map);
        analyze_point(op, lop, info, probe_guard);
        out.points.push_back(std::move(info));
    }
    // deterministic order: finite points by (re, im), infinity last
    std::sort(out.points.begin(), out.points.end(),
              [](const SingularPointInfo& a, const SingularPointInfo& b) {
                  if (a.at_infinity != b.at_infinity) return !a.at_infinity;
                  if (a.at_infinity) return false;
                  if (a.location.approx.re != b.location.approx.re)
                      return a.location.approx.re < b.location.approx.re;
                  return a.location.approx.im < b.location.approx.im;
              });
    return out;
}

// ---------------------------------------------------------------------------
// local basis

template <class F>
LocalBasisT<F> local_basis(const DiffOperator& op, const SingularPointInfo& pt, int nterms) {
    LocalBasisT<F> basis;
    basis.point = pt;
    if constexpr (std::is_same_v<F, BigRat>) {
        basis.lop = recenter_rational(op, pt.map);
    } else if constexpr (std::is_same_v<F, QuadExt>) {
        if (!pt.map.ws_quad) throw std::domain_error("local_basis: no quadratic data");
        basis.lop = recenter_quadratic(op, *pt.map.ws_quad);
    } else {
        basis.lop = recenter_numeric(op, pt.map);
    }
    if (!pt.fuchsian) throw std::domain_error("local_basis: irregular point");
    if ((int)pt.exponents.size() != op.order())
        throw std::domain_error("local_basis: exponent data incomplete");
    int maxgap = 0;
    auto plans = exponent_classes(pt.exponents);
    for (auto& p : plans)
        if (!p.resonances.empty()) maxgap = std::max(maxgap, p.resonances.back().first);
    if (nterms < maxgap + op.order() + 2)
        throw std::domain_error("local_basis: insufficient truncation length");
    IndicialData<F> ind = indicial_data(basis.lop);
    for (auto& p : plans) {
        auto sols = class_solutions(ind, p, nterms);
        for (auto& s : sols) basis.sol.push_back(std::move(s));
    }
    std::sort(basis.sol.begin(), basis.sol.end(), [](const auto& a, const auto& b) {
        if (!(a.rho_eff() == b.rho_eff())) return a.rho_eff() < b.rho_eff();
        return a.seed_logdepth < b.seed_logdepth;
    });
    return basis;
}

template LocalBasisT<BigRat> local_basis(const DiffOperator&, const SingularPointInfo&, int);
template LocalBasisT<QuadExt> local_basis(const DiffOperator&, const SingularPointInfo&, int);
template LocalBasisT<BigComplex> local_basis(const DiffOperator&, const SingularPointInfo&, int);

LocalBasisX local_basis_exact(const DiffOperator& op, const SingularPointInfo& pt, int nterms) {
    return local_basis<BigRat>(op, pt, nterms);
}
LocalBasis local_basis_numeric(const DiffOperator& op, const SingularPointInfo& pt, int nterms) {
    return local_basis<BigComplex>(op, pt, nterms);
}

LocalBasis to_numeric(const LocalBasisX& b) {
    LocalBasis out;
    out.point = b.point;
    out.lop.coeff.resize(b.lop.coeff.size());
    for (size_t k = 0; k < b.lop.coeff.size(); ++k) {
        out.lop.coeff[k].c.reserve(b.lop.coeff[k].c.size());
        for (auto& v : b.lop.coeff[k].c) out.lop.coeff[k].c.push_back(BigComplex(v));
    }
    for (auto& s : b.sol) {
        LogSeriesC t;
        t.rho0 = s.rho0;
        t.seed_offset = s.seed_offset;
        t.seed_logdepth = s.seed_logdepth;
        t.maxlog = s.maxlog;
        t.nterms = s.nterms;
        t.c.resize(s.c.size());
        for (size_t k = 0; k < s.c.size(); ++k) {
            t.c[k].reserve(s.c[k].size());
            for (auto& v : s.c[k]) t.c[k].push_back(BigComplex(v));
        }
        out.sol.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// evaluation

BigComplex eval_logseries(const LogSeriesC& s, const BigComplex& x, EvalReport* report) {
    BigComplex L;
    bool need_log = s.maxlog > 0;
    if (need_log) L = log_branch(x);
    BigComplex head = pow_rat(x, s.rho0);
    BigComplex acc;
    BigFloat absx = abs(x);
    BigFloat tail_scale(0);
    for (int k = 0; k <= s.maxlog; ++k) {
        // Horner over the truncated series
        BigComplex sum;
        for (int n = s.nterms - 1; n >= 0; --n) sum = sum * x + s.c[k][n];
        BigComplex lk = k == 0 ? BigComplex(1) : ipow(L, k);
        acc += lk * sum;
        // tail scale from the last terms
        for (int n = std::max(0, s.nterms - 8); n < s.nterms; ++n)
            tail_scale = (std::max)(tail_scale, abs_upper(s.c[k][n]) * abs_upper(lk));
    }
    if (report) {
        // geometric tail estimate: ratio from the final coefficient decade
        BigFloat q = absx;
        BigFloat c_old(0), c_new(0);
        for (int k = 0; k <= s.maxlog; ++k) {
            if (s.nterms > 20) c_old = (std::max)(c_old, abs_upper(s.c[k][s.nterms - 11]));
            c_new = (std::max)(c_new, abs_upper(s.c[k][s.nterms - 1]));
        }
        if (c_old > 0) {
            BigFloat growth = bmp::pow(c_new / c_old, BigFloat(1) / 10);
            q = absx * growth;
        }
        report->converged = q < BigFloat(99) / 100;
        BigFloat qn = bmp::pow(q, s.nterms);
        report->tail_estimate =
            report->converged ? tail_scale * bmp::pow(absx, s.nterms) / (1 - q) : BigFloat(1);
    }
    return head * acc;
}

// ---------------------------------------------------------------------------
// pins

namespace {

// dense solve A x = b over F, A given row-major (rows >= cols); extra rows are
// checked for consistency. Throws on rank deficiency.
template <class F>
std::vector<F> solve_constraints(std::vector<std::vector<F>> A, std::vector<F> b, int cols,
                                 const char* what) {
    int rows = (int)A.size();
    std::vector<int> colperm(cols);
    for (int i = 0; i < cols; ++i) colperm[i] = i;
    std::vector<int> rowsel;
    int rank = 0;
    std::vector<bool> used(rows, false);
    for (int c = 0; c < cols; ++c) {
        // pick pivot row with max magnitude in column c
        int best = -1;
        BigFloat bestmag(0);
        for (int r = 0; r < rows; ++r) {
            if (used[r]) continue;
            BigFloat m = abs_upper(FieldOps<F>::to_complex(A[r][c]));
            if (best < 0 || m > bestmag) { best = r; bestmag = m; }
        }
        if (best < 0 || FieldOps<F>::is_zero(A[best][c], bestmag > 0 ? bestmag : BigFloat(1)))
            throw std::domain_error(std::string(what) + ": deficient constraint system");
        used[best] = true;
        rowsel.push_back(best);
        ++rank;
        // eliminate column c from all other rows
        for (int r = 0; r < rows; ++r) {
            if (r == best) continue;
            F factor = A[r][c] / A[best][c];
            if (FieldOps<F>::is_zero(factor, BigFloat(1))) continue;
            for (int cc = 0; cc < cols; ++cc) A[r][cc] -= factor * A[best][cc];
            b[r] -= factor * b[best];
        }
    }
    std::vector<F> x(cols, F(BigRat(0)));
    for (int i = 0; i < cols; ++i) x[i] = b[rowsel[i]] / A[rowsel[i]][i];
    // consistency of leftover rows
    for (int r = 0; r < rows; ++r) {
        if (used[r]) continue;
        F resid = b[r];
        BigFloat scale(1);
        for (int c = 0; c < cols; ++c) {
            resid -= A[r][c] * x[c];
            scale = (std::max)(scale, abs_upper(FieldOps<F>::to_complex(b[r])));
        }
        if (!FieldOps<F>::is_zero(resid, scale))
            throw std::domain_error(std::string(what) + ": inconsistent constraints");
    }
    return x;
}

}  // namespace

template <class F>
LocalBasisT<F> apply_pin(const LocalBasisT<F>& basis, const BasisPinV<F>& pin) {
    LocalBasisT<F> out;
    out.point = basis.point;
    out.lop = basis.lop;
    int nb = (int)basis.sol.size();
    for (const auto& el : pin.elements) {
        int rows = (int)el.constraints.size();
        if (rows < 1) throw std::domain_error("apply_pin: element without constraints");
        // columns: basis elements with any nonzero coefficient on the slots
        std::vector<int> cols;
        std::vector<std::vector<F>> A;
        for (int j = 0; j < nb; ++j) {
            bool touches = false;
            for (const auto& cst : el.constraints) {
                if (!FieldOps<F>::is_zero(basis.sol[j].coeff_at(cst.k, cst.power), BigFloat(1))) {
                    touches = true;
                    break;
                }
            }
            if (touches) cols.push_back(j);
        }
        if (cols.empty()) throw std::domain_error("apply_pin: constraints touch no basis element");
        A.assign(rows, std::vector<F>(cols.size(), F(BigRat(0))));
        std::vector<F> rhs(rows, F(BigRat(0)));
        for (int r = 0; r < rows; ++r) {
            const auto& cst = el.constraints[r];
            for (size_t cI = 0; cI < cols.size(); ++cI)
                A[r][cI] = basis.sol[cols[cI]].coeff_at(cst.k, cst.power);
            rhs[r] = cst.value;
        }
        auto alpha = solve_constraints<F>(A, rhs, (int)cols.size(), el.name.c_str());
        // combine on a single grid
        const auto& first = basis.sol[cols[0]];
        for (size_t cI = 1; cI < cols.size(); ++cI)
            if (!(basis.sol[cols[cI]].rho0 == first.rho0))
                throw std::domain_error("apply_pin: mixed-class combination unsupported");
        LogSeriesT<F> elem;
        elem.rho0 = first.rho0;
        elem.nterms = first.nterms;
        elem.maxlog = 0;
        elem.c.assign(1, std::vector<F>(elem.nterms, F(BigRat(0))));
        int bestseed = INT32_MAX, bestlog = 0;
        for (size_t cI = 0; cI < cols.size(); ++cI) {
            elem.add_scaled(alpha[cI], basis.sol[cols[cI]]);
            if (!FieldOps<F>::is_zero(alpha[cI], BigFloat(1))) {
                if (basis.sol[cols[cI]].seed_offset < bestseed) {
                    bestseed = basis.sol[cols[cI]].seed_offset;
                    bestlog = basis.sol[cols[cI]].seed_logdepth;
                }
            }
        }
        elem.seed_offset = bestseed == INT32_MAX ? 0 : bestseed;
        elem.seed_logdepth = bestlog;
        out.sol.push_back(std::move(elem));
    }
    for (const auto& sh : pin.shifts) {
        if (sh.targets.size() == 2) {
            int i = sh.targets[0], j = sh.targets[1];
            out.sol[j].add_scaled(sh.t, out.sol[i]);
        } else if (sh.targets.size() == 3) {
            int i = sh.targets[0], j = sh.targets[1], k = sh.targets[2];
            F t2u = sh.t * sh.t + sh.u;
            out.sol[k].add_scaled(F(BigRat(2)) * sh.t, out.sol[j]);
            out.sol[k].add_scaled(t2u, out.sol[i]);
            out.sol[j].add_scaled(sh.t, out.sol[i]);
        } else {
            throw std::domain_error("apply_pin: log shift needs 2 or 3 targets");
        }
    }
    return out;
}

template LocalBasisT<BigRat> apply_pin(const LocalBasisT<BigRat>&, const BasisPinV<BigRat>&);
template LocalBasisT<BigComplex> apply_pin(const LocalBasisT<BigComplex>&,
                                           const BasisPinV<BigComplex>&);

}  // namespace odeconn
