#pragma once

// Frobenius construction of the full local basis of generalized (log) series
// solutions at a regular singular point, canonical normalization, pinning to
// published bases, evaluation, and residual checks.

#include "odeconn/diffop.hpp"

#include <map>

namespace odeconn {

// x^(rho0) * sum_{k<=maxlog} ln(x)^k * sum_n c[k][n] x^n.
// Canonical solutions carry their seed (offset, log depth); combinations
// produced by pinning keep seed data of the dominant term.
template <class F>
struct LogSeriesT {
    BigRat rho0;
    int seed_offset = 0;
    int seed_logdepth = 0;
    int maxlog = 0;
    int nterms = 0;
    std::vector<std::vector<F>> c;

    BigRat rho_eff() const { return rho0 + seed_offset; }
    F coeff_at(int k, const BigRat& power) const;  // 0 outside the grid
    void add_scaled(const F& s, const LogSeriesT& other);  // same rho0 grid
    void raise_maxlog(int k);
};

using LogSeriesC = LogSeriesT<BigComplex>;
using LogSeriesX = LogSeriesT<BigRat>;

// one congruence class of indicial roots: base exponent and the resonance
// ladder (integer offsets with multiplicities, ascending)
struct ClassPlan {
    BigRat rho0;
    std::vector<std::pair<int, int>> resonances;
    int dim() const {
        int d = 0;
        for (auto& r : resonances) d += r.second;
        return d;
    }
};

// group rational exponents (with multiplicity) into congruence classes mod 1
std::vector<ClassPlan> exponent_classes(const std::vector<BigRat>& exponents);

// All solutions of one class to nterms, canonical normalization: at every
// resonant order the free coefficients are set to 0, each seed gets a single
// 1; a new log power appears exactly when the constant-term equations are
// inconsistent.
template <class F>
std::vector<LogSeriesT<F>> class_solutions(const IndicialData<F>& ind, const ClassPlan& plan,
                                           int nterms);

template <class F>
struct LocalBasisT {
    SingularPointInfo point;
    LocalOperator<F> lop;
    std::vector<LogSeriesT<F>> sol;
};

using LocalBasis = LocalBasisT<BigComplex>;
using LocalBasisX = LocalBasisT<BigRat>;

// canonical local basis (all classes, ordered by exponent ascending then seed
// log depth ascending)
template <class F>
LocalBasisT<F> local_basis(const DiffOperator& op, const SingularPointInfo& pt, int nterms);

LocalBasisX local_basis_exact(const DiffOperator& op, const SingularPointInfo& pt, int nterms);
LocalBasis local_basis_numeric(const DiffOperator& op, const SingularPointInfo& pt, int nterms);

LocalBasis to_numeric(const LocalBasisX& b);

// max |coefficient| of L(y) over all computed orders below the trustworthy
// cutoff; exactly zero arrays give 0
template <class F>
BigFloat logseries_residual(const LocalOperator<F>& lop, const LogSeriesT<F>& y);

struct EvalReport {
    BigFloat tail_estimate;
    bool converged = true;
};

BigComplex eval_logseries(const LogSeriesC& s, const BigComplex& x, EvalReport* report = nullptr);

// ---------------------------------------------------------------------------
// pins

template <class F>
struct PinConstraintV {
    int k;          // log power
    BigRat power;   // absolute power of x
    F value;
};

template <class F>
struct PinElementV {
    std::string name;
    std::vector<PinConstraintV<F>> constraints;
};

// eq-(combination)-style log-argument shift: with t = a1 - ln(c) and
// u = a2 - a1^2,
//   pair  (i,j):   E_j += t*E_i
//   triple (i,j,k): E_k += 2t*E_j + (t^2+u)*E_i;  E_j += t*E_i
template <class F>
struct LogShiftV {
    std::vector<int> targets;  // element indices, size 2 or 3
    F t, u;
};

template <class F>
struct BasisPinV {
    std::vector<PinElementV<F>> elements;
    std::vector<LogShiftV<F>> shifts;
};

// Solves the constraint system in the canonical basis and applies log shifts.
// Basis elements whose coefficients vanish on every constraint slot of an
// element are excluded from that element (coefficient 0). Throws on a
// deficient or inconsistent pin.
template <class F>
LocalBasisT<F> apply_pin(const LocalBasisT<F>& basis, const BasisPinV<F>& pin);

}  // namespace odeconn
