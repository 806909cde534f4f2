#pragma once

// Connection matrices between local bases at neighboring singular points by
// multi-point series matching, path composition, and the complex-conjugation
// shortcut.

#include "odeconn/frobenius.hpp"
#include "odeconn/linalg.hpp"

namespace odeconn {

struct ConnMatrix {
    std::string from_pt, to_pt;
    CMatrix entries;       // S^(from)(w) = entries * S^(to)(w)
    BigFloat residual;     // worst relative mismatch at the validation points
    BigFloat cond_est;
    std::vector<BigComplex> matching_points;  // w-plane
    int terms = 0;
    unsigned digits = 0;
    std::vector<std::string> path;  // composition provenance
};

// Matching-point layout around a lens center: a short arc of k points just
// off the segment, biased to the prescribed half-plane.
std::vector<BigComplex> matching_arc(const BigComplex& center, int k, int side /*-1 lower, +1 upper*/);

// Finds C with S^A(w) = C * S^B(w), solving at k_match points and validating
// at k_validate extra points. The caller supplies the matching points (in w).
ConnMatrix match_neighbors(const LocalBasis& A, const LocalBasis& B,
                           const std::vector<BigComplex>& match_w,
                           const std::vector<BigComplex>& validate_w);

ConnMatrix compose_path(const std::vector<ConnMatrix>& mats);

// C(0, conj(pt)) from C(0, pt): entrywise conjugation, retargeted to the
// conjugate basis.
ConnMatrix conjugate_connection(const ConnMatrix& c, const std::string& new_to);

}  // namespace odeconn
