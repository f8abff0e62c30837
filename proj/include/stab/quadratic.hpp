// Sign analysis of sup { z^T Q z : z in C, |z| = 1 } over a polyhedral cone.
//
// Candidates are generated from the cone's generators and from eigenpairs of
// the quadratic restricted to the span of every face (the maximum over the
// sphere slice is attained in the relative interior of some face and is an
// eigenvector of the form restricted to that face's span). Exactness policy:
// Positive and Zero are reported exact only when a rational witness in the
// cone attains the sign; Negative is exact only on one-dimensional spans or
// when the form vanishes identically on the span of C.
#pragma once

#include "stab/cone.hpp"

namespace stab {

enum class QSign { Positive, Negative, Zero, Inconclusive };

struct QuadResult {
    QSign sign = QSign::Inconclusive;
    bool exact = false;
    double best = 0.0;   // largest candidate value seen (Rayleigh quotient)
    double upper = 0.0;  // float upper bound over every candidate inspected,
                         // certified and not; infinite when a subproblem failed
    QVec witness;        // exact witness in C attaining >= 0 when applicable
    std::string note;
};

// tol: float margin separating Negative from Inconclusive (and pinched-Zero).
QuadResult max_quadratic_on_cone(const QMat& Q, const ConvexCone& C, double tol);

}  // namespace stab
