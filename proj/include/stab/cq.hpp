// Constraint-qualification checkers at the reference point: the multiplier
// criterion for metric regularity, its directional first- and second-order
// sufficient conditions, per-direction subregularity tests, and the search
// for a feasibility direction.
//
// The universal quantifier over directions u is discharged exactly: the
// directional normal cone depends only on which rows of the linearized-cone
// pieces vanish at u, so enumerating arrangement cells covers all nonzero
// directions. Multiplier sets are handled exactly in rational arithmetic;
// only the second-order eigenvalue tests in u carry a float tolerance.
#pragma once

#include "stab/cones_ops.hpp"
#include "stab/problem.hpp"
#include "stab/verdict.hpp"

namespace stab {

// One (cell, directional-cone piece) test outcome. piece = -1 marks a
// cell-level note rather than a per-piece one.
struct CellDiag {
    CellSignature sig;
    QVec rep;
    int piece = -1;
    VerdictValue value = VerdictValue::Inconclusive;
    std::string note;
};

struct CQReport {
    Verdict metric_regularity;
    Verdict foscms;
    Verdict soscms;
    Verdict r1;  // derived: distance estimate of order 1 near the reference
    Verdict r2;  // derived: distance estimate of order 2
    std::vector<CellDiag> cells;
};

// Linearized cone {u | J u in T(qbar; P)}, one piece per tangent piece.
ConeUnion lin_cone(const ReferenceData& ref);

// Arrangement cells of the linearized cone, refined so that no cell except
// the dropped origin contains 0, in deterministic signature order. Each
// nonzero direction of the linearized cone lies in exactly one cell and the
// directional normal cone is constant on each cell.
std::vector<SignedCell> direction_cells(const ReferenceData& ref);

// Multiplier criterion: Holds iff J^T lambda = 0, lambda in N(qbar; P)
// forces lambda = 0. Fails carries a nonzero witness lambda.
Verdict check_metric_regularity(const ReferenceData& ref);

// First-order sufficient condition over all nonzero directions of the
// linearized cone. Fails carries a witness pair {u, lambda}.
Verdict check_foscms(const ReferenceData& ref);

// Second-order sufficient condition: where first-order multipliers survive,
// every generator lambda of the multiplier cone must make
// sup { u^T Q(lambda) u : u in cl(cell) } negative. Fails carries {u, lambda}
// with u^T Q(lambda) u >= 0 exactly; Inconclusive marks eigenvalue tests
// inside the tolerance band. tol separates Negative from Inconclusive.
Verdict check_soscms(const ReferenceData& ref, double tol = 1e-9);

// Subregularity in one fixed direction u: first-order multiplier test, then
// the exact per-generator second-order test u^T Q(lambda) u < 0. Vacuously
// Holds when u leaves the linearized cone. Fully rational, no tolerance.
Verdict check_dir_subregularity(const ReferenceData& ref, const QVec& u);

struct FeasDirection {
    QVec u;
    Verdict verdict;
};

// Search the direction cells for one u whose order-l test Holds (l = 1
// first-order only, l = 2 allows the second-order rescue). Cell
// representatives are scanned in signature order; Fails if none qualifies.
FeasDirection find_feasibility_direction(const ReferenceData& ref, int l);

// All checkers plus derived order-1/order-2 distance flags and per-cell
// diagnostics. Enforces the implication chain (metric regularity implies the
// first-order condition implies the second-order one) and throws
// InternalError on any regression.
CQReport cq_report(const ReferenceData& ref, double tol = 1e-9);

}  // namespace stab
