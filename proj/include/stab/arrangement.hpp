// Sign-vector cells of a hyperplane arrangement restricted to a finite union
// of polyhedral cones, with exact strict-interior representatives.
#pragma once

#include "stab/cone.hpp"

#include <cstdint>

namespace stab {

struct CellSignature {
    std::vector<int8_t> s;  // one of -1, 0, +1 per hyperplane

    bool operator==(const CellSignature& o) const { return s == o.s; }
    bool operator<(const CellSignature& o) const { return s < o.s; }
    bool all_zero() const {
        for (int8_t v : s)
            if (v) return false;
        return true;
    }
    std::string str() const {
        std::string r;
        for (int8_t v : s) r += (v < 0 ? '-' : v > 0 ? '+' : '0');
        return r;
    }
};

struct SignedCell {
    int piece = 0;       // index of the restriction piece the cell sits in
    CellSignature sig;   // over the canonical hyperplane list
    QVec rep;            // exact point: strict signature rows, inside piece
    ConvexCone closure;  // piece rows plus sign-relaxed signature rows
};

struct Arrangement {
    int dim = 0;
    std::vector<QVec> hyps;  // canonicalized, deduplicated normals
    std::vector<SignedCell> cells;

    // All cells whose closure contains z (exact).
    std::vector<int> cells_with_closure_containing(const QVec& z) const;
};

// Enumerate the nonempty cells of the arrangement of hyps_raw (plus every
// row normal of the pieces, so that the all-zero cell is the common kernel
// subspace) over each restriction piece. Signatures are explored
// depth-first with exact feasibility pruning. With refine_zero set, the
// coordinate hyperplanes are added whenever the common kernel is nontrivial,
// so no cell except {0} itself contains the origin; the {0} cell is dropped
// in that mode.
Arrangement arrangement_cells(int dim, const std::vector<QVec>& hyps_raw,
                              const std::vector<ConvexCone>& pieces, bool refine_zero);

}  // namespace stab
