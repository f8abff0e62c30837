#include "stab/arrangement.hpp"

#include "stab/linalg.hpp"

#include <algorithm>

namespace stab {

std::vector<int> Arrangement::cells_with_closure_containing(const QVec& z) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].closure.contains(z)) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

// Canonical form for a hyperplane normal: coprime integers, first nonzero
// coordinate positive. Tracks nothing else; signatures refer to this scaling.
QVec canonical_hyp(const QVec& v) {
    QVec c = canonical_ray(v);
    for (const auto& x : c) {
        if (x == 0) continue;
        if (x < 0) c = vneg(c);
        break;
    }
    return c;
}

struct Enumerator {
    int dim;
    const std::vector<QVec>& hyps;
    const ConvexCone& piece;
    int piece_index;
    bool drop_origin_cell;
    std::vector<SignedCell>& out;
    std::vector<int8_t> sig;

    void recurse(std::size_t k) {
        if (k == hyps.size()) {
            CellSignature cs{sig};
            if (drop_origin_cell && cs.all_zero()) return;
            SignedCell cell;
            cell.piece = piece_index;
            cell.sig = cs;
            FeasResult fr = lp_feasible(dim, system(true));
            if (!fr.feasible) throw InternalError("arrangement: pruned cell vanished");
            cell.rep = fr.point;
            cell.closure = piece;
            for (std::size_t i = 0; i < hyps.size(); ++i) {
                if (sig[i] > 0)
                    cell.closure.add_ineq(vneg(hyps[i]));
                else if (sig[i] < 0)
                    cell.closure.add_ineq(hyps[i]);
                else
                    cell.closure.add_eq(hyps[i]);
            }
            out.push_back(std::move(cell));
            return;
        }
        for (int8_t v : {int8_t(-1), int8_t(0), int8_t(1)}) {
            sig.push_back(v);
            if (lp_feasible(dim, system(false)).feasible) recurse(k + 1);
            sig.pop_back();
        }
    }

    // Constraint system for the current prefix: strict rows where the
    // signature is nonzero, equalities where it is zero, plus the piece.
    std::vector<LinCons> system(bool full) const {
        std::vector<LinCons> cons = piece.to_cons();
        (void)full;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            if (sig[i] > 0)
                cons.push_back(cons_lt(vneg(hyps[i]), Rat(0)));
            else if (sig[i] < 0)
                cons.push_back(cons_lt(hyps[i], Rat(0)));
            else
                cons.push_back(cons_eq(hyps[i], Rat(0)));
        }
        return cons;
    }
};

}  // namespace

Arrangement arrangement_cells(int dim, const std::vector<QVec>& hyps_raw,
                              const std::vector<ConvexCone>& pieces, bool refine_zero) {
    Arrangement arr;
    arr.dim = dim;
    // Collect normals: explicit hyperplanes plus every piece row.
    std::vector<QVec> raw = hyps_raw;
    for (const auto& p : pieces) {
        for (int i = 0; i < p.G.rows; ++i) raw.push_back(p.G.row(i));
        for (int i = 0; i < p.H.rows; ++i) raw.push_back(p.H.row(i));
    }
    for (const auto& h : raw) {
        QVec c = canonical_hyp(h);
        if (is_zero_vec(c)) continue;
        if (std::find(arr.hyps.begin(), arr.hyps.end(), c) == arr.hyps.end())
            arr.hyps.push_back(std::move(c));
    }
    bool drop_origin = false;
    if (refine_zero) {
        // Every piece row is also a hyperplane, so the all-zero cell is the
        // common kernel of the normals. If that kernel is nontrivial, split
        // it with coordinate hyperplanes so every surviving cell excludes
        // the origin.
        QMat M(0, dim);
        for (const auto& h : arr.hyps) M.append_row(h);
        if (!kernel_basis(M).empty()) {
            for (int j = 0; j < dim; ++j) {
                QVec e(dim, Rat(0));
                e[j] = 1;
                QVec c = canonical_hyp(e);
                if (std::find(arr.hyps.begin(), arr.hyps.end(), c) == arr.hyps.end())
                    arr.hyps.push_back(std::move(c));
            }
        }
        drop_origin = true;
    }
    for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
        Enumerator en{dim, arr.hyps, pieces[pi], static_cast<int>(pi), drop_origin, arr.cells, {}};
        en.recurse(0);
    }
    return arr;
}

}  // namespace stab
