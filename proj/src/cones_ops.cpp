#include "stab/cones_ops.hpp"

#include <set>

namespace stab {

namespace {

// Convex containment through generators: every ray of a (and both signs of
// every lineality vector) must lie in b.
bool cone_in_cone(const ConvexCone::Generators& ga, const ConvexCone& b) {
    for (const auto& r : ga.rays)
        if (!b.contains(r)) return false;
    for (const auto& l : ga.lin)
        if (!b.contains(l) || !b.contains(vneg(l))) return false;
    return true;
}

// Tangent cone of a convex polyhedral cone at a member point: active
// inequality rows stay, equalities stay.
ConvexCone cone_tangent_at(const ConvexCone& c, const QVec& z) {
    ConvexCone t(c.dim);
    for (int r = 0; r < c.G.rows; ++r) {
        QVec row = c.G.row(r);
        if (dot(row, z) == 0) t.add_ineq(row);
    }
    t.H = c.H;
    return t;
}

bool remainder_empty(int dim, std::vector<LinCons> cur,
                     const std::vector<std::vector<LinCons>>& b, std::size_t idx) {
    if (!lp_feasible(dim, cur).feasible) return true;
    if (idx == b.size()) return false;
    // Split cur \ b[idx] into atoms, each violating one row of b[idx].
    for (const LinCons& r : b[idx]) {
        if (r.rel == Rel::EQ) {
            auto low = cur;
            low.push_back(cons_lt(r.a, r.b));
            if (!remainder_empty(dim, std::move(low), b, idx + 1)) return false;
            auto high = cur;
            high.push_back(cons_lt(vneg(r.a), -r.b));
            if (!remainder_empty(dim, std::move(high), b, idx + 1)) return false;
        } else if (r.rel == Rel::LE) {
            auto atom = cur;
            atom.push_back(cons_lt(vneg(r.a), -r.b));
            if (!remainder_empty(dim, std::move(atom), b, idx + 1)) return false;
        } else {
            auto atom = cur;
            atom.push_back(cons_le(vneg(r.a), -r.b));
            if (!remainder_empty(dim, std::move(atom), b, idx + 1)) return false;
        }
    }
    return true;
}

}  // namespace

bool ConeUnion::contains(const QVec& z) const {
    for (const auto& p : pieces)
        if (p.contains(z)) return true;
    return false;
}

void ConeUnion::dedup() {
    const std::size_t n = pieces.size();
    if (n < 2) return;
    std::vector<ConvexCone::Generators> gens(n);
    for (std::size_t i = 0; i < n; ++i) gens[i] = pieces[i].generators();
    std::vector<char> in(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) in[i * n + j] = cone_in_cone(gens[i], pieces[j]);
    std::vector<ConvexCone> kept;
    for (std::size_t i = 0; i < n; ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < n && !drop; ++j) {
            if (i == j || !in[i * n + j]) continue;
            // drop i when strictly inside j, or equal to an earlier j
            if (!in[j * n + i] || j < i) drop = true;
        }
        if (!drop) kept.push_back(pieces[i]);
    }
    pieces = std::move(kept);
}

bool ConeUnion::subset_of(const ConeUnion& o) const {
    if (dim != o.dim) throw InputError("subset_of: dimension mismatch");
    std::vector<std::vector<LinCons>> a, b;
    for (const auto& p : pieces) a.push_back(p.to_cons());
    for (const auto& p : o.pieces) b.push_back(p.to_cons());
    return region_subset(dim, a, b);
}

bool ConeUnion::set_equal(const ConeUnion& o) const {
    return subset_of(o) && o.subset_of(*this);
}

bool ConeUnion::nontrivial() const {
    for (const auto& p : pieces)
        if (!p.is_trivial()) return true;
    return false;
}

ConeUnion cu_product(const ConeUnion& a, const ConeUnion& b) {
    ConeUnion out{a.dim + b.dim, {}};
    for (const auto& pa : a.pieces)
        for (const auto& pb : b.pieces) out.pieces.push_back(product(pa, pb));
    return out;
}

bool region_subset(int dim, const std::vector<std::vector<LinCons>>& a,
                   const std::vector<std::vector<LinCons>>& b) {
    for (const auto& sys : a)
        if (!remainder_empty(dim, sys, b, 0)) return false;
    return true;
}

ConeUnion tangent_to_union(const std::vector<Polyhedron>& pieces, const QVec& y) {
    if (pieces.empty()) throw InputError("tangent_to_union: no pieces");
    ConeUnion out{pieces[0].dim, {}};
    for (const auto& p : pieces)
        if (p.contains(y)) out.pieces.push_back(p.tangent_at(y));
    if (out.pieces.empty()) throw NotInSetError("tangent_to_union: point not in the union");
    out.dedup();
    return out;
}

ConvexCone regular_normal_to_union(const std::vector<Polyhedron>& pieces, const QVec& y) {
    bool any = false;
    ConvexCone acc;
    for (const auto& p : pieces) {
        if (!p.contains(y)) continue;
        ConvexCone polar_piece = p.tangent_at(y).polar();
        acc = any ? intersect(acc, polar_piece) : polar_piece;
        any = true;
    }
    if (!any) throw NotInSetError("regular_normal_to_union: point not in the union");
    return acc;
}

ConeUnion dir_normal_of_cone_union(const ConeUnion& K, const QVec& d) {
    const int n = K.dim;
    if ((int)d.size() != n) throw InputError("dir_normal_of_cone_union: dimension mismatch");
    if (K.empty_set() || !K.contains(d)) return ConeUnion::empty(n);

    Arrangement arr = arrangement_cells(n, {}, K.pieces, false);
    std::set<CellSignature> seen;
    ConeUnion out{n, {}};
    for (const SignedCell& cell : arr.cells) {
        if (!cell.closure.contains(d)) continue;
        if (!seen.insert(cell.sig).second) continue;  // value depends on sig only
        ConvexCone val;
        bool any = false;
        for (const ConvexCone& piece : K.pieces) {
            if (!piece.contains(cell.rep)) continue;
            ConvexCone polar_piece = cone_tangent_at(piece, cell.rep).polar();
            val = any ? intersect(val, polar_piece) : polar_piece;
            any = true;
        }
        if (!any) throw InternalError("arrangement cell representative escaped every piece");
        out.pieces.push_back(std::move(val));
    }
    if (out.pieces.empty())
        throw InternalError("no qualifying arrangement cell for an interior direction");
    out.dedup();
    return out;
}

ConeUnion tangent_to_cone_union(const ConeUnion& K, const QVec& lam) {
    ConeUnion out{K.dim, {}};
    for (const auto& piece : K.pieces)
        if (piece.contains(lam)) out.pieces.push_back(cone_tangent_at(piece, lam));
    if (out.pieces.empty()) throw NotInSetError("tangent_to_cone_union: point not in the union");
    out.dedup();
    return out;
}

ConeUnion tangent_cone(const DisjunctiveSet& P, const QVec& y) {
    if ((int)y.size() != P.dim) throw InputError("tangent_cone: dimension mismatch");
    ConeUnion acc = ConeUnion::single(ConvexCone::everything(0));
    for (std::size_t bi = 0; bi < P.blocks.size(); ++bi)
        acc = cu_product(acc, tangent_to_union(P.blocks[bi].pieces, P.block_slice(y, (int)bi)));
    acc.dedup();
    return acc;
}

ConvexCone regular_normal_cone(const DisjunctiveSet& P, const QVec& y) {
    if ((int)y.size() != P.dim) throw InputError("regular_normal_cone: dimension mismatch");
    ConvexCone acc = ConvexCone::everything(0);
    for (std::size_t bi = 0; bi < P.blocks.size(); ++bi)
        acc = product(acc, regular_normal_to_union(P.blocks[bi].pieces, P.block_slice(y, (int)bi)));
    return acc;
}

namespace {

ConvexCone axis_line(int which) {
    // {xi : xi_which = 0} in R^2.
    ConvexCone c(2);
    QVec e(2, Rat(0));
    e[which] = Rat(1);
    c.add_eq(e);
    return c;
}

ConvexCone up_ray() {
    // {xi : xi_1 = 0, xi_2 >= 0}
    ConvexCone c(2);
    c.add_eq({Rat(1), Rat(0)});
    c.add_ineq({Rat(0), Rat(-1)});
    return c;
}

ConvexCone left_halfline() {
    // {xi : xi_1 <= 0, xi_2 = 0}
    ConvexCone c(2);
    c.add_ineq({Rat(1), Rat(0)});
    c.add_eq({Rat(0), Rat(1)});
    return c;
}

ConvexCone nonneg_quadrant() {
    ConvexCone c(2);
    c.add_ineq({Rat(-1), Rat(0)});
    c.add_ineq({Rat(0), Rat(-1)});
    return c;
}

// Closed-form directional limiting normals of the complementarity angle
// R- x {0} U {0} x R-. At the kink every direction inside the set reduces
// to the limiting normal at that direction.
ConeUnion ec_dir_normal(const QVec& y, const QVec& d) {
    const Rat z(0);
    bool on1 = y[0] <= z && y[1] == z;
    bool on2 = y[0] == z && y[1] <= z;
    if (!on1 && !on2) throw NotInSetError("point outside complementarity angle");
    if (y[0] < z) return d[1] == z ? ConeUnion::single(axis_line(0)) : ConeUnion::empty(2);
    if (y[1] < z) return d[0] == z ? ConeUnion::single(axis_line(1)) : ConeUnion::empty(2);
    // y = 0: tangent cone is the set itself.
    bool d1 = d[0] <= z && d[1] == z;
    bool d2 = d[0] == z && d[1] <= z;
    if (!d1 && !d2) return ConeUnion::empty(2);
    if (d[0] < z) return ConeUnion::single(axis_line(0));
    if (d[1] < z) return ConeUnion::single(axis_line(1));
    ConeUnion out(2);
    out.pieces = {nonneg_quadrant(), axis_line(0), axis_line(1)};
    return out;
}

// Closed-form directional limiting normals of R+ x R- U {0} x R+.
ConeUnion vc_dir_normal(const QVec& y, const QVec& d) {
    const Rat z(0);
    bool p1 = y[0] >= z && y[1] <= z;
    bool p2 = y[0] == z && y[1] >= z;
    if (!p1 && !p2) throw NotInSetError("point outside vanishing-pattern set");
    if (y[0] > z && y[1] < z) return ConeUnion::single(ConvexCone::zero(2));
    if (y[0] > z) {
        // on the edge {y1 > 0, y2 = 0}: tangent halfspace {d2 <= 0}
        if (d[1] < z) return ConeUnion::single(ConvexCone::zero(2));
        if (d[1] == z) return ConeUnion::single(up_ray());
        return ConeUnion::empty(2);
    }
    if (y[1] < z) {
        // on the edge {y1 = 0, y2 < 0}: tangent halfspace {d1 >= 0}
        if (d[0] > z) return ConeUnion::single(ConvexCone::zero(2));
        if (d[0] == z) return ConeUnion::single(left_halfline());
        return ConeUnion::empty(2);
    }
    if (y[1] > z) {
        // on the upward arm away from the origin: tangent line {d1 = 0}
        return d[0] == z ? ConeUnion::single(axis_line(1)) : ConeUnion::empty(2);
    }
    // y = 0
    bool in1 = d[0] >= z && d[1] <= z;
    bool in2 = d[0] == z && d[1] >= z;
    if (!in1 && !in2) return ConeUnion::empty(2);
    if (d[0] > z && d[1] < z) return ConeUnion::single(ConvexCone::zero(2));
    if (d[0] > z) return ConeUnion::single(up_ray());
    if (d[1] < z) return ConeUnion::single(left_halfline());
    if (d[1] > z) return ConeUnion::single(axis_line(1));
    ConeUnion out(2);
    out.pieces = {axis_line(1), up_ray()};
    return out;
}

// Directional normals of the nonpositive orthant: componentwise sign rule.
ConeUnion nonpos_dir_normal(int k, const QVec& y, const QVec& d) {
    const Rat z(0);
    for (int i = 0; i < k; ++i)
        if (y[i] > z) throw NotInSetError("point outside nonpositive orthant");
    ConvexCone c(k);
    for (int i = 0; i < k; ++i) {
        QVec e(k, Rat(0));
        e[i] = Rat(1);
        if (y[i] < z) {
            c.add_eq(e);
        } else if (d[i] > z) {
            return ConeUnion::empty(k);
        } else if (d[i] < z) {
            c.add_eq(e);
        } else {
            e[i] = Rat(-1);
            c.add_ineq(e);
        }
    }
    return ConeUnion::single(c);
}

ConeUnion block_dir_normal(const Block& b, const QVec& yb, const QVec& db) {
    switch (b.kind) {
        case Block::Kind::NonPos:
            return nonpos_dir_normal(b.dim, yb, db);
        case Block::Kind::Zero:
            if (!is_zero_vec(yb)) throw NotInSetError("point outside zero block");
            return is_zero_vec(db) ? ConeUnion::single(ConvexCone::everything(b.dim))
                                   : ConeUnion::empty(b.dim);
        case Block::Kind::Free:
            return ConeUnion::single(ConvexCone::zero(b.dim));
        case Block::Kind::EC:
            return ec_dir_normal(yb, db);
        case Block::Kind::VC:
            return vc_dir_normal(yb, db);
        case Block::Kind::Union:
            break;
    }
    return dir_normal_of_cone_union(tangent_to_union(b.pieces, yb), db);
}

}  // namespace

ConeUnion dir_limiting_normal_cone(const DisjunctiveSet& P, const QVec& y, const QVec& d) {
    if ((int)y.size() != P.dim || (int)d.size() != P.dim)
        throw InputError("dir_limiting_normal_cone: dimension mismatch");
    ConeUnion acc = ConeUnion::single(ConvexCone::everything(0));
    for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
        const Block& b = P.blocks[bi];
        int off = P.block_offset((int)bi);
        QVec db(d.begin() + off, d.begin() + off + b.dim);
        ConeUnion nb = block_dir_normal(b, P.block_slice(y, (int)bi), db);
        if (nb.empty_set()) return ConeUnion::empty(P.dim);
        acc = cu_product(acc, nb);
    }
    acc.dedup();
    return acc;
}

ConeUnion limiting_normal_cone(const DisjunctiveSet& P, const QVec& y) {
    return dir_limiting_normal_cone(P, y, QVec(P.dim, Rat(0)));
}

ConeUnion tangent_cone_flat(const DisjunctiveSet& P, const QVec& y) {
    return tangent_to_union(P.flatten().pieces, y);
}

ConvexCone regular_normal_cone_flat(const DisjunctiveSet& P, const QVec& y) {
    return regular_normal_to_union(P.flatten().pieces, y);
}

ConeUnion dir_limiting_normal_cone_flat(const DisjunctiveSet& P, const QVec& y, const QVec& d) {
    ConeUnion k = tangent_to_union(P.flatten().pieces, y);
    return dir_normal_of_cone_union(k, d);
}

bool coderivative_membership(const QMat& J, const DisjunctiveSet& P, const QVec& qbar,
                             const QVec& u, const QVec& lambda, const QVec& v) {
    QVec ju = J.mul(u);
    ConeUnion nc = dir_limiting_normal_cone(P, qbar, ju);
    if (!nc.contains(lambda)) return false;
    return J.tmul(lambda) == v;
}

}  // namespace stab
