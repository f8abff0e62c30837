// Tangent, regular normal, limiting normal and directional limiting normal
// cones of disjunctive sets, computed exactly. Nonconvex cones are carried
// as finite unions of convex polyhedral pieces.
#pragma once

#include "stab/arrangement.hpp"
#include "stab/disjunctive.hpp"

namespace stab {

// Finite union of closed convex polyhedral cones. An empty piece list is the
// empty set (distinct from the zero cone, which is one all-equality piece).
struct ConeUnion {
    int dim = 0;
    std::vector<ConvexCone> pieces;

    static ConeUnion empty(int d) { return ConeUnion{d, {}}; }
    static ConeUnion single(ConvexCone c) {
        ConeUnion u{c.dim, {}};
        u.pieces.push_back(std::move(c));
        return u;
    }

    bool empty_set() const { return pieces.empty(); }
    bool contains(const QVec& z) const;
    // Drop pieces contained in an earlier-kept piece (convex-in-convex test).
    void dedup();
    // Exact region containment and equality (not piecewise matching).
    bool subset_of(const ConeUnion& o) const;
    bool set_equal(const ConeUnion& o) const;
    // True iff some piece contains a nonzero point.
    bool nontrivial() const;
};

ConeUnion cu_product(const ConeUnion& a, const ConeUnion& b);

// Exact containment of a union of constraint systems in another union,
// by recursive complement splitting. Systems may mix LE/EQ/LT rows.
bool region_subset(int dim, const std::vector<std::vector<LinCons>>& a,
                   const std::vector<std::vector<LinCons>>& b);

// Tangent cone to a finite union of polyhedra at a member point: the union
// of the tangent cones of the pieces containing it. Throws NotInSetError.
ConeUnion tangent_to_union(const std::vector<Polyhedron>& pieces, const QVec& y);

// Regular normal cone at a member point: intersection of the polars of the
// piece tangent cones.
ConvexCone regular_normal_to_union(const std::vector<Polyhedron>& pieces, const QVec& y);

// Directional limiting normal cone at the apex of a union K of polyhedral
// cones, in direction d: the union, over arrangement cells of K whose
// closure contains d, of the regular normal cone to K at a cell
// representative. d = 0 yields the full limiting normal cone; d outside K
// yields the empty set.
ConeUnion dir_normal_of_cone_union(const ConeUnion& K, const QVec& d);

// Tangent cone to a cone union at one of its points (no arrangement needed:
// active rows of the pieces containing the point). Throws NotInSetError.
ConeUnion tangent_to_cone_union(const ConeUnion& K, const QVec& lam);

// Blockwise operations on a disjunctive set. Tangent and directional
// limiting normal cones of a product are the products of the per-block
// cones; the regular normal cone is the product of convex factors.
ConeUnion tangent_cone(const DisjunctiveSet& P, const QVec& y);
ConvexCone regular_normal_cone(const DisjunctiveSet& P, const QVec& y);
ConeUnion dir_limiting_normal_cone(const DisjunctiveSet& P, const QVec& y, const QVec& d);
ConeUnion limiting_normal_cone(const DisjunctiveSet& P, const QVec& y);

// Reference path over the flattened piece list, with no blockwise
// factorization. Same sets as the blockwise versions; used to cross-check.
ConeUnion tangent_cone_flat(const DisjunctiveSet& P, const QVec& y);
ConvexCone regular_normal_cone_flat(const DisjunctiveSet& P, const QVec& y);
ConeUnion dir_limiting_normal_cone_flat(const DisjunctiveSet& P, const QVec& y, const QVec& d);

// Membership test for the graphical derivative-style condition used by the
// stability system: lambda in N(qbar; P; J u) and v == J^T lambda.
bool coderivative_membership(const QMat& J, const DisjunctiveSet& P, const QVec& qbar,
                             const QVec& u, const QVec& lambda, const QVec& v);

}  // namespace stab
