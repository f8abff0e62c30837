// Convex polyhedra { x : A x <= b / = b } with exact membership, activity,
// tangent cones and generator (V-) representations.
#pragma once

#include "stab/cone.hpp"

namespace stab {

struct Polyhedron {
    int dim = 0;
    QMat A;
    QVec b;
    std::vector<bool> eq;  // per row: equality instead of <=

    Polyhedron() = default;
    explicit Polyhedron(int d) : dim(d), A(0, d) {}

    void add_ineq(const QVec& a, const Rat& rhs) {
        A.append_row(a);
        b.push_back(rhs);
        eq.push_back(false);
    }
    void add_eq(const QVec& a, const Rat& rhs) {
        A.append_row(a);
        b.push_back(rhs);
        eq.push_back(true);
    }

    bool contains(const QVec& y) const;
    bool empty() const;

    // Indices of rows satisfied with equality at y (requires contains(y)).
    std::vector<int> active_rows(const QVec& y) const;

    // Tangent cone at a member point: active inequality rows become
    // homogeneous inequalities, equality rows homogeneous equations.
    ConvexCone tangent_at(const QVec& y) const;

    std::vector<LinCons> to_cons() const;

    // Generator representation via homogenization. With a nontrivial
    // lineality space the "vertices" are relative-interior points of the
    // minimal faces rather than true vertices.
    struct VRep {
        std::vector<QVec> vertices;
        std::vector<QVec> rays;
        std::vector<QVec> lin;
    };
    VRep vrep() const;
};

}  // namespace stab
