#include "stab/polyhedron.hpp"

namespace stab {

bool Polyhedron::contains(const QVec& y) const {
    if (static_cast<int>(y.size()) != dim) throw InputError("polyhedron contains: size");
    for (int i = 0; i < A.rows; ++i) {
        Rat v = dot(A.row(i), y);
        if (eq[i] ? v != b[i] : v > b[i]) return false;
    }
    return true;
}

bool Polyhedron::empty() const { return !lp_feasible(dim, to_cons()).feasible; }

std::vector<int> Polyhedron::active_rows(const QVec& y) const {
    if (!contains(y)) throw NotInSetError("active_rows: point not in polyhedron");
    std::vector<int> act;
    for (int i = 0; i < A.rows; ++i)
        if (dot(A.row(i), y) == b[i]) act.push_back(i);
    return act;
}

ConvexCone Polyhedron::tangent_at(const QVec& y) const {
    std::vector<int> act = active_rows(y);
    ConvexCone c(dim);
    for (int i : act) {
        if (eq[i])
            c.add_eq(A.row(i));
        else
            c.add_ineq(A.row(i));
    }
    return c;
}

std::vector<LinCons> Polyhedron::to_cons() const {
    std::vector<LinCons> cons;
    for (int i = 0; i < A.rows; ++i) {
        if (eq[i])
            cons.push_back(cons_eq(A.row(i), b[i]));
        else
            cons.push_back(cons_le(A.row(i), b[i]));
    }
    return cons;
}

Polyhedron::VRep Polyhedron::vrep() const {
    // Homogenize: { (z, t) : A z - b t <= / = 0, -t <= 0 }.
    ConvexCone h(dim + 1);
    for (int i = 0; i < A.rows; ++i) {
        QVec r = A.row(i);
        r.push_back(-b[i]);
        if (eq[i])
            h.add_eq(r);
        else
            h.add_ineq(r);
    }
    QVec tpos(dim + 1, Rat(0));
    tpos[dim] = -1;
    h.add_ineq(tpos);
    ConvexCone::Generators g = h.generators();
    VRep v;
    for (const auto& r : g.rays) {
        QVec z(r.begin(), r.begin() + dim);
        if (r[dim] > 0) {
            v.vertices.push_back(vscale(Rat(1) / r[dim], z));
        } else {
            v.rays.push_back(std::move(z));
        }
    }
    for (const auto& l : g.lin) {
        // Lineality of the homogenization has t = 0 (forced by -t <= 0).
        QVec z(l.begin(), l.begin() + dim);
        if (!is_zero_vec(z)) v.lin.push_back(std::move(z));
    }
    return v;
}

}  // namespace stab
