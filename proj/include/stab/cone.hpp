// Convex polyhedral cones in H-representation with exact double-description
// conversion to generators, polarity, and face enumeration.
#pragma once

#include "stab/lp.hpp"
#include "stab/rational.hpp"
#include "stab/verdict.hpp"

namespace stab {

// { z : G z <= 0, H z = 0 }. Either matrix may have zero rows.
struct ConvexCone {
    int dim = 0;
    QMat G;
    QMat H;

    ConvexCone() = default;
    explicit ConvexCone(int d) : dim(d), G(0, d), H(0, d) {}

    static ConvexCone everything(int d) { return ConvexCone(d); }
    static ConvexCone zero(int d) {
        ConvexCone c(d);
        c.H = QMat::identity(d);
        return c;
    }
    // H-representation of cone(rays) + span(lin).
    static ConvexCone from_generators(int d, const std::vector<QVec>& rays,
                                      const std::vector<QVec>& lin);

    bool contains(const QVec& z) const;

    struct Generators {
        std::vector<QVec> rays;  // canonical integer scaling
        std::vector<QVec> lin;   // basis of the lineality space
    };
    Generators generators() const;  // exact double description

    bool is_trivial() const;  // == {0}
    ConvexCone polar() const;
    bool subset_of(const ConvexCone& other) const;
    bool set_equal(const ConvexCone& other) const;

    // Rows as homogeneous constraints (G rows LE 0, H rows EQ 0).
    std::vector<LinCons> to_cons() const;
    // Exact basis of the linear span of the cone.
    std::vector<QVec> span() const;

    void add_ineq(const QVec& a) { G.append_row(a); }
    void add_eq(const QVec& a) { H.append_row(a); }
};

// Cone of the intersection / cartesian product.
ConvexCone intersect(const ConvexCone& a, const ConvexCone& b);
ConvexCone product(const ConvexCone& a, const ConvexCone& b);

// Decide whether { z in C : E z = 0 } contains a nonzero point, via the
// 2*dim normalization feasibility problems z_k = +-1. Holds carries a
// nonzero witness; Fails certifies the set is exactly {0}.
Verdict cone_nontrivial(const ConvexCone& c, const QMat& extra_eq);

// Relatively open faces of a cone, enumerated by the set of G-rows active on
// them. rep satisfies the active rows with equality and the rest strictly.
// The improper face with empty relative interior entries are skipped; the
// face list always covers the cone pointwise.
struct ConeFace {
    std::vector<int> active;  // indices into G rows
    QVec rep;
};
std::vector<ConeFace> enumerate_faces(const ConvexCone& c);

}  // namespace stab
