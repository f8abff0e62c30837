#include "stab/cq.hpp"

#include "stab/quadratic.hpp"

#include <algorithm>

namespace stab {

namespace {

// Pull a cone in constraint space back through the Jacobian: {u | J u in c}.
ConvexCone pullback(const ConvexCone& c, const QMat& J) {
    ConvexCone r(J.cols);
    r.G = mat_mul(c.G, J);
    r.H = mat_mul(c.H, J);
    return r;
}

// Multiplier cone of one directional-normal piece: piece intersected with
// the kernel of J^T.
ConvexCone multiplier_cone(const ConvexCone& piece, const QMat& Jt) {
    ConvexCone lam = piece;
    for (int i = 0; i < Jt.rows; ++i) lam.add_eq(Jt.row(i));
    return lam;
}

// Generators covering the multiplier cone up to positive scaling: rays plus
// both signs of every lineality basis vector. A linear functional is
// nonnegative somewhere on the cone iff it is nonnegative on one of these.
std::vector<QVec> signed_generators(const ConvexCone& lam) {
    ConvexCone::Generators g = lam.generators();
    std::vector<QVec> out = g.rays;
    for (const auto& l : g.lin) {
        out.push_back(l);
        out.push_back(vneg(l));
    }
    return out;
}

void add_diag(std::vector<CellDiag>* diag, const SignedCell& cell, int piece,
              VerdictValue value, std::string note) {
    if (!diag) return;
    diag->push_back({cell.sig, cell.rep, piece, value, std::move(note)});
}

Verdict foscms_impl(const ReferenceData& ref, std::vector<CellDiag>* diag) {
    std::vector<SignedCell> cells = direction_cells(ref);
    if (cells.empty())
        return Verdict::make_holds("linearized cone is trivial; no nonzero directions",
                                   "first-order-cells");
    QMat Jt = ref.J.transpose();
    bool failed = false;
    Verdict fail;
    for (const auto& cell : cells) {
        ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(cell.rep));
        for (std::size_t pi = 0; pi < nc.pieces.size(); ++pi) {
            Verdict probe = cone_nontrivial(nc.pieces[pi], Jt);
            bool bad = probe.holds();
            add_diag(diag, cell, static_cast<int>(pi),
                     bad ? VerdictValue::Fails : VerdictValue::Holds,
                     bad ? "first-order: nonzero multiplier survives"
                         : "first-order: multipliers vanish");
            if (bad && !failed) {
                failed = true;
                fail = Verdict::make_fails(
                    "nonzero multiplier in direction cell " + cell.sig.str(),
                    "first-order-cells");
                fail.with_witness(cell.rep).with_witness(probe.witness.front());
                if (!diag) return fail;
            }
        }
    }
    if (failed) return fail;
    return Verdict::make_holds("every direction of the linearized cone kills all multipliers",
                               "first-order-cells");
}

Verdict soscms_impl(const ReferenceData& ref, double tol, std::vector<CellDiag>* diag) {
    std::vector<SignedCell> cells = direction_cells(ref);
    if (cells.empty())
        return Verdict::make_holds("linearized cone is trivial; no nonzero directions",
                                   "second-order-cells");
    QMat Jt = ref.J.transpose();
    bool failed = false, undecided = false;
    Verdict fail;
    for (const auto& cell : cells) {
        ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(cell.rep));
        for (std::size_t pi = 0; pi < nc.pieces.size(); ++pi) {
            Verdict probe = cone_nontrivial(nc.pieces[pi], Jt);
            if (probe.fails()) {
                add_diag(diag, cell, static_cast<int>(pi), VerdictValue::Holds,
                         "second-order: multipliers vanish");
                continue;
            }
            ConvexCone lam = multiplier_cone(nc.pieces[pi], Jt);
            bool piece_bad = false, piece_undecided = false;
            for (const QVec& lhat : signed_generators(lam)) {
                QuadResult qr = max_quadratic_on_cone(ref.Qmat(lhat), cell.closure, tol);
                if (qr.sign == QSign::Positive || qr.sign == QSign::Zero) {
                    piece_bad = true;
                    if (!failed) {
                        failed = true;
                        fail = Verdict::make_fails(
                            "multiplier generator " + vec_str(lhat) +
                                " attains a nonnegative quadratic value on cell " +
                                cell.sig.str(),
                            "second-order-cells");
                        fail.with_witness(qr.witness).with_witness(lhat);
                    }
                    break;
                }
                if (qr.sign == QSign::Inconclusive) piece_undecided = true;
            }
            if (piece_bad) {
                add_diag(diag, cell, static_cast<int>(pi), VerdictValue::Fails,
                         "second-order: nonnegative value attained");
                if (!diag) return fail;
            } else if (piece_undecided) {
                undecided = true;
                add_diag(diag, cell, static_cast<int>(pi), VerdictValue::Inconclusive,
                         "second-order: eigenvalue test inside tolerance band");
            } else {
                add_diag(diag, cell, static_cast<int>(pi), VerdictValue::Holds,
                         "second-order: all multiplier generators strictly negative");
            }
        }
    }
    if (failed) return fail;
    if (undecided)
        return Verdict::make_inconclusive("some eigenvalue test inside the tolerance band",
                                          "second-order-cells");
    return Verdict::make_holds(
        "surviving multipliers are strictly negative on every direction cell",
        "second-order-cells");
}

// Shared direction test. With second_order unset only the multiplier
// triviality test counts (order-1 premise); with it set, a surviving
// multiplier cone is acceptable when u^T Q(lambda) u < 0 exactly on all of
// its signed generators.
Verdict dir_test(const ReferenceData& ref, const QVec& u, bool second_order) {
    if (static_cast<int>(u.size()) != ref.n)
        throw InputError("direction test: dimension mismatch");
    ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(u));
    if (nc.empty_set())
        return Verdict::make_holds("direction leaves the linearized cone; no multipliers exist",
                                   "direction-vacuous");
    QMat Jt = ref.J.transpose();
    bool used_second = false;
    for (const auto& piece : nc.pieces) {
        Verdict probe = cone_nontrivial(piece, Jt);
        if (probe.fails()) continue;
        if (!second_order) {
            Verdict v = Verdict::make_fails("nonzero multiplier survives the first-order test",
                                            "direction-first-order");
            v.with_witness(u).with_witness(probe.witness.front());
            return v;
        }
        used_second = true;
        ConvexCone lam = multiplier_cone(piece, Jt);
        for (const QVec& lhat : signed_generators(lam)) {
            Rat val = dot(u, ref.Qmat(lhat).mul(u));
            if (val >= 0) {
                Verdict v = Verdict::make_fails(
                    "multiplier generator " + vec_str(lhat) + " reaches u^T Q u = " +
                        rat_str(val) + " >= 0",
                    "direction-second-order");
                v.with_witness(u).with_witness(lhat);
                return v;
            }
        }
    }
    if (used_second)
        return Verdict::make_holds("surviving multipliers are strictly negative at u",
                                   "direction-second-order");
    return Verdict::make_holds("only the zero multiplier survives at u", "direction-first-order");
}

}  // namespace

ConeUnion lin_cone(const ReferenceData& ref) {
    ConeUnion t = tangent_cone(ref.P, ref.qbar);
    ConeUnion r = ConeUnion::empty(ref.n);
    for (const auto& piece : t.pieces) r.pieces.push_back(pullback(piece, ref.J));
    return r;
}

std::vector<SignedCell> direction_cells(const ReferenceData& ref) {
    ConeUnion tl = lin_cone(ref);
    Arrangement arr = arrangement_cells(ref.n, {}, tl.pieces, true);
    std::vector<SignedCell> cells = std::move(arr.cells);
    std::sort(cells.begin(), cells.end(), [](const SignedCell& a, const SignedCell& b) {
        if (a.sig.s != b.sig.s) return a.sig.s < b.sig.s;
        return a.piece < b.piece;
    });
    // Equal signatures denote the same point set (every piece row is a
    // canonical hyperplane), so keep one representative per signature.
    cells.erase(std::unique(cells.begin(), cells.end(),
                            [](const SignedCell& a, const SignedCell& b) {
                                return a.sig.s == b.sig.s;
                            }),
                cells.end());
    return cells;
}

Verdict check_metric_regularity(const ReferenceData& ref) {
    QMat Jt = ref.J.transpose();
    ConeUnion nc = limiting_normal_cone(ref.P, ref.qbar);
    for (const auto& piece : nc.pieces) {
        Verdict probe = cone_nontrivial(piece, Jt);
        if (probe.holds()) {
            Verdict v = Verdict::make_fails("nonzero multiplier satisfies the criterion system",
                                            "multiplier-criterion");
            v.with_witness(probe.witness.front());
            return v;
        }
    }
    return Verdict::make_holds("only the zero multiplier satisfies the criterion system",
                               "multiplier-criterion");
}

Verdict check_foscms(const ReferenceData& ref) { return foscms_impl(ref, nullptr); }

Verdict check_soscms(const ReferenceData& ref, double tol) {
    return soscms_impl(ref, tol, nullptr);
}

Verdict check_dir_subregularity(const ReferenceData& ref, const QVec& u) {
    return dir_test(ref, u, true);
}

FeasDirection find_feasibility_direction(const ReferenceData& ref, int l) {
    if (l != 1 && l != 2) throw InputError("feasibility direction: order must be 1 or 2");
    std::vector<SignedCell> cells = direction_cells(ref);
    if (cells.empty())
        return {QVec(), Verdict::make_fails("no nonzero direction in the linearized cone",
                                            "feasibility-search")};
    for (const auto& cell : cells) {
        Verdict v = dir_test(ref, cell.rep, l == 2);
        if (v.holds()) {
            Verdict ok = Verdict::make_holds(
                "direction in cell " + cell.sig.str() + " admits the order-" +
                    std::to_string(l) + " estimate",
                "feasibility-search");
            ok.with_witness(cell.rep);
            return {cell.rep, ok};
        }
    }
    return {QVec(), Verdict::make_fails("no direction cell passes the order-" +
                                            std::to_string(l) + " test",
                                        "feasibility-search")};
}

CQReport cq_report(const ReferenceData& ref, double tol) {
    CQReport rep;
    rep.metric_regularity = check_metric_regularity(ref);
    rep.foscms = foscms_impl(ref, &rep.cells);
    rep.soscms = soscms_impl(ref, tol, &rep.cells);
    if (rep.metric_regularity.holds() && !rep.foscms.holds())
        throw InternalError("first-order condition regressed below the multiplier criterion");
    if (rep.foscms.holds() && !rep.soscms.holds())
        throw InternalError("second-order condition regressed below the first-order one");
    rep.r1 = rep.foscms.holds()
                 ? Verdict::make_holds("first-order condition grants the order-1 distance bound",
                                       "derived")
                 : Verdict::make_inconclusive(
                       "first-order condition not established; bound undecided", "derived");
    rep.r2 = rep.soscms.holds()
                 ? Verdict::make_holds("second-order condition grants the order-2 distance bound",
                                       "derived")
                 : Verdict::make_inconclusive(
                       "second-order condition not established; bound undecided", "derived");
    return rep;
}

}  // namespace stab
