// Constraint-qualification checkers: verdicts on the worked fixtures against
// hand-derived multiplier systems, the implication chain, exactness of every
// failure witness, independence from the choice of cell representative, and
// sampling cross-checks of the first- and second-order conditions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stab/cq.hpp"
#include "stab/quadratic.hpp"

#include <random>
#include <set>
#include <string>

using namespace stab;

namespace {

QVec qv(std::initializer_list<int> v) {
    QVec r;
    for (int x : v) r.push_back(Rat(x));
    return r;
}

QMat qm(std::initializer_list<std::initializer_list<int>> rows) {
    QMat m;
    for (auto row : rows) {
        QVec a;
        for (int x : row) a.push_back(Rat(x));
        if (m.cols == 0) m = QMat(0, static_cast<int>(a.size()));
        m.append_row(a);
    }
    return m;
}

ReferenceData load_ref(const std::string& stem) {
    return load_problem(std::string(FIXTURE_DIR) + "/" + stem + ".prob").ref;
}

// Minimal reference data for hand-built instances: zero objective data, zero
// Hessians, reference constraint value at the origin.
ReferenceData mk_ref(int n, DisjunctiveSet P, const QMat& J) {
    ReferenceData r;
    r.n = n;
    r.m = J.rows;
    r.s = 1;
    r.P = std::move(P);
    r.qbar = QVec(static_cast<std::size_t>(J.rows), Rat(0));
    r.J = J;
    r.Hq.assign(static_cast<std::size_t>(J.rows), QMat(n, n));
    r.grad_f = QVec(static_cast<std::size_t>(n), Rat(0));
    r.Hf = QMat(n, n);
    r.validate();
    return r;
}

// Exact re-verification of a failure witness pair (u, lambda): lambda is a
// nonzero member of the directional normal cone at J u and J^T lambda = 0.
void require_witness_pair(const ReferenceData& ref, const Verdict& v) {
    REQUIRE(v.fails());
    REQUIRE(v.witness.size() == 2);
    const QVec& u = v.witness[0];
    const QVec& lam = v.witness[1];
    CHECK(!is_zero_vec(lam));
    CHECK(dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(u)).contains(lam));
    CHECK(is_zero_vec(ref.J.transpose().mul(lam)));
}

}  // namespace

TEST_CASE("linearized cone matches hand computation") {
    ReferenceData a = load_ref("ex51");
    ConeUnion la = lin_cone(a);
    CHECK(la.pieces.size() == 2);  // one per tangent piece of the vertical shape
    CHECK(la.set_equal(ConeUnion::single(
        ConvexCone::from_generators(2, {qv({0, 1})}, {}))));

    ReferenceData c = load_ref("ex54");
    ConvexCone axis(2);
    axis.add_eq(qv({0, 1}));
    CHECK(lin_cone(c).set_equal(ConeUnion::single(axis)));

    DisjunctiveSet allfree;
    allfree.add(Block::free_block(2));
    ReferenceData f = mk_ref(2, allfree, qm({{1, 2}, {3, 4}}));
    CHECK(lin_cone(f).set_equal(ConeUnion::single(ConvexCone::everything(2))));
}

TEST_CASE("multiplier criterion on the worked fixtures") {
    ReferenceData a = load_ref("ex51");
    Verdict va = check_metric_regularity(a);
    CHECK(va.fails());
    REQUIRE(va.witness.size() == 1);
    CHECK(positively_proportional(va.witness[0], qv({0, 1, 0, -1})));
    CHECK(limiting_normal_cone(a.P, a.qbar).contains(va.witness[0]));
    CHECK(is_zero_vec(a.J.transpose().mul(va.witness[0])));

    CHECK(check_metric_regularity(load_ref("ex52")).holds());

    ReferenceData c = load_ref("ex54");
    Verdict vc = check_metric_regularity(c);
    CHECK(vc.fails());
    REQUIRE(vc.witness.size() == 1);
    CHECK(positively_proportional(vc.witness[0], qv({1, 1})));

    CHECK(check_metric_regularity(load_ref("ex55")).holds());
}

TEST_CASE("first-order condition over direction cells") {
    CHECK(check_foscms(load_ref("ex51")).holds());
    CHECK(check_foscms(load_ref("ex52")).holds());
    CHECK(check_foscms(load_ref("ex55")).holds());

    ReferenceData c = load_ref("ex54");
    Verdict v = check_foscms(c);
    require_witness_pair(c, v);
    const QVec& u = v.witness[0];
    CHECK(u[1] == 0);
    CHECK(u[0] != 0);
    CHECK(positively_proportional(v.witness[1], qv({1, 1})));
}

TEST_CASE("second-order condition and the zero-Hessian degeneration") {
    CHECK(check_soscms(load_ref("ex51")).holds());
    CHECK(check_soscms(load_ref("ex52")).holds());
    CHECK(check_soscms(load_ref("ex54")).holds());
    CHECK(check_soscms(load_ref("ex55")).holds());

    // Constraint Hessians wiped out: the first-order failure direction now
    // yields quadratic value exactly zero, so the second-order rescue dies.
    ReferenceData c = load_ref("ex54");
    c.Hq[1] = QMat(2, 2);
    Verdict v = check_soscms(c);
    require_witness_pair(c, v);
    CHECK(dot(v.witness[0], c.Qmat(v.witness[1]).mul(v.witness[0])) == 0);
}

TEST_CASE("subregularity in a fixed direction") {
    ReferenceData a = load_ref("ex51");
    Verdict v1 = check_dir_subregularity(a, qv({0, 1}));
    CHECK(v1.holds());
    CHECK(v1.route == "direction-first-order");

    ReferenceData c = load_ref("ex54");
    Verdict v2 = check_dir_subregularity(c, qv({1, 0}));
    CHECK(v2.holds());
    CHECK(v2.route == "direction-second-order");

    // Direction outside the linearized cone: no multipliers exist at all.
    Verdict v3 = check_dir_subregularity(c, qv({0, 1}));
    CHECK(v3.holds());
    CHECK(v3.route == "direction-vacuous");

    // u = 0 degenerates to the plain multiplier criterion, which fails here
    // (the quadratic rescue evaluates to zero at the origin).
    Verdict v4 = check_dir_subregularity(c, qv({0, 0}));
    CHECK(v4.fails());

    ReferenceData cz = load_ref("ex54");
    cz.Hq[1] = QMat(2, 2);
    CHECK(check_dir_subregularity(cz, qv({1, 0})).fails());
}

TEST_CASE("feasibility direction search") {
    ReferenceData a = load_ref("ex51");
    FeasDirection fa = find_feasibility_direction(a, 1);
    CHECK(fa.verdict.holds());
    CHECK(canonical_ray(fa.u) == qv({0, 1}));

    ReferenceData c = load_ref("ex54");
    CHECK(find_feasibility_direction(c, 1).verdict.fails());
    FeasDirection fc = find_feasibility_direction(c, 2);
    CHECK(fc.verdict.holds());
    CHECK(fc.u[1] == 0);
    CHECK(fc.u[0] != 0);
    CHECK(check_dir_subregularity(c, fc.u).holds());

    // Zero block with an injective Jacobian leaves only the zero direction.
    DisjunctiveSet pz;
    pz.add(Block::zero(1));
    ReferenceData z = mk_ref(1, pz, qm({{1}}));
    FeasDirection fz = find_feasibility_direction(z, 2);
    CHECK(fz.verdict.fails());
    CHECK(fz.verdict.reason.find("no nonzero") != std::string::npos);

    CHECK_THROWS_AS(find_feasibility_direction(a, 3), InputError);
}

TEST_CASE("report assembles derived flags and keeps the implication chain") {
    for (const char* stem : {"ex51", "ex52", "ex54", "ex55"}) {
        CAPTURE(stem);
        ReferenceData ref = load_ref(stem);
        CQReport rep = cq_report(ref);
        if (rep.metric_regularity.holds()) CHECK(rep.foscms.holds());
        if (rep.foscms.holds()) CHECK(rep.soscms.holds());
        CHECK(rep.r1.value != VerdictValue::Fails);
        CHECK(rep.r2.value != VerdictValue::Fails);
        CHECK(rep.r1.holds() == rep.foscms.holds());
        CHECK(rep.r2.holds() == rep.soscms.holds());
        CHECK(!rep.cells.empty());
    }

    CQReport rc = cq_report(load_ref("ex54"));
    CHECK(rc.metric_regularity.fails());
    CHECK(rc.foscms.fails());
    CHECK(rc.soscms.holds());
    CHECK(rc.r1.inconclusive());
    CHECK(rc.r2.holds());
    bool saw_first_order_fail = false, saw_second_order_hold = false;
    for (const auto& d : rc.cells) {
        if (d.value == VerdictValue::Fails && d.note.find("first-order") == 0)
            saw_first_order_fail = true;
        if (d.value == VerdictValue::Holds && d.note.find("second-order") == 0)
            saw_second_order_hold = true;
    }
    CHECK(saw_first_order_fail);
    CHECK(saw_second_order_hold);
}

TEST_CASE("cell representatives do not affect the directional cone") {
    std::mt19937_64 rng(91929394ull);
    for (const char* stem : {"ex51", "ex54", "ex55"}) {
        CAPTURE(stem);
        ReferenceData ref = load_ref(stem);
        for (const SignedCell& cell : direction_cells(ref)) {
            ConeUnion at_rep = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(cell.rep));
            ConvexCone::Generators g = cell.closure.generators();
            REQUIRE((!g.rays.empty() || !g.lin.empty()));
            for (int trial = 0; trial < 3; ++trial) {
                // A strictly positive combination of all rays plus any
                // lineality part stays in the relative interior, i.e. in the
                // same cell.
                QVec p(cell.rep.size(), Rat(0));
                for (const auto& r : g.rays)
                    p = vadd(p, vscale(Rat(1 + static_cast<int>(rng() % 7)), r));
                for (const auto& l : g.lin)
                    p = vadd(p, vscale(Rat(static_cast<int>(rng() % 7) - 3), l));
                if (is_zero_vec(p)) continue;
                ConeUnion at_p = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(p));
                CHECK(at_p.set_equal(at_rep));
            }
        }
    }
}

TEST_CASE("first-order condition agrees with direction sampling") {
    std::mt19937_64 rng(72727272ull);
    auto random_blocks = [&](int m) {
        DisjunctiveSet P;
        int rem = m;
        while (rem > 0) {
            switch (rng() % 4) {
                case 0:
                    if (rem >= 2) {
                        P.add(Block::ec());
                        rem -= 2;
                        break;
                    }
                    [[fallthrough]];
                case 1:
                    if (rem >= 2) {
                        P.add(Block::vc());
                        rem -= 2;
                        break;
                    }
                    [[fallthrough]];
                case 2: {
                    int k = 1 + static_cast<int>(rng() % rem);
                    P.add(Block::nonpos(k));
                    rem -= k;
                    break;
                }
                default: {
                    int k = 1 + static_cast<int>(rng() % rem);
                    P.add(Block::zero(k));
                    rem -= k;
                    break;
                }
            }
        }
        return P;
    };

    for (int inst = 0; inst < 6; ++inst) {
        int n = 1 + inst % 3;
        int m = 1 + static_cast<int>(rng() % 3);
        DisjunctiveSet P = random_blocks(m);
        QMat J(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                J.at(i, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ReferenceData ref = mk_ref(n, P, J);
        CAPTURE(inst);

        Verdict engine = check_foscms(ref);
        QMat Jt = ref.J.transpose();

        std::set<QVec> seen;
        std::vector<QVec> dirs;
        for (int d = 0; d < 10000; ++d) {
            QVec u(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) u[j] = Rat(static_cast<int>(rng() % 19) - 9);
            if (is_zero_vec(u)) continue;
            u = canonical_ray(u);
            if (seen.insert(u).second) dirs.push_back(u);
        }
        if (engine.fails()) dirs.push_back(engine.witness[0]);

        bool sampled_fail = false;
        for (const QVec& u : dirs) {
            ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(u));
            for (const auto& piece : nc.pieces)
                if (cone_nontrivial(piece, Jt).holds()) {
                    sampled_fail = true;
                    break;
                }
            if (sampled_fail) break;
        }
        CHECK(sampled_fail == engine.fails());
    }
}

TEST_CASE("second-order condition agrees with sampling on inequality systems") {
    std::mt19937_64 rng(31415926ull);
    for (int inst = 0; inst < 4; ++inst) {
        int n = 2, m = 2;
        DisjunctiveSet P;
        P.add(Block::nonpos(m));
        QMat J(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                J.at(i, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ReferenceData ref = mk_ref(n, P, J);
        for (int i = 0; i < m; ++i) {
            QMat H(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = r; c < n; ++c) {
                    H.at(r, c) = Rat(static_cast<int>(rng() % 7) - 3);
                    H.at(c, r) = H.at(r, c);
                }
            ref.Hq[i] = H;
        }
        CAPTURE(inst);

        Verdict engine = check_soscms(ref);
        if (engine.inconclusive()) continue;
        QMat Jt = ref.J.transpose();

        // Direct per-direction test on a grid: u in the linearized cone,
        // multiplier generators scanned for u^T Q u >= 0.
        bool sampled_fail = false;
        std::vector<QVec> dirs;
        for (int a = -7; a <= 7 && !sampled_fail; ++a)
            for (int b = -7; b <= 7; ++b) {
                if (a == 0 && b == 0) continue;
                dirs.push_back(qv({a, b}));
            }
        if (engine.fails()) dirs.push_back(engine.witness[0]);
        for (const QVec& u : dirs) {
            ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(u));
            for (const auto& piece : nc.pieces) {
                ConvexCone lam = piece;
                for (int i = 0; i < Jt.rows; ++i) lam.add_eq(Jt.row(i));
                ConvexCone::Generators g = lam.generators();
                std::vector<QVec> gens = g.rays;
                for (const auto& l : g.lin) {
                    gens.push_back(l);
                    gens.push_back(vneg(l));
                }
                for (const auto& lhat : gens)
                    if (dot(u, ref.Qmat(lhat).mul(u)) >= 0) {
                        sampled_fail = true;
                        break;
                    }
                if (sampled_fail) break;
            }
            if (sampled_fail) break;
        }
        CHECK(sampled_fail == engine.fails());
    }
}
