// Stability layer: stationarity verdicts, critical-multiplier sets, the
// second-order sufficiency test, and the perturbation-system certificates on
// the worked fixtures; exactness of every failure witness; agreement of the
// pair-structured path with the general path; the classical criterion for
// inequality/equality systems.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stab/cones_ops.hpp"
#include "stab/stability.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

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

Rat qform(const QMat& M, const QVec& u) { return dot(u, M.mul(u)); }

// Re-verify a first-order certificate witness {u, lambda, mu} against the
// defining system, independently of the engine's own verification.
void require_first_order_witness(const ReferenceData& ref, const Verdict& v) {
    REQUIRE(v.fails());
    REQUIRE(v.witness.size() >= 3);
    const QVec& u = v.witness[0];
    const QVec& lam = v.witness[1];
    const QVec& mu = v.witness[2];
    CHECK(!is_zero_vec(u));
    CHECK(lin_cone(ref).contains(u));
    ConeUnion nc = dir_limiting_normal_cone(ref.P, ref.qbar, ref.J.mul(u));
    CHECK(nc.contains(lam));
    CHECK(is_zero_vec(vadd(ref.grad_f, ref.J.transpose().mul(lam))));
    CHECK(tangent_to_cone_union(nc, lam).contains(mu));
    CHECK(is_zero_vec(
        vadd(vadd(ref.Hf.mul(u), ref.Qmat(lam).mul(u)), ref.J.transpose().mul(mu))));
}

}  // namespace

TEST_CASE("stationarity verdicts on the worked fixtures") {
    ReferenceData a = load_ref("ex51");
    Verdict am = check_m_stationary(a);
    REQUIRE(am.holds());
    REQUIRE(am.witness.size() == 1);
    CHECK(limiting_normal_cone(a.P, a.qbar).contains(am.witness[0]));
    CHECK(is_zero_vec(vadd(a.grad_f, a.J.transpose().mul(am.witness[0]))));
    CHECK(check_b_stationary_linearized(a).holds());

    ReferenceData b = load_ref("exB");
    Verdict bm = check_m_stationary(b);
    REQUIRE(bm.holds());
    CHECK(bm.witness[0] == qv({-1, 0}));  // forced by the stationarity rows
    Verdict bb = check_b_stationary_linearized(b);
    REQUIRE(bb.fails());
    REQUIRE(bb.witness.size() == 1);
    CHECK(bb.witness[0][1] == 0);
    CHECK(bb.witness[0][0] > 0);
    CHECK(dot(b.grad_f, bb.witness[0]) < 0);
    CHECK(lin_cone(b).contains(bb.witness[0]));

    ReferenceData c = load_ref("exC");
    CHECK(check_m_stationary(c).holds());
    CHECK(check_b_stationary_linearized(c).holds());

    ReferenceData d = load_ref("ex55");
    Verdict dm = check_m_stationary(d);
    REQUIRE(dm.holds());
    CHECK(dm.witness[0] == qv({1, 0, 0}));
    CHECK(check_b_stationary_linearized(d).holds());
}

TEST_CASE("critical cone, cells, and multiplier sets") {
    ReferenceData a = load_ref("ex51");
    CHECK(critical_cells(a).empty());
    CHECK(!critical_cone(a).nontrivial());

    ReferenceData c = load_ref("exC");
    std::vector<SignedCell> cc = critical_cells(c);
    REQUIRE(cc.size() == 2);  // the two halves of the horizontal line
    for (const auto& cell : cc) {
        MultiplierSet ls = lambda1_set(c, cell.sig);
        REQUIRE(!ls.empty());
        CHECK(ls.contains(qv({0, 0})));
        CHECK(ls.contains(qv({1, 1})));
        CHECK(ls.contains(qv({3, 3})));
        CHECK(!ls.contains(qv({1, 2})));
        CHECK(!ls.contains(qv({-1, -1})));
    }

    ReferenceData d = load_ref("ex55");
    std::vector<SignedCell> dc = critical_cells(d);
    REQUIRE(dc.size() == 2);
    MultiplierSet expected;
    expected.dim = 3;
    {
        Polyhedron point(3);
        point.add_eq(qv({1, 0, 0}), Rat(1));
        point.add_eq(qv({0, 1, 0}), Rat(0));
        point.add_eq(qv({0, 0, 1}), Rat(0));
        MultiplierSet::Piece p;
        p.poly = point;
        expected.pieces.push_back(p);
    }
    for (const auto& cell : dc) {
        MultiplierSet ls = lambda1_set(d, cell.sig);
        CHECK(ls.set_equal(expected));
        CHECK(ls.contains(qv({1, 0, 0})));
    }

    CellSignature bogus;
    bogus.s = {1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(lambda1_set(d, bogus), InputError);
}

TEST_CASE("second-order sufficiency over the critical multipliers") {
    Verdict va = check_rsssoc(load_ref("ex51"));
    CHECK(va.holds());
    CHECK(va.route == "critical-cone-trivial");

    ReferenceData b = load_ref("exB");
    Verdict vb = check_rsssoc(b);
    REQUIRE(vb.fails());
    REQUIRE(vb.witness.size() == 2);
    {
        const QVec& u = vb.witness[0];
        const QVec& lam = vb.witness[1];
        CHECK(u[0] == 0);
        CHECK(u[1] > 0);
        CHECK(lam == qv({-1, 0}));
        CHECK(qform(mat_add(b.Hf, b.Qmat(lam)), u) <= 0);
        CHECK(dir_limiting_normal_cone(b.P, b.qbar, b.J.mul(u)).contains(lam));
        CHECK(is_zero_vec(vadd(b.grad_f, b.J.transpose().mul(lam))));
    }

    ReferenceData c = load_ref("exC");
    Verdict vc = check_rsssoc(c);
    REQUIRE(vc.fails());
    REQUIRE(vc.witness.size() == 2);
    {
        const QVec& u = vc.witness[0];
        const QVec& lam = vc.witness[1];
        CHECK(u[1] == 0);
        CHECK(u[0] != 0);
        CHECK(lam[0] == lam[1]);  // the multiplier ray is the diagonal
        CHECK(lam[0] >= 0);
        CHECK(qform(mat_add(c.Hf, c.Qmat(lam)), u) <= 0);
        CHECK(dir_limiting_normal_cone(c.P, c.qbar, c.J.mul(u)).contains(lam));
        CHECK(is_zero_vec(vadd(c.grad_f, c.J.transpose().mul(lam))));
    }

    CHECK(check_rsssoc(load_ref("ex55")).holds());
}

TEST_CASE("first-order perturbation-system certificate") {
    Verdict va = check_lipschitz_certificate(load_ref("ex51"));
    CHECK(va.holds());
    CHECK(va.route == "lipschitz-system-exact");
    CHECK(va.reason.find("no curvature data") != std::string::npos);

    Verdict vb = check_lipschitz_certificate(load_ref("exB"));
    CHECK(vb.holds());
    CHECK(vb.route == "lipschitz-system-exact");
    CHECK(vb.reason.find("no curvature data") != std::string::npos);

    ReferenceData c = load_ref("exC");
    Verdict vc = check_lipschitz_certificate(c);
    require_first_order_witness(c, vc);
    REQUIRE(vc.witness.size() == 3);
    CHECK(vc.witness[0][1] == 0);  // direction on the horizontal line
    CHECK(vc.witness[0][0] != 0);
    CHECK(vc.witness[1] == qv({1, 1}));  // multiplier forced by the curvature
    CHECK(vc.witness[2][0] == vc.witness[2][1]);

    Verdict vd = check_lipschitz_certificate(load_ref("ex55"));
    CHECK(vd.holds());
    CHECK(vd.route == "lipschitz-system-exact");
    CHECK(vd.reason.find("no curvature data") == std::string::npos);
}

TEST_CASE("second-order perturbation-system certificate") {
    CHECK(check_hoelder_certificate(load_ref("ex51")).holds());
    CHECK(check_hoelder_certificate(load_ref("exB")).holds());
    Verdict vc = check_hoelder_certificate(load_ref("exC"));
    CHECK(vc.holds());
    CHECK(vc.route == "hoelder-system-exact");

    // Degenerate objective over a curved inequality: every nearby feasible
    // point is stationary, and even the order-2 system is solvable.
    DisjunctiveSet P;
    P.add(Block::nonpos(1));
    ReferenceData r = mk_ref(2, P, qm({{0, 1}}));
    r.Hq[0] = qm({{2, 0}, {0, 0}});
    r.validate();
    Verdict vf = check_hoelder_certificate(r);
    REQUIRE(vf.fails());
    REQUIRE(vf.witness.size() == 4);
    require_first_order_witness(r, vf);
    {
        const QVec& u = vf.witness[0];
        const QVec& lam = vf.witness[1];
        const QVec& v = vf.witness[3];
        QVec c(static_cast<std::size_t>(r.m), Rat(0));
        for (int i = 0; i < r.m; ++i) c[i] = qform(r.Hq[i], u);
        QVec w = vadd(r.J.mul(v), c);
        QVec d = r.J.mul(u);
        bool covered = false;
        for (const auto& piece : tangent_cone(r.P, r.qbar).pieces)
            if (piece.contains(d) && piece.contains(w)) covered = true;
        CHECK(covered);
        CHECK(dot(lam, c) == dot(r.grad_f, v));
    }
    CHECK(check_lipschitz_certificate(r).fails());
}

TEST_CASE("combined stability report and theorem routes") {
    GrowthAttestation none;
    GrowthAttestation verified;
    verified.source = GrowthAttestation::Source::HarnessVerified;
    verified.eta = 0.4;
    verified.radius = 0.5;
    verified.grid = 41 * 41;

    ReferenceData a = load_ref("ex51");
    StabilityReport ra = check_stab_via_thm2(a, verified);
    CHECK(ra.m_stationary.holds());
    CHECK(ra.b_stationary.holds());
    CHECK(ra.rsssoc.holds());
    CHECK(ra.lipschitz_cert.holds());
    CHECK(ra.lipschitz_cert.route == "foscms+rsssoc");
    CHECK(ra.hoelder_cert.holds());
    CHECK(ra.hoelder_cert.route == "soscms+growth");
    CHECK(ra.existence_flag);
    StabilityReport ra0 = check_stab_via_thm2(a, none);
    CHECK(ra0.lipschitz_cert.holds());
    CHECK(!ra0.existence_flag);
    CHECK(ra0.existence_reason.find("no growth") != std::string::npos);

    ReferenceData c = load_ref("exC");
    StabilityReport rc = check_stab_via_thm2(c, verified);
    CHECK(rc.rsssoc.fails());
    CHECK(rc.lipschitz_cert.fails());
    CHECK(rc.hoelder_cert.holds());
    CHECK(rc.hoelder_cert.route == "soscms+growth");
    CHECK(rc.existence_flag);
    StabilityReport rc0 = check_stab_via_thm2(c, none);
    CHECK(rc0.hoelder_cert.holds());
    CHECK(rc0.hoelder_cert.route == "hoelder-system-exact");

    ReferenceData b = load_ref("exB");
    StabilityReport rb = check_stab_via_thm2(b, none);
    CHECK(rb.b_stationary.fails());
    CHECK(rb.m_stationary.holds());
    CHECK(rb.lipschitz_cert.holds());
    CHECK(rb.hoelder_cert.holds());
    CHECK(rb.hoelder_cert.route == "implied-by-lipschitz");

    ReferenceData d = load_ref("ex55");
    StabilityReport rd = check_stab_via_thm2(d, none);
    CHECK(rd.lipschitz_cert.holds());
    CHECK(rd.lipschitz_cert.route == "foscms+rsssoc");
    CHECK(rd.hoelder_cert.holds());
    CHECK(rd.hoelder_cert.route == "implied-by-lipschitz");

    // attesting growth can only upgrade verdicts, never flip them
    for (const char* stem : {"ex51", "exB", "exC", "ex55"}) {
        CAPTURE(stem);
        ReferenceData ref = load_ref(stem);
        StabilityReport plain = check_stab_via_thm2(ref, none);
        StabilityReport att = check_stab_via_thm2(ref, verified);
        if (plain.lipschitz_cert.holds()) CHECK(att.lipschitz_cert.holds());
        if (plain.hoelder_cert.holds()) CHECK(att.hoelder_cert.holds());
    }
}

TEST_CASE("complementarity layout and index sets") {
    ReferenceData a = load_ref("ex51");
    MpecLayout la = mpec_layout(a);
    CHECK(la.n_ineq == 2);
    CHECK(la.n_eq == 0);
    CHECK(la.n_pairs == 1);
    CHECK(la.pair_row(0, 1) == 3);
    MpecActivity at = mpec_index_sets(a);
    CHECK(at.ineq_active == std::vector<int>{0, 1});
    CHECK(at.biactive == std::vector<int>{0});
    CHECK(at.first_branch.empty());
    CHECK(at.second_branch.empty());
    MpecActivity dir = mpec_index_sets_dir(a, qv({0, 1}));
    CHECK(dir.ineq_active.empty());
    CHECK(dir.second_branch == std::vector<int>{0});
    CHECK(dir.biactive.empty());

    ReferenceData d = load_ref("ex55");
    MpecLayout ld = mpec_layout(d);
    CHECK(ld.n_ineq == 1);
    CHECK(ld.n_eq == 0);
    CHECK(ld.n_pairs == 1);
    MpecActivity dd = mpec_index_sets_dir(d, qv({1, 0, 0}));
    CHECK(dd.ineq_active == std::vector<int>{0});
    CHECK(dd.biactive == std::vector<int>{0});
    MpecActivity de = mpec_index_sets_dir(d, qv({0, 1, 0}));
    CHECK(de.ineq_active.empty());
    CHECK(de.first_branch == std::vector<int>{0});
    CHECK_THROWS_AS(mpec_index_sets_dir(d, qv({0, -1, 0})), InputError);

    DisjunctiveSet bad;
    bad.add(Block::ec());
    bad.add(Block::nonpos(1));
    ReferenceData rbad = mk_ref(1, std::move(bad), qm({{1}, {1}, {1}}));
    CHECK_THROWS_AS(mpec_layout(rbad), InputError);

    DisjunctiveSet fr;
    fr.add(Block::free_block(1));
    ReferenceData rfree = mk_ref(1, std::move(fr), qm({{1}}));
    CHECK_THROWS_AS(mpec_layout(rfree), InputError);
}

TEST_CASE("multiplier set over the branch patterns") {
    ReferenceData a = load_ref("ex51");
    MultiplierSet ms = mpec_multiplier_set(a);
    REQUIRE(ms.pieces.size() == 2);
    CHECK(ms.contains(qv({2, 0, 0, -1})));
    CHECK(ms.contains(qv({2, 3, 0, -4})));
    CHECK(ms.contains(qv({0, 1, -2, 0})));
    CHECK(ms.contains(qv({1, 0, -1, 0})));
    CHECK(!ms.contains(qv({1, 1, -1, 0})));
    std::set<std::vector<int8_t>> tags;
    for (const auto& p : ms.pieces) tags.insert(p.tag.s);
    CHECK(tags.count(std::vector<int8_t>{-1}) == 1);
    CHECK(tags.count(std::vector<int8_t>{1}) == 1);

    // the exact set: a ray where the first pair component is pinned, and a
    // segment where the second one is
    MultiplierSet expected;
    expected.dim = 4;
    {
        Polyhedron ray(4);
        ray.add_eq(qv({1, 0, 0, 0}), Rat(2));
        ray.add_eq(qv({0, 0, 1, 0}), Rat(0));
        ray.add_eq(qv({0, 1, 0, 1}), Rat(-1));
        ray.add_ineq(qv({0, -1, 0, 0}), Rat(0));
        MultiplierSet::Piece p;
        p.poly = ray;
        expected.pieces.push_back(p);
        Polyhedron seg(4);
        seg.add_eq(qv({0, 0, 0, 1}), Rat(0));
        seg.add_eq(qv({1, 0, -1, 0}), Rat(2));
        seg.add_eq(qv({1, 1, 0, 0}), Rat(1));
        seg.add_ineq(qv({-1, 0, 0, 0}), Rat(0));
        seg.add_ineq(qv({0, -1, 0, 0}), Rat(0));
        MultiplierSet::Piece q;
        q.poly = seg;
        expected.pieces.push_back(q);
    }
    CHECK(ms.set_equal(expected));

    // collapsing the segment to its endpoint yields a strict subset
    MultiplierSet display;
    display.dim = 4;
    {
        Polyhedron pt(4);
        pt.add_eq(qv({1, 0, 0, 0}), Rat(0));
        pt.add_eq(qv({0, 1, 0, 0}), Rat(1));
        pt.add_eq(qv({0, 0, 1, 0}), Rat(-2));
        pt.add_eq(qv({0, 0, 0, 1}), Rat(0));
        MultiplierSet::Piece p;
        p.poly = pt;
        display.pieces.push_back(p);
        display.pieces.push_back(expected.pieces[0]);
    }
    CHECK(display.subset_of(ms));
    CHECK(!ms.subset_of(display));
    CHECK(!ms.set_equal(display));

    ReferenceData b = load_ref("exB");
    MultiplierSet mb = mpec_multiplier_set(b);
    REQUIRE(mb.pieces.size() == 1);
    CHECK(mb.pieces[0].tag.s == std::vector<int8_t>{1});
    CHECK(mb.contains(qv({-1, 0})));
    CHECK(!mb.contains(qv({0, 0})));
    CHECK_THROWS_AS(ms.subset_of(mb), InputError);
}

TEST_CASE("pair-structured certificates agree with the general path") {
    for (const char* stem : {"ex51", "exB", "ex55", "exC"}) {
        CAPTURE(stem);
        ReferenceData ref = load_ref(stem);
        MpecCertificates mc = check_mpec_certificates(ref);
        Verdict gl = check_lipschitz_certificate(ref);
        Verdict gh = check_hoelder_certificate(ref);
        CHECK(mc.lipschitz.value == gl.value);
        CHECK(mc.hoelder.value == gh.value);
    }
}

TEST_CASE("random pair instances: the two paths agree") {
    std::mt19937_64 rng(46464646ull);
    int zero_hessian_inconclusive = 0;
    for (int inst = 0; inst < 24; ++inst) {
        const int n = 2;
        const bool with_ineq = (rng() % 2) == 0;
        const int m = (with_ineq ? 1 : 0) + 2;
        DisjunctiveSet P;
        if (with_ineq) P.add(Block::nonpos(1));
        P.add(Block::ec());
        QMat J(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) J.at(i, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ReferenceData ref = mk_ref(n, std::move(P), J);
        const bool curved = inst >= 12;
        if (curved) {
            const int row = static_cast<int>(rng() % m);
            const int dpos = static_cast<int>(rng() % n);
            const int sign = (rng() % 2) ? 1 : -1;
            ref.Hq[row].at(dpos, dpos) = Rat(2 * sign);
        }
        if (rng() % 2)
            for (int j = 0; j < n; ++j) ref.grad_f[j] = Rat(static_cast<int>(rng() % 3) - 1);
        for (int j = 0; j < n; ++j) ref.Hf.at(j, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ref.validate();
        CAPTURE(inst);
        MpecCertificates mc = check_mpec_certificates(ref);
        Verdict gl = check_lipschitz_certificate(ref);
        Verdict gh = check_hoelder_certificate(ref);
        if (!curved) {
            // no curvature data: every cell is decided exactly
            CHECK(!gl.inconclusive());
            CHECK(!gh.inconclusive());
            CHECK(!mc.lipschitz.inconclusive());
            CHECK(!mc.hoelder.inconclusive());
            if (gl.inconclusive() || mc.lipschitz.inconclusive()) ++zero_hessian_inconclusive;
        }
        if (!gl.inconclusive() && !mc.lipschitz.inconclusive())
            CHECK(gl.value == mc.lipschitz.value);
        if (!gh.inconclusive() && !mc.hoelder.inconclusive())
            CHECK(gh.value == mc.hoelder.value);
    }
    CHECK(zero_hessian_inconclusive == 0);
}

TEST_CASE("inequality-system criterion") {
    // strict complementarity at the unique multiplier: only u = 0 remains
    DisjunctiveSet P;
    P.add(Block::nonpos(2));
    ReferenceData r = mk_ref(2, std::move(P), qm({{1, 0}, {0, 1}}));
    r.grad_f = qv({-1, -1});
    r.Hf = qm({{1, 0}, {0, 1}});
    r.validate();
    CHECK(check_nlp_klatte_kummer(r).holds());

    Verdict nc = check_nlp_klatte_kummer(load_ref("exC"));
    CHECK(nc.inconclusive());
    CHECK(nc.reason.find("not applicable") != std::string::npos);

    CHECK_THROWS_AS(check_nlp_klatte_kummer(load_ref("ex51")), InputError);

    // degenerate objective: the feasible set itself is stationary
    DisjunctiveSet P1;
    P1.add(Block::nonpos(1));
    ReferenceData flat = mk_ref(2, std::move(P1), qm({{0, 1}}));
    Verdict vf = check_nlp_klatte_kummer(flat);
    REQUIRE(vf.fails());
    REQUIRE(vf.witness.size() == 4);
    CHECK(!is_zero_vec(vf.witness[1]));
    CHECK(check_lipschitz_certificate(flat).fails());
}

TEST_CASE("inequality-system criterion agrees with the general certificate") {
    std::mt19937_64 rng(58585858ull);
    int compared = 0;
    int gap = 0;
    for (int inst = 0; inst < 40 && compared < 12; ++inst) {
        const int n = 2, m = 2;
        DisjunctiveSet P;
        P.add(Block::nonpos(m));
        QMat J(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) J.at(i, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ReferenceData ref = mk_ref(n, std::move(P), J);
        for (int j = 0; j < n; ++j) ref.grad_f[j] = Rat(static_cast<int>(rng() % 3) - 1);
        for (int j = 0; j < n; ++j) ref.Hf.at(j, j) = Rat(static_cast<int>(rng() % 5) - 2);
        ref.validate();
        if (!check_metric_regularity(ref).holds()) continue;
        Verdict kk = check_nlp_klatte_kummer(ref);
        if (kk.inconclusive()) continue;
        Verdict gl = check_lipschitz_certificate(ref);
        REQUIRE(!gl.inconclusive());
        CAPTURE(inst);
        // a violation found at an enumerated multiplier is always genuine
        if (kk.fails()) CHECK(gl.fails());
        if (kk.holds() && gl.fails()) ++gap;
        ++compared;
    }
    CHECK(compared >= 6);
    CHECK(gap == 0);
}
