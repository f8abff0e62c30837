// Exact-geometry layer: rational LP with certificates, double description,
// polarity, faces, arrangements, and quadratic sign analysis.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stab/arrangement.hpp"
#include "stab/cone.hpp"
#include "stab/linalg.hpp"
#include "stab/lp.hpp"
#include "stab/polyhedron.hpp"
#include "stab/quadratic.hpp"

#include <algorithm>
#include <random>

using namespace stab;

namespace {

QVec qv(std::initializer_list<int> v) {
    QVec r;
    for (int x : v) r.push_back(Rat(x));
    return r;
}

QMat qm(int rows, int cols, std::initializer_list<int> v) {
    QMat m(rows, cols);
    int k = 0;
    for (int x : v) m.a[k++] = Rat(x);
    return m;
}

}  // namespace

TEST_CASE("rational parsing and canonical rays") {
    CHECK(parse_rat("3/4") == Rat(3) / 4);
    CHECK(parse_rat("-7") == Rat(-7));
    CHECK(parse_rat("2.5") == Rat(5) / 2);
    CHECK(parse_rat("-0.125") == Rat(-1) / 8);
    CHECK_THROWS_AS(parse_rat("1/0"), InputError);
    CHECK_THROWS_AS(parse_rat("abc"), InputError);

    QVec v = {Rat(1) / 2, Rat(-3) / 4, Rat(0)};
    QVec c = canonical_ray(v);
    CHECK(c == QVec{Rat(2), Rat(-3), Rat(0)});
    CHECK(positively_proportional(v, c));
    CHECK(!positively_proportional(v, vneg(c)));
}

TEST_CASE("rref, kernel and solve") {
    QMat a = qm(2, 3, {1, 2, 3, 2, 4, 6});
    CHECK(rank(a) == 1);
    auto ker = kernel_basis(a);
    CHECK(ker.size() == 2);
    for (const auto& k : ker) CHECK(is_zero_vec(a.mul(k)));

    QMat b = qm(2, 2, {1, 1, 1, -1});
    QVec x;
    REQUIRE(solve_linear(b, qv({3, 1}), x));
    CHECK(x == qv({2, 1}));
    CHECK(!solve_linear(qm(2, 1, {1, 1}), qv({1, 2}), x));
}

TEST_CASE("lp: optimum with verified duals") {
    // max x1 + x2 s.t. x1 <= 2, x2 <= 3, x1 + x2 <= 4
    std::vector<LinCons> cons = {cons_le(qv({1, 0}), 2), cons_le(qv({0, 1}), 3),
                                 cons_le(qv({1, 1}), 4)};
    auto r = lp_solve(2, cons, qv({1, 1}));
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.value == 4);
    Rat dual_value = r.y[0] * 2 + r.y[1] * 3 + r.y[2] * 4;
    CHECK(dual_value == r.value);
}

TEST_CASE("lp: infeasible system gives the frozen Farkas certificate") {
    // -x <= 0 and x <= -1 cannot hold together; adding the rows refutes.
    std::vector<LinCons> cons = {cons_le(qv({-1}), 0), cons_le(qv({1}), -1)};
    auto r = lp_solve(1, cons, qv({0}));
    REQUIRE(r.status == LPStatus::Infeasible);
    CHECK(verify_farkas(1, cons, r.farkas));
    REQUIRE(r.farkas.size() == 2);
    // Certificate is unique up to scale here: both multipliers equal.
    CHECK(r.farkas[0] == r.farkas[1]);
    CHECK(r.farkas[0] > 0);
}

TEST_CASE("lp: unbounded with improving ray") {
    std::vector<LinCons> cons = {cons_le(qv({-1, 0}), 0)};
    auto r = lp_solve(2, cons, qv({1, 0}));
    REQUIRE(r.status == LPStatus::Unbounded);
    CHECK(dot(r.ray, qv({1, 0})) > 0);
    CHECK(dot(cons[0].a, r.ray) <= 0);
}

TEST_CASE("lp: strict systems via Motzkin gap") {
    // lambda >= 0, lambda1 - lambda2 = 0, lambda1 + lambda2 = 1: feasible.
    std::vector<LinCons> sys1 = {cons_le(qv({-1, 0}), 0), cons_le(qv({0, -1}), 0),
                                 cons_eq(qv({1, -1}), 0), cons_eq(qv({1, 1}), 1)};
    auto f1 = lp_feasible(2, sys1);
    REQUIRE(f1.feasible);
    CHECK(f1.point == QVec{Rat(1) / 2, Rat(1) / 2});

    // x < 0 and -x <= 0: refuted with zero rhs mass on a strict row.
    std::vector<LinCons> sys2 = {cons_lt(qv({1}), 0), cons_le(qv({-1}), 0)};
    auto f2 = lp_feasible(1, sys2);
    REQUIRE(!f2.feasible);
    CHECK(verify_refutation(1, sys2, f2.refutation));

    // Strictly feasible open system.
    std::vector<LinCons> sys3 = {cons_lt(qv({1, 0}), 1), cons_lt(qv({0, 1}), 1)};
    auto f3 = lp_feasible(2, sys3);
    REQUIRE(f3.feasible);
    CHECK(dot(sys3[0].a, f3.point) < 1);
    CHECK(dot(sys3[1].a, f3.point) < 1);
}

TEST_CASE("lp: randomized certificate audit") {
    // Every verdict on a random LE/EQ system must come with a certificate
    // that re-verifies exactly.
    std::mt19937_64 rng(20240817ull);
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<int> dims(1, 4);
    std::uniform_int_distribution<int> nrows(1, 6);
    std::uniform_int_distribution<int> kind(0, 9);
    int infeasible_seen = 0, optimal_seen = 0, unbounded_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = dims(rng), m = nrows(rng);
        std::vector<LinCons> cons;
        for (int i = 0; i < m; ++i) {
            QVec a(n);
            for (auto& x : a) x = coef(rng);
            Rat b = coef(rng);
            cons.push_back(kind(rng) == 0 ? cons_eq(a, b) : cons_le(a, b));
        }
        QVec c(n);
        for (auto& x : c) x = coef(rng);
        auto r = lp_solve(n, cons, c);
        if (r.status == LPStatus::Infeasible) {
            ++infeasible_seen;
            CHECK(verify_farkas(n, cons, r.farkas));
        } else if (r.status == LPStatus::Optimal) {
            ++optimal_seen;
            for (std::size_t i = 0; i < cons.size(); ++i) {
                Rat lhs = dot(cons[i].a, r.x);
                if (cons[i].rel == Rel::EQ)
                    CHECK(lhs == cons[i].b);
                else
                    CHECK(lhs <= cons[i].b);
            }
            // weak duality closed: y^T b equals the optimal value
            Rat dual = 0;
            for (std::size_t i = 0; i < cons.size(); ++i) dual += r.y[i] * cons[i].b;
            CHECK(dual == r.value);
        } else {
            ++unbounded_seen;
            CHECK(dot(c, r.ray) > 0);
            for (const auto& cc : cons) {
                Rat slope = dot(cc.a, r.ray);
                if (cc.rel == Rel::EQ)
                    CHECK(slope == 0);
                else
                    CHECK(slope <= 0);
            }
        }
    }
    // the generator exercises all three outcomes
    CHECK(infeasible_seen > 50);
    CHECK(optimal_seen > 50);
    CHECK(unbounded_seen > 50);
}

TEST_CASE("cone: double description round trip") {
    // x >= 0, y >= 0, x - y = 0 is the ray through (1,1).
    ConvexCone c(2);
    c.add_ineq(qv({-1, 0}));
    c.add_ineq(qv({0, -1}));
    c.add_eq(qv({1, -1}));
    auto g = c.generators();
    REQUIRE(g.rays.size() == 1);
    CHECK(g.lin.empty());
    CHECK(positively_proportional(g.rays[0], qv({1, 1})));

    // Half-plane x <= 0: one lineality direction, one ray.
    ConvexCone h(2);
    h.add_ineq(qv({1, 0}));
    auto gh = h.generators();
    CHECK(gh.lin.size() == 1);
    CHECK(gh.rays.size() == 1);
    CHECK(gh.lin[0][0] == 0);
    CHECK(gh.rays[0][1] == 0);
    CHECK(gh.rays[0][0] < 0);
}

TEST_CASE("cone: polar identities") {
    // Polar of the nonpositive orthant is the nonnegative orthant.
    ConvexCone neg(2);
    neg.add_ineq(qv({1, 0}));
    neg.add_ineq(qv({0, 1}));
    ConvexCone pol = neg.polar();
    CHECK(pol.contains(qv({2, 3})));
    CHECK(!pol.contains(qv({-1, 0})));
    CHECK(pol.polar().set_equal(neg));

    // Polar of a line is its orthogonal complement.
    ConvexCone line(3);
    line.add_eq(qv({0, 1, 0}));
    line.add_eq(qv({0, 0, 1}));
    ConvexCone lp = line.polar();
    CHECK(lp.contains(qv({0, 5, -7})));
    CHECK(!lp.contains(qv({1, 0, 0})));
    CHECK(lp.polar().set_equal(line));
}

TEST_CASE("cone: randomized polar involution and membership duality") {
    std::mt19937_64 rng(771122ull);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> dims(1, 3);
    std::uniform_int_distribution<int> nrows(0, 4);
    std::uniform_int_distribution<int> eqrows(0, 1);
    for (int trial = 0; trial < 60; ++trial) {
        int n = dims(rng);
        ConvexCone c(n);
        int m = nrows(rng), me = eqrows(rng);
        for (int i = 0; i < m; ++i) {
            QVec a(n);
            for (auto& x : a) x = coef(rng);
            if (!is_zero_vec(a)) c.add_ineq(a);
        }
        for (int i = 0; i < me; ++i) {
            QVec a(n);
            for (auto& x : a) x = coef(rng);
            if (!is_zero_vec(a)) c.add_eq(a);
        }
        ConvexCone cc = c.polar().polar();
        CHECK(cc.set_equal(c));
        // every generator of the polar has nonpositive product with every
        // generator of the cone
        auto g = c.generators();
        auto gp = c.polar().generators();
        for (const auto& r : g.rays)
            for (const auto& s : gp.rays) CHECK(dot(r, s) <= 0);
        for (const auto& l : g.lin)
            for (const auto& s : gp.rays) CHECK(dot(l, s) == 0);
    }
}

TEST_CASE("cone: face enumeration covers and separates") {
    // Nonpositive quadrant: faces are interior, two edges, apex.
    ConvexCone c(2);
    c.add_ineq(qv({1, 0}));
    c.add_ineq(qv({0, 1}));
    auto faces = enumerate_faces(c);
    CHECK(faces.size() == 4);
    for (const auto& f : faces) {
        CHECK(c.contains(f.rep));
        for (int r = 0; r < c.G.rows; ++r) {
            bool active = std::find(f.active.begin(), f.active.end(), r) != f.active.end();
            Rat v = dot(c.G.row(r), f.rep);
            if (active)
                CHECK(v == 0);
            else
                CHECK(v < 0);
        }
    }
}

TEST_CASE("polyhedron: vrep of a bounded box and a shifted cone") {
    Polyhedron box(2);
    box.add_ineq(qv({1, 0}), 1);
    box.add_ineq(qv({-1, 0}), 0);
    box.add_ineq(qv({0, 1}), 2);
    box.add_ineq(qv({0, -1}), 0);
    auto v = box.vrep();
    CHECK(v.vertices.size() == 4);
    CHECK(v.rays.empty());
    CHECK(v.lin.empty());

    Polyhedron shifted(2);  // x >= 1, y >= x
    shifted.add_ineq(qv({-1, 0}), -1);
    shifted.add_ineq(qv({1, -1}), 0);
    auto w = shifted.vrep();
    REQUIRE(w.vertices.size() == 1);
    CHECK(w.vertices[0] == qv({1, 1}));
    CHECK(w.rays.size() == 2);
}

TEST_CASE("polyhedron: tangent cones select active rows") {
    Polyhedron p(2);
    p.add_ineq(qv({1, 0}), 1);
    p.add_ineq(qv({0, 1}), 1);
    ConvexCone at_corner = p.tangent_at(qv({1, 1}));
    CHECK(at_corner.G.rows == 2);
    ConvexCone at_edge = p.tangent_at(qv({1, 0}));
    CHECK(at_edge.G.rows == 1);
    ConvexCone inside = p.tangent_at(qv({0, 0}));
    CHECK(inside.G.rows == 0);
    CHECK_THROWS_AS(p.active_rows(qv({2, 0})), NotInSetError);
}

TEST_CASE("arrangement: quadrant cells of the plane over one full piece") {
    // Pieces: whole plane restricted by hyperplanes x and y.
    std::vector<ConvexCone> pieces = {ConvexCone::everything(2)};
    auto arr = arrangement_cells(2, {qv({1, 0}), qv({0, 1})}, pieces, false);
    CHECK(arr.cells.size() == 9);  // 3^2 sign vectors, all realizable
    int zero_cells = 0;
    for (const auto& cell : arr.cells) {
        if (cell.sig.all_zero()) {
            ++zero_cells;
            CHECK(is_zero_vec(cell.rep));
        }
        // representative realizes its signature strictly
        for (std::size_t h = 0; h < arr.hyps.size(); ++h) {
            Rat v = dot(arr.hyps[h], cell.rep);
            int8_t s = cell.sig.s[h];
            CHECK((s == 0 ? v == 0 : (s > 0 ? v > 0 : v < 0)));
        }
        CHECK(cell.closure.contains(cell.rep));
    }
    CHECK(zero_cells == 1);
}

TEST_CASE("arrangement: restriction to a union piece prunes signatures") {
    // K = nonpositive quadrant; only 4 cells survive.
    ConvexCone k(2);
    k.add_ineq(qv({1, 0}));
    k.add_ineq(qv({0, 1}));
    auto arr = arrangement_cells(2, {}, {k}, false);
    CHECK(arr.cells.size() == 4);
    for (const auto& cell : arr.cells)
        for (std::size_t h = 0; h < arr.hyps.size(); ++h) CHECK(cell.sig.s[h] <= 0);
}

TEST_CASE("arrangement: zero refinement splits a kernel line") {
    // Single hyperplane x + y = 0 in the plane: the 0-cell is a line, and
    // with refinement it is split away from the origin.
    std::vector<ConvexCone> pieces = {ConvexCone::everything(2)};
    auto plain = arrangement_cells(2, {qv({1, 1})}, pieces, false);
    bool has_zero_sig = false;
    for (const auto& cell : plain.cells) has_zero_sig |= cell.sig.all_zero();
    CHECK(has_zero_sig);

    auto refined = arrangement_cells(2, {qv({1, 1})}, pieces, true);
    for (const auto& cell : refined.cells) {
        CHECK(!is_zero_vec(cell.rep));
        // closures may contain the origin, the cells themselves never do
    }
}

TEST_CASE("quadratic: definite, indefinite and semidefinite forms on cones") {
    ConvexCone plane = ConvexCone::everything(2);

    QMat ident = qm(2, 2, {1, 0, 0, 1});
    auto pos = max_quadratic_on_cone(ident, plane, 1e-9);
    CHECK(pos.sign == QSign::Positive);
    CHECK(pos.exact);

    QMat negid = qm(2, 2, {-1, 0, 0, -1});
    auto neg = max_quadratic_on_cone(negid, plane, 1e-9);
    CHECK(neg.sign == QSign::Negative);

    QMat saddle = qm(2, 2, {1, 0, 0, -1});
    auto sad = max_quadratic_on_cone(saddle, plane, 1e-9);
    CHECK(sad.sign == QSign::Positive);
    CHECK(sad.exact);

    // Same saddle restricted to the cone x = 0 is negative.
    ConvexCone axis(2);
    axis.add_eq(qv({1, 0}));
    auto sad_axis = max_quadratic_on_cone(saddle, axis, 1e-9);
    CHECK(sad_axis.sign == QSign::Negative);

    // x^2 restricted to x = 0 vanishes identically.
    QMat xsq = qm(2, 2, {1, 0, 0, 0});
    auto vanish = max_quadratic_on_cone(xsq, axis, 1e-9);
    CHECK(vanish.sign == QSign::Zero);
    CHECK(vanish.exact);

    // -(xy) on the nonnegative quadrant: max 0 attained on the axes.
    ConvexCone quad(2);
    quad.add_ineq(qv({-1, 0}));
    quad.add_ineq(qv({0, -1}));
    QMat mxy = qm(2, 2, {0, -1, -1, 0});
    auto pinched = max_quadratic_on_cone(mat_scale(Rat(1) / 2, mat_add(mxy, mxy.transpose())),
                                         quad, 1e-9);
    CHECK(pinched.sign == QSign::Zero);
    CHECK(pinched.exact);
}

TEST_CASE("quadratic: positive witness is exact on a one-dimensional cone") {
    ConvexCone ray(2);
    ray.add_eq(qv({1, -1}));
    ray.add_ineq(qv({-1, 0}));
    // Form is positive along (1,1).
    QMat q = qm(2, 2, {0, 1, 1, 0});
    auto r = max_quadratic_on_cone(q, ray, 1e-9);
    CHECK(r.sign == QSign::Positive);
    CHECK(r.exact);
    REQUIRE(!r.witness.empty());
    CHECK(ray.contains(r.witness));
}

TEST_CASE("quadratic: randomized soundness against dense sampling") {
    std::mt19937_64 rng(5150ull);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + (int)(rng() % 2);
        QMat q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                q.at(i, j) = coef(rng);
                q.at(j, i) = q.at(i, j);
            }
        ConvexCone c(n);
        int rows = 1 + (int)(rng() % 2);
        for (int r = 0; r < rows; ++r) {
            QVec a(n);
            for (auto& x : a) x = coef(rng);
            if (!is_zero_vec(a)) c.add_ineq(a);
        }
        auto res = max_quadratic_on_cone(q, c, 1e-9);
        // sample a grid of integer directions inside the cone
        Rat best_sample = 0;
        bool any = false;
        std::uniform_int_distribution<int> pt(-4, 4);
        for (int s = 0; s < 300; ++s) {
            QVec z(n);
            for (auto& x : z) x = pt(rng);
            if (is_zero_vec(z) || !c.contains(z)) continue;
            any = true;
            Rat val = dot(z, q.mul(z));
            if (val > best_sample) best_sample = val;
        }
        if (!any) continue;
        if (res.sign == QSign::Negative) CHECK(best_sample <= 0);
        if (res.sign == QSign::Zero) CHECK(best_sample <= 0);
    }
}
