// Numerical search and study machinery on top of the exact layer.
//
// Stationary-point candidates come from two mechanisms. Active-pattern
// Newton solves the branch KKT equations for every activity pattern, with a
// complete orthogonal decomposition so rank-deficient patterns (degenerate
// multipliers) still converge. That misses feasible isolated points carrying
// no multiplier at all, so a second pass scans one-dimensional faces: when
// the affine rows of a candidate active set pin all but one degree of
// freedom, the remaining rows are scalar functions of the line parameter and
// their roots can be located by a dense scan plus bisection or ternary
// polish. Classification of every surviving point happens on a rationalized
// snapshot of the local derivative data with activities snapped, so the
// M-/B-stationarity flags are exact statements about a problem within
// snap_tol of the numeric point.

#include "stab/harness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stab/cones_ops.hpp"
#include "stab/cq.hpp"
#include "stab/lp.hpp"

namespace stab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

double halton(unsigned long long i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (double)(i % base);
        i /= base;
    }
    return r;
}

const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17};

// Low-discrepancy directions on the unit sphere (rejection from the cube).
std::vector<std::vector<double>> sphere_dirs(int n, int count) {
    std::vector<std::vector<double>> out;
    if (n == 1) {
        for (int k = 0; k < count; ++k) out.push_back({k % 2 == 0 ? 1.0 : -1.0});
        return out;
    }
    unsigned long long j = 1;
    while ((int)out.size() < count && j < 100000ull * (unsigned)count) {
        std::vector<double> u(n);
        double s = 0;
        for (int d = 0; d < n; ++d) {
            u[d] = 2.0 * halton(j, kPrimes[d]) - 1.0;
            s += u[d] * u[d];
        }
        ++j;
        if (s > 1.0 || s < 1e-12) continue;
        double inv = 1.0 / std::sqrt(s);
        for (double& x : u) x *= inv;
        out.push_back(std::move(u));
    }
    return out;
}

std::string poly_key(const Polyhedron& p) {
    std::vector<std::string> rows;
    for (int r = 0; r < p.A.rows; ++r) {
        std::string s = p.eq[r] ? "E" : "L";
        for (int j = 0; j < p.A.cols; ++j) s += " " + rat_str(p.A.at(r, j));
        s += " | " + rat_str(p.b[(std::size_t)r]);
        rows.push_back(std::move(s));
    }
    std::sort(rows.begin(), rows.end());
    std::string key;
    for (auto& s : rows) key += s + "\n";
    return key;
}

}  // namespace

std::vector<Branch> enumerate_branches(const DisjunctiveSet& P) {
    auto fl = P.flatten();
    std::vector<Branch> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < fl.pieces.size(); ++i) {
        if (!seen.insert(poly_key(fl.pieces[i])).second) continue;
        out.push_back(Branch{fl.choices[i], fl.pieces[i]});
    }
    return out;
}

namespace {

// Minimum-norm solution of M z = c anchored at y: z = y + M^+ (c - M y).
Eigen::VectorXd affine_project(const Eigen::MatrixXd& M, const Eigen::VectorXd& c,
                               const Eigen::VectorXd& y) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    return y + cod.solve(c - M * y);
}

}  // namespace

double distance_to_polyhedron(const Polyhedron& piece, const std::vector<double>& y) {
    const int n = piece.dim;
    if ((int)y.size() != n) throw InputError("distance_to_polyhedron: dimension mismatch");
    const int rows = piece.A.rows;
    std::vector<int> eqs, ineqs;
    for (int r = 0; r < rows; ++r) (piece.eq[(std::size_t)r] ? eqs : ineqs).push_back(r);
    if ((int)ineqs.size() > 16)
        throw InputError("distance_to_polyhedron: too many inequality rows");

    Eigen::MatrixXd A(rows, n);
    Eigen::VectorXd b(rows), yv(n);
    for (int r = 0; r < rows; ++r) {
        for (int j = 0; j < n; ++j) A(r, j) = to_double(piece.A.at(r, j));
        b(r) = to_double(piece.b[(std::size_t)r]);
    }
    for (int j = 0; j < n; ++j) yv(j) = y[(std::size_t)j];

    auto feasible = [&](const Eigen::VectorXd& z) {
        for (int r = 0; r < rows; ++r) {
            double v = A.row(r) * z - b(r);
            double tol = 1e-9 * (1.0 + std::fabs(b(r)) + z.cwiseAbs().sum());
            if (piece.eq[(std::size_t)r] ? std::fabs(v) > tol : v > tol) return false;
        }
        return true;
    };

    double best = kInf;
    const int ni = (int)ineqs.size();
    // Every candidate active set: the equality rows plus a subset of
    // inequality rows. The true projection appears among the feasible
    // affine projections, so the minimum is exact up to roundoff.
    for (unsigned mask = 0; mask < (1u << ni); ++mask) {
        std::vector<int> act = eqs;
        for (int k = 0; k < ni; ++k)
            if (mask & (1u << k)) act.push_back(ineqs[(std::size_t)k]);
        if ((int)act.size() > n + (int)eqs.size()) continue;
        Eigen::VectorXd z;
        if (act.empty()) {
            z = yv;
        } else {
            Eigen::MatrixXd M((int)act.size(), n);
            Eigen::VectorXd c((int)act.size());
            for (std::size_t i = 0; i < act.size(); ++i) {
                M.row((int)i) = A.row(act[i]);
                c((int)i) = b(act[i]);
            }
            z = affine_project(M, c, yv);
        }
        if (!z.allFinite() || !feasible(z)) continue;
        best = std::min(best, (z - yv).norm());
    }
    return best;
}

double distance_to_set(const DisjunctiveSet& P, const std::vector<double>& y) {
    auto fl = P.flatten();
    double best = kInf;
    for (const auto& piece : fl.pieces) best = std::min(best, distance_to_polyhedron(piece, y));
    return best;
}

namespace {

// ---- branch-local search ----------------------------------------------

enum class Obj { F, Proj };

struct BranchData {
    int n = 0;
    Eigen::MatrixXd A;  // rows x m, coefficients over q-space
    Eigen::VectorXd b;
    std::vector<bool> eq;
};

BranchData branch_data(const Branch& br, int n) {
    BranchData bd;
    bd.n = n;
    bd.A.resize(br.region.A.rows, br.region.A.cols);
    bd.b.resize(br.region.A.rows);
    bd.eq = br.region.eq;
    for (int r = 0; r < br.region.A.rows; ++r) {
        for (int j = 0; j < br.region.A.cols; ++j) bd.A(r, j) = to_double(br.region.A.at(r, j));
        bd.b(r) = to_double(br.region.b[(std::size_t)r]);
    }
    return bd;
}

struct RowEval {
    Eigen::VectorXd v;   // row values A q(x) - b
    Eigen::MatrixXd g;   // rows x n gradients
    std::vector<Eigen::MatrixXd> h;  // per-row Hessians
    double f = 0;
    Eigen::VectorXd gf;
    Eigen::MatrixXd hf;
};

RowEval eval_rows(const ParamProblem& p, const BranchData& bd, const std::vector<double>& x,
                  const std::vector<double>& w, bool need_hess) {
    QFEval ev = eval_qf(p, x, w);
    const int n = bd.n, m = (int)ev.q.size(), rows = (int)bd.A.rows();
    RowEval re;
    re.v.resize(rows);
    re.g.setZero(rows, n);
    re.f = ev.f;
    re.gf.resize(n);
    for (int j = 0; j < n; ++j) re.gf(j) = ev.gf[(std::size_t)j];
    re.hf.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) re.hf(i, j) = ev.hf[(std::size_t)(i * n + j)];
    if (need_hess) re.h.assign((std::size_t)rows, Eigen::MatrixXd::Zero(n, n));
    for (int r = 0; r < rows; ++r) {
        double val = -bd.b(r);
        for (int i = 0; i < m; ++i) {
            double a = bd.A(r, i);
            if (a == 0) continue;
            val += a * ev.q[(std::size_t)i];
            for (int j = 0; j < n; ++j) re.g(r, j) += a * ev.gq[(std::size_t)i][(std::size_t)j];
            if (need_hess)
                for (int jj = 0; jj < n * n; ++jj)
                    re.h[(std::size_t)r](jj / n, jj % n) += a * ev.hq[(std::size_t)i][(std::size_t)jj];
        }
        re.v(r) = val;
    }
    return re;
}

struct Candidate {
    std::vector<double> x;
    int branch = 0;
    double residual = 0;
    bool kkt = false;  // Newton-accepted with admissible multiplier signs
};

// Damped Newton on the active-pattern system
//   grad obj(x) + sum_r nu_r grad v_r(x) = 0,  v_r(x) = 0 for r in pattern.
struct PatternSolve {
    Eigen::VectorXd x;
    Eigen::VectorXd nu;
    double res = kInf;
};

PatternSolve solve_pattern_w(const ParamProblem& p, const BranchData& bd,
                             const std::vector<double>& w, const std::vector<int>& pat,
                             Obj obj, const Eigen::VectorXd& xbar, const Eigen::VectorXd& x0,
                             const SearchConfig& cfg) {
    const int n = bd.n, k = (int)pat.size(), N = n + k;
    Eigen::VectorXd z(N);
    z.head(n) = x0;
    z.tail(k).setZero();

    auto system = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& G, Eigen::MatrixXd* J) {
        std::vector<double> xv(zz.data(), zz.data() + n);
        RowEval re = eval_rows(p, bd, xv, w, J != nullptr);
        G.resize(N);
        Eigen::VectorXd gobj = (obj == Obj::F) ? re.gf : Eigen::VectorXd(zz.head(n) - xbar);
        G.head(n) = gobj;
        for (int i = 0; i < k; ++i) G.head(n) += zz(n + i) * re.g.row(pat[(std::size_t)i]).transpose();
        for (int i = 0; i < k; ++i) G(n + i) = re.v(pat[(std::size_t)i]);
        if (J) {
            J->setZero(N, N);
            Eigen::MatrixXd H = (obj == Obj::F) ? re.hf : Eigen::MatrixXd::Identity(n, n);
            for (int i = 0; i < k; ++i) H += zz(n + i) * re.h[(std::size_t)pat[(std::size_t)i]];
            J->topLeftCorner(n, n) = H;
            for (int i = 0; i < k; ++i) {
                J->block(0, n + i, n, 1) = re.g.row(pat[(std::size_t)i]).transpose();
                J->block(n + i, 0, 1, n) = re.g.row(pat[(std::size_t)i]);
            }
        }
    };

    Eigen::VectorXd G;
    Eigen::MatrixXd J;
    double gn = kInf;
    for (int it = 0; it < cfg.newton_iters; ++it) {
        system(z, G, &J);
        gn = G.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(gn)) return {};
        if (gn <= cfg.residual_tol) break;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
        Eigen::VectorXd step = cod.solve(-G);
        if (!step.allFinite()) return {};
        double t = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 14; ++bt, t *= 0.5) {
            Eigen::VectorXd zt = z + t * step;
            Eigen::VectorXd Gt;
            system(zt, Gt, nullptr);
            double gt = Gt.lpNorm<Eigen::Infinity>();
            if (std::isfinite(gt) && gt <= (1.0 - 1e-4 * t) * gn) {
                z = zt;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    system(z, G, nullptr);
    PatternSolve out;
    out.x = z.head(n);
    out.nu = z.tail(k);
    out.res = G.lpNorm<Eigen::Infinity>();
    return out;
}

// Acceptance test for a candidate point of one branch. Rows the solver
// actually drove to zero (Newton pattern rows, pinned affine rows, scanned
// rows) are held to a solver band. Every other inequality row must be
// nonpositive as computed, with no feasibility tolerance: a fixed band here
// would fabricate near-feasible points on flat constraint ridges, where a
// genuinely violated row built from high-order terms sits below any fixed
// tolerance over a whole segment. The cost of strictness is that a point
// whose unsolved row rounds to +eps is dropped from one activity set; the
// pattern enumeration revisits the same point with that row included, where
// the solver band applies.
bool candidate_acceptable(const ParamProblem& p, const BranchData& bd,
                          const std::vector<double>& x, const std::vector<double>& w,
                          const std::vector<int>& solved) {
    const int rows = (int)bd.A.rows();
    RowEval re = eval_rows(p, bd, x, w, false);
    for (int r = 0; r < rows; ++r) {
        bool is_solved = std::find(solved.begin(), solved.end(), r) != solved.end();
        if (is_solved) {
            if (std::fabs(re.v(r)) > 1e-12 * (1.0 + std::fabs(bd.b(r)))) return false;
        } else if (bd.eq[(std::size_t)r]) {
            if (std::fabs(re.v(r)) > 1e-250) return false;
        } else {
            if (re.v(r) > 0.0) return false;
        }
    }
    return true;
}

// Newton over every start x multiplier pattern of one branch.
void newton_candidates(const ParamProblem& p, const BranchData& bd,
                       const std::vector<double>& w, int branch_idx, Obj obj,
                       const SearchConfig& cfg, std::vector<Candidate>& out) {
    const int n = bd.n;
    Eigen::VectorXd xbar(n);
    {
        auto xb = p.xbar_d();
        for (int j = 0; j < n; ++j) xbar(j) = xb[(std::size_t)j];
    }
    std::vector<int> eqs, ineqs;
    for (int r = 0; r < bd.A.rows(); ++r) (bd.eq[(std::size_t)r] ? eqs : ineqs).push_back(r);
    const int ni = (int)ineqs.size();
    if (ni > 16) throw InputError("find_stationary_points: too many branch rows");

    // multistart lattice
    std::vector<Eigen::VectorXd> starts;
    const int g = std::max(2, cfg.grid_per_dim);
    long total = 1;
    for (int d = 0; d < n; ++d) total *= g;
    for (long idx = 0; idx < total; ++idx) {
        Eigen::VectorXd x0(n);
        long t = idx;
        for (int d = 0; d < n; ++d) {
            int i = (int)(t % g);
            t /= g;
            x0(d) = xbar(d) + cfg.box_radius * (2.0 * i / (g - 1) - 1.0);
        }
        starts.push_back(std::move(x0));
    }

    for (unsigned mask = 0; mask < (1u << ni); ++mask) {
        std::vector<int> pat = eqs;
        for (int kk = 0; kk < ni; ++kk)
            if (mask & (1u << kk)) pat.push_back(ineqs[(std::size_t)kk]);
        // more pattern rows than variables invites least-squares smearing: a
        // nearly consistent overdetermined system converges with every row
        // inside the solver band even though no exact solution exists, which
        // plants a candidate on a point that violates one row. Degenerate
        // vertices stay reachable through their pinning n-subsets, where the
        // surplus rows must then pass the strict nonpositivity test.
        if ((int)pat.size() > n) continue;
        for (const auto& x0 : starts) {
            PatternSolve ps = solve_pattern_w(p, bd, w, pat, obj, xbar, x0, cfg);
            if (!(ps.res <= cfg.residual_tol)) continue;
            std::vector<double> xv(ps.x.data(), ps.x.data() + n);
            if ((ps.x - xbar).lpNorm<Eigen::Infinity>() > cfg.box_radius * (1 + 1e-9)) continue;
            if (!candidate_acceptable(p, bd, xv, w, pat)) continue;
            bool signs_ok = true;
            for (std::size_t i = 0; i < pat.size(); ++i) {
                int r = pat[i];
                if (!bd.eq[(std::size_t)r] && ps.nu((int)i) < -cfg.sign_tol) signs_ok = false;
            }
            Candidate c;
            c.x = xv;
            c.branch = branch_idx;
            c.residual = ps.res;
            c.kkt = signs_ok;
            out.push_back(std::move(c));
        }
    }
}

// Scan one-dimensional faces of a branch for isolated feasible points that
// the multiplier system cannot reach (the gradient equations may be
// inconsistent there).
void face_candidates(const ParamProblem& p, const BranchData& bd,
                     const std::vector<double>& w, int branch_idx,
                     const SearchConfig& cfg, std::vector<Candidate>& out) {
    const int n = bd.n;
    const int rows = (int)bd.A.rows();
    if (rows > 16) throw InputError("find_stationary_points: too many branch rows");
    auto xb = p.xbar_d();
    Eigen::VectorXd xbar(n);
    for (int j = 0; j < n; ++j) xbar(j) = xb[(std::size_t)j];

    // affinity probes: a row is affine when its Hessian vanishes at two
    // unrelated points
    std::vector<double> probe_off = {0.3833, -0.271, 0.512, -0.44};
    std::vector<double> x_probe2(xb);
    for (int j = 0; j < n; ++j) x_probe2[(std::size_t)j] += cfg.box_radius * probe_off[(std::size_t)(j % 4)];
    RowEval reA = eval_rows(p, bd, xb, w, true);
    RowEval reB = eval_rows(p, bd, x_probe2, w, true);
    std::vector<bool> affine((std::size_t)rows);
    for (int r = 0; r < rows; ++r) {
        double hA = reA.h[(std::size_t)r].lpNorm<Eigen::Infinity>();
        double hB = reB.h[(std::size_t)r].lpNorm<Eigen::Infinity>();
        affine[(std::size_t)r] = hA <= 1e-12 && hB <= 1e-12;
    }
    // affine row r: v_r(x) = g_r . x + c_r with constant gradient
    Eigen::MatrixXd Gaff(rows, n);
    Eigen::VectorXd caff(rows);
    {
        std::vector<double> zero(n, 0.0);
        RowEval re0 = eval_rows(p, bd, zero, w, false);
        for (int r = 0; r < rows; ++r) {
            Gaff.row(r) = reA.g.row(r);
            caff(r) = re0.v(r);
        }
    }

    std::vector<int> eqs, frees;
    for (int r = 0; r < rows; ++r) (bd.eq[(std::size_t)r] ? eqs : frees).push_back(r);
    const int ni = (int)frees.size();
    const double W = cfg.box_radius;

    auto accept_point = [&](const Eigen::VectorXd& x, const std::vector<int>& solved) {
        std::vector<double> xv(x.data(), x.data() + n);
        if ((x - xbar).lpNorm<Eigen::Infinity>() > W * (1 + 1e-9)) return;
        if (!candidate_acceptable(p, bd, xv, w, solved)) return;
        RowEval re = eval_rows(p, bd, xv, w, false);
        double worst = 0;
        for (int r : solved) worst = std::max(worst, std::fabs(re.v(r)));
        Candidate c;
        c.x = xv;
        c.branch = branch_idx;
        c.residual = worst;
        c.kkt = false;
        out.push_back(std::move(c));
    };

    for (unsigned mask = 0; mask < (1u << ni); ++mask) {
        std::vector<int> T = eqs;
        for (int kk = 0; kk < ni; ++kk)
            if (mask & (1u << kk)) T.push_back(frees[(std::size_t)kk]);
        if (T.empty()) continue;
        std::vector<int> aff_rows;
        for (int r : T)
            if (affine[(std::size_t)r]) aff_rows.push_back(r);
        if (aff_rows.empty()) continue;

        Eigen::MatrixXd M((int)aff_rows.size(), n);
        Eigen::VectorXd c((int)aff_rows.size());
        for (std::size_t i = 0; i < aff_rows.size(); ++i) {
            M.row((int)i) = Gaff.row(aff_rows[i]);
            c((int)i) = -caff(aff_rows[i]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        int ra = (int)cod.rank();

        if (ra == n) {
            Eigen::VectorXd x = affine_project(M, c, xbar);
            if ((M * x - c).lpNorm<Eigen::Infinity>() <= 1e-9) accept_point(x, aff_rows);
            continue;
        }
        if (ra != n - 1) continue;

        // remaining rows must vanish along the line
        std::vector<int> R;
        for (int r : T)
            if (!affine[(std::size_t)r]) R.push_back(r);
        if (R.empty()) continue;  // continuum face, nothing isolated here
        std::vector<int> solved_rows = aff_rows;
        solved_rows.insert(solved_rows.end(), R.begin(), R.end());

        Eigen::VectorXd xp = affine_project(M, c, xbar);
        if ((M * xp - c).lpNorm<Eigen::Infinity>() > 1e-9) continue;  // inconsistent pins
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        Eigen::MatrixXd K = lu.kernel();
        if (K.cols() < 1) continue;
        Eigen::VectorXd d = K.col(0);
        d.normalize();

        auto lineval = [&](double t, RowEval* re_out) {
            Eigen::VectorXd x = xp + t * d;
            std::vector<double> xv(x.data(), x.data() + n);
            RowEval re = eval_rows(p, bd, xv, w, false);
            double g = 0;
            for (int r : R) g = std::max(g, std::fabs(re.v(r)));
            if (re_out) *re_out = std::move(re);
            return g;
        };
        auto signed_row = [&](double t) {
            Eigen::VectorXd x = xp + t * d;
            std::vector<double> xv(x.data(), x.data() + n);
            RowEval re = eval_rows(p, bd, xv, w, false);
            return re.v(R[0]);
        };

        const int S = std::max(101, cfg.face_scan);
        std::vector<double> gs((std::size_t)S), ts((std::size_t)S);
        double scan_max = 0;
        for (int i = 0; i < S; ++i) {
            double t = -W + 2.0 * W * i / (S - 1);
            ts[(std::size_t)i] = t;
            gs[(std::size_t)i] = lineval(t, nullptr);
            scan_max = std::max(scan_max, gs[(std::size_t)i]);
        }
        if (scan_max <= 1e-250) continue;  // rows vanish identically: continuum
        const double accept_tol = 1e-18 * (1.0 + scan_max);

        auto polish_and_accept = [&](double lo, double hi) {
            // ternary search on the dip
            for (int it = 0; it < 220; ++it) {
                double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                if (lineval(m1, nullptr) <= lineval(m2, nullptr))
                    hi = m2;
                else
                    lo = m1;
            }
            double t = 0.5 * (lo + hi);
            if (lineval(t, nullptr) > accept_tol) return;
            accept_point(xp + t * d, solved_rows);
        };

        for (int i = 1; i + 1 < S; ++i) {
            double g0 = gs[(std::size_t)(i - 1)], g1 = gs[(std::size_t)i], g2 = gs[(std::size_t)(i + 1)];
            if (g1 <= g0 && g1 <= g2 && (g1 < g0 || g1 < g2))
                polish_and_accept(ts[(std::size_t)(i - 1)], ts[(std::size_t)(i + 1)]);
        }
        if (R.size() == 1) {
            // sign changes of the single remaining row: simple roots
            double prev = signed_row(ts[0]);
            for (int i = 1; i < S; ++i) {
                double cur = signed_row(ts[(std::size_t)i]);
                if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0)) {
                    double lo = ts[(std::size_t)(i - 1)], hi = ts[(std::size_t)i];
                    double flo = prev;
                    for (int it = 0; it < 200; ++it) {
                        double mid = 0.5 * (lo + hi);
                        double fm = signed_row(mid);
                        if ((flo < 0) == (fm < 0))
                            lo = mid, flo = fm;
                        else
                            hi = mid;
                    }
                    double t = 0.5 * (lo + hi);
                    if (lineval(t, nullptr) <= accept_tol) accept_point(xp + t * d, solved_rows);
                }
                prev = cur;
            }
        }
    }
}

std::vector<Candidate> merge_candidates(std::vector<Candidate> cands, double radius) {
    std::vector<Candidate> merged;
    for (auto& c : cands) {
        bool absorbed = false;
        for (auto& m : merged) {
            double d = 0;
            for (std::size_t j = 0; j < c.x.size(); ++j)
                d = std::max(d, std::fabs(c.x[j] - m.x[j]));
            if (d <= radius) {
                bool better = (c.kkt && !m.kkt) || (c.kkt == m.kkt && c.residual < m.residual);
                if (better) m = c;
                absorbed = true;
                break;
            }
        }
        if (!absorbed) merged.push_back(std::move(c));
    }
    return merged;
}

// ---- exact classification on a snapped snapshot -------------------------

QVec snap_qbar(const DisjunctiveSet& P, const std::vector<double>& q, double snap) {
    QVec out((std::size_t)q.size());
    auto rat = [&](double v) { return std::fabs(v) <= snap ? Rat(0) : rat_of_double(v); };
    int off = 0;
    for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
        const Block& blk = P.blocks[bi];
        if (blk.kind == Block::Kind::Zero) {
            for (int j = 0; j < blk.dim; ++j) out[(std::size_t)(off + j)] = 0;
        } else if (blk.kind == Block::Kind::NonPos) {
            for (int j = 0; j < blk.dim; ++j) {
                double v = q[(std::size_t)(off + j)];
                out[(std::size_t)(off + j)] = v > 0 ? Rat(0) : rat(v);
            }
        } else if (blk.kind == Block::Kind::Free) {
            for (int j = 0; j < blk.dim; ++j)
                out[(std::size_t)(off + j)] = rat_of_double(q[(std::size_t)(off + j)]);
        } else if (blk.kind == Block::Kind::EC) {
            double a = q[(std::size_t)off], b = q[(std::size_t)(off + 1)];
            double v1 = std::max(std::fabs(b), std::max(0.0, a));  // (a<=0, b=0)
            double v2 = std::max(std::fabs(a), std::max(0.0, b));  // (a=0, b<=0)
            if (v1 <= v2) {
                out[(std::size_t)off] = a > 0 ? Rat(0) : rat(a);
                out[(std::size_t)(off + 1)] = 0;
            } else {
                out[(std::size_t)off] = 0;
                out[(std::size_t)(off + 1)] = b > 0 ? Rat(0) : rat(b);
            }
        } else if (blk.kind == Block::Kind::VC) {
            double a = q[(std::size_t)off], b = q[(std::size_t)(off + 1)];
            double v1 = std::max(std::fabs(b), std::max(0.0, -a));  // (a>=0, b=0)
            double v2 = std::max(std::fabs(a), std::max(0.0, b));   // (a=0, b<=0)
            double v3 = std::max(std::fabs(a), std::max(0.0, -b));  // (a=0, b>=0)
            if (v1 <= v2 && v1 <= v3) {
                out[(std::size_t)off] = a < 0 ? Rat(0) : rat(a);
                out[(std::size_t)(off + 1)] = 0;
            } else if (v2 <= v3) {
                out[(std::size_t)off] = 0;
                out[(std::size_t)(off + 1)] = b > 0 ? Rat(0) : rat(b);
            } else {
                out[(std::size_t)off] = 0;
                out[(std::size_t)(off + 1)] = b < 0 ? Rat(0) : rat(b);
            }
        } else {
            // union blocks: plain per-coordinate snap toward zero
            for (int j = 0; j < blk.dim; ++j)
                out[(std::size_t)(off + j)] = rat(q[(std::size_t)(off + j)]);
        }
        off += blk.dim;
    }
    return out;
}

struct ClassifyOut {
    bool m_stationary = false;
    bool b_stationary_linearized = false;
    bool b_caveat = true;
    bool local_min_candidate = false;
    double multiplier_norm = 0;
};

ClassifyOut classify_point(const ParamProblem& p, const std::vector<double>& w,
                           const std::vector<double>& x, const SearchConfig& cfg) {
    ClassifyOut co;
    QFEval ev = eval_qf(p, x, w);
    const int n = p.ref.n, m = p.ref.m;

    ReferenceData rd;
    rd.n = n;
    rd.m = m;
    rd.s = p.ref.s;
    rd.P = p.ref.P;
    rd.qbar = snap_qbar(rd.P, ev.q, cfg.snap_tol);
    // derivative entries below snap_tol become exact zeros: cone and
    // multiplier verdicts hinge on which gradients vanish or align, and a
    // residual-scale leftover in a derivative would make a degenerate
    // gradient look independent
    auto snap_rat = [&](double v) {
        return std::fabs(v) <= cfg.snap_tol ? Rat(0) : rat_of_double(v);
    };
    rd.J = QMat(m, n);
    rd.Hq.assign((std::size_t)m, QMat(n, n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            rd.J.at(i, j) = snap_rat(ev.gq[(std::size_t)i][(std::size_t)j]);
            for (int jj = 0; jj < n; ++jj)
                rd.Hq[(std::size_t)i].at(j, jj) =
                    snap_rat(ev.hq[(std::size_t)i][(std::size_t)(j * n + jj)]);
        }
    rd.grad_f = QVec((std::size_t)n);
    rd.Hf = QMat(n, n);
    for (int j = 0; j < n; ++j) {
        rd.grad_f[(std::size_t)j] = snap_rat(ev.gf[(std::size_t)j]);
        for (int jj = 0; jj < n; ++jj)
            rd.Hf.at(j, jj) = snap_rat(ev.hf[(std::size_t)(j * n + jj)]);
    }
    try {
        rd.validate();
    } catch (const std::exception&) {
        return co;  // snap failed to land in P: leave everything pessimistic
    }

    const Rat B = rat_of_double(cfg.multiplier_box);
    const Rat tol = rat_of_double(cfg.class_tol);

    // M-stationarity: min over limiting-normal pieces of the smallest
    // stationarity residual reachable with a box-bounded multiplier.
    {
        ConeUnion nc = limiting_normal_cone(rd.P, rd.qbar);
        std::optional<Rat> best;
        QVec best_lambda;
        for (const auto& piece : nc.pieces) {
            std::vector<LinCons> cons;
            auto ext = [&](const QVec& row) {
                QVec a(row);
                a.push_back(0);
                return a;
            };
            for (int r = 0; r < piece.G.rows; ++r) cons.push_back(cons_le(ext(piece.G.row(r)), 0));
            for (int r = 0; r < piece.H.rows; ++r) cons.push_back(cons_eq(ext(piece.H.row(r)), 0));
            for (int j = 0; j < n; ++j) {
                QVec a1((std::size_t)(m + 1), Rat(0)), a2((std::size_t)(m + 1), Rat(0));
                for (int i = 0; i < m; ++i) {
                    a1[(std::size_t)i] = rd.J.at(i, j);
                    a2[(std::size_t)i] = -rd.J.at(i, j);
                }
                a1[(std::size_t)m] = -1;
                a2[(std::size_t)m] = -1;
                cons.push_back(cons_le(a1, -rd.grad_f[(std::size_t)j]));
                cons.push_back(cons_le(a2, rd.grad_f[(std::size_t)j]));
            }
            for (int i = 0; i < m; ++i) {
                QVec a1((std::size_t)(m + 1), Rat(0)), a2((std::size_t)(m + 1), Rat(0));
                a1[(std::size_t)i] = 1;
                a2[(std::size_t)i] = -1;
                cons.push_back(cons_le(a1, B));
                cons.push_back(cons_le(a2, B));
            }
            {
                QVec a((std::size_t)(m + 1), Rat(0));
                a[(std::size_t)m] = -1;
                cons.push_back(cons_le(a, 0));
            }
            QVec c((std::size_t)(m + 1), Rat(0));
            c[(std::size_t)m] = -1;
            LPResult lr = lp_solve(m + 1, cons, c);
            if (lr.status != LPStatus::Optimal) continue;
            Rat t = -lr.value;
            if (!best || t < *best) {
                best = t;
                best_lambda.assign(lr.x.begin(), lr.x.begin() + m);
            }
        }
        if (best && *best <= tol) {
            co.m_stationary = true;
            Rat mn = 0;
            for (const auto& l : best_lambda) mn = std::max(mn, l < 0 ? Rat(-l) : l);
            co.multiplier_norm = to_double(mn);
        }
    }

    // linearized B-stationarity: no descent direction in any piece of the
    // linearization cone (box-bounded LP per piece)
    {
        ConeUnion lc = lin_cone(rd);
        Rat worst = 0;
        for (const auto& piece : lc.pieces) {
            std::vector<LinCons> cons;
            for (int r = 0; r < piece.G.rows; ++r) cons.push_back(cons_le(piece.G.row(r), 0));
            for (int r = 0; r < piece.H.rows; ++r) cons.push_back(cons_eq(piece.H.row(r), 0));
            for (int j = 0; j < n; ++j) {
                QVec a1((std::size_t)n, Rat(0)), a2((std::size_t)n, Rat(0));
                a1[(std::size_t)j] = 1;
                a2[(std::size_t)j] = -1;
                cons.push_back(cons_le(a1, 1));
                cons.push_back(cons_le(a2, 1));
            }
            QVec c((std::size_t)n);
            for (int j = 0; j < n; ++j) c[(std::size_t)j] = -rd.grad_f[(std::size_t)j];
            LPResult lr = lp_solve(n, cons, c);
            if (lr.status != LPStatus::Optimal) continue;
            worst = std::max(worst, lr.value);
        }
        co.b_stationary_linearized = worst <= tol;
    }

    // the linearized test is exact under metric regularity or FOSCMS
    try {
        co.b_caveat = !(check_metric_regularity(rd).holds() || check_foscms(rd).holds());
    } catch (const std::exception&) {
        co.b_caveat = true;
    }

    // local minimality: probe feasible samples around x for a lower value
    {
        co.local_min_candidate = true;
        std::vector<std::vector<double>> dirs = sphere_dirs(n, cfg.probe_count);
        try {
            ConeUnion lc = lin_cone(rd);
            for (const auto& piece : lc.pieces) {
                auto gen = piece.generators();
                auto push_dir = [&](const QVec& v, bool both) {
                    std::vector<double> d((std::size_t)n);
                    double s = 0;
                    for (int j = 0; j < n; ++j) {
                        d[(std::size_t)j] = to_double(v[(std::size_t)j]);
                        s += d[(std::size_t)j] * d[(std::size_t)j];
                    }
                    if (s < 1e-24) return;
                    double inv = 1.0 / std::sqrt(s);
                    for (double& t : d) t *= inv;
                    dirs.push_back(d);
                    if (both) {
                        for (double& t : d) t = -t;
                        dirs.push_back(d);
                    }
                };
                for (const auto& r : gen.rays) push_dir(r, false);
                for (const auto& l : gen.lin) push_dir(l, true);
            }
        } catch (const std::exception&) {
        }
        // A probe disproves local minimality only when it is feasible as
        // computed: inequality rows nonpositive, equality rows at roundoff
        // scale. A distance tolerance here would accept probes whose
        // violation is tiny on an absolute scale yet decisive (flat
        // high-order constraint ridges), wiping out genuine isolated
        // minimizers. The strict test can miss a disproof when roundoff
        // pushes a feasible probe a few ulp outside, which only leaves a
        // candidate flag set, never removes a true point.
        std::vector<Eigen::MatrixXd> pA;
        std::vector<Eigen::VectorXd> pb;
        std::vector<std::vector<bool>> peq;
        {
            auto fl = p.ref.P.flatten();
            for (const auto& piece : fl.pieces) {
                int pr = (int)piece.A.rows, pc = (int)piece.A.cols;
                Eigen::MatrixXd A(pr, pc);
                Eigen::VectorXd b(pr);
                for (int r = 0; r < pr; ++r) {
                    for (int j = 0; j < pc; ++j) A(r, j) = to_double(piece.A.at(r, j));
                    b(r) = to_double(piece.b[(std::size_t)r]);
                }
                pA.push_back(std::move(A));
                pb.push_back(std::move(b));
                peq.push_back(piece.eq);
            }
        }
        auto strictly_feasible = [&](const std::vector<double>& q) {
            Eigen::Map<const Eigen::VectorXd> qv(q.data(), (int)q.size());
            for (std::size_t pi = 0; pi < pA.size(); ++pi) {
                Eigen::VectorXd v = pA[pi] * qv - pb[pi];
                bool ok = true;
                for (int r = 0; r < v.size() && ok; ++r) {
                    double band = 1e-14 * (1.0 + std::fabs(pb[pi](r)));
                    if (peq[pi][(std::size_t)r] ? std::fabs(v(r)) > band : v(r) > 0.0)
                        ok = false;
                }
                if (ok) return true;
            }
            return false;
        };
        const double fref = ev.f;
        const double slack = 1e-10 * (1.0 + std::fabs(fref));
        for (double r : {cfg.probe_radius, cfg.probe_radius * 0.3}) {
            for (const auto& d : dirs) {
                std::vector<double> y(x);
                for (int j = 0; j < n; ++j) y[(std::size_t)j] += r * d[(std::size_t)j];
                QFEval evy = eval_qf(p, y, w);
                if (!strictly_feasible(evy.q)) continue;
                if (evy.f < fref - slack) {
                    co.local_min_candidate = false;
                    break;
                }
            }
            if (!co.local_min_candidate) break;
        }
    }
    return co;
}

std::vector<Candidate> search_all_branches(const ParamProblem& p, const std::vector<double>& w,
                                           Obj obj, const SearchConfig& cfg) {
    auto branches = enumerate_branches(p.ref.P);
    std::vector<Candidate> cands;
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
        BranchData bd = branch_data(branches[bi], p.ref.n);
        newton_candidates(p, bd, w, (int)bi, obj, cfg, cands);
        face_candidates(p, bd, w, (int)bi, cfg, cands);
    }
    return merge_candidates(std::move(cands), cfg.merge_radius);
}

}  // namespace

std::vector<FoundPoint> find_stationary_points(const ParamProblem& p,
                                               const std::vector<double>& w,
                                               const SearchConfig& cfg) {
    if ((int)w.size() != p.ref.s) throw InputError("find_stationary_points: bad parameter size");
    auto cands = search_all_branches(p, w, Obj::F, cfg);
    auto xb = p.xbar_d();

    std::vector<FoundPoint> out;
    for (const auto& c : cands) {
        ClassifyOut co = classify_point(p, w, c.x, cfg);
        if (!c.kkt && !co.local_min_candidate) continue;
        FoundPoint fp;
        fp.x = c.x;
        fp.branch = c.branch;
        fp.residual = c.residual;
        fp.kkt = c.kkt;
        fp.m_stationary = co.m_stationary;
        fp.b_stationary_linearized = co.b_stationary_linearized;
        fp.b_caveat = co.b_caveat;
        fp.local_min_candidate = co.local_min_candidate;
        fp.multiplier_norm = co.multiplier_norm;
        std::vector<double> diff(c.x);
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= xb[j];
        fp.dist = norm2(diff);
        out.push_back(std::move(fp));
    }
    std::sort(out.begin(), out.end(), [](const FoundPoint& a, const FoundPoint& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.x < b.x;
    });
    return out;
}

GrowthCheck verify_growth(const ParamProblem& p, double eta, double radius, int grid_n) {
    if (grid_n < 2) throw InputError("verify_growth: grid_n must be at least 2");
    const int n = p.ref.n;
    auto xb = p.xbar_d();
    auto wb = p.wbar_d();
    const double fbar = eval_qf(p, xb, wb).f;

    GrowthCheck gc;
    gc.violation_gap = 0;
    long total = 1;
    for (int d = 0; d < n; ++d) total *= grid_n;
    bool ok = true;
    for (long idx = 0; idx < total; ++idx) {
        std::vector<double> x(xb);
        long t = idx;
        double r2 = 0;
        for (int d = 0; d < n; ++d) {
            int i = (int)(t % grid_n);
            t /= grid_n;
            double off = radius * (2.0 * i / (grid_n - 1) - 1.0);
            x[(std::size_t)d] += off;
            r2 += off * off;
        }
        // the attested inequality quantifies over the norm ball, not the box
        if (r2 > radius * radius * (1 + 1e-12)) continue;
        QFEval ev = eval_qf(p, x, wb);
        double lhs = std::max(ev.f - fbar, distance_to_set(p.ref.P, ev.q));
        double rhs = eta * r2;
        if (lhs + 1e-12 * (1.0 + std::fabs(lhs)) < rhs) {
            ok = false;
            double gap = rhs - lhs;
            if (gap > gc.violation_gap) {
                gc.violation_gap = gap;
                gc.violation_x = x;
            }
        }
    }
    gc.verified = ok;
    if (ok) {
        gc.attestation.source = GrowthAttestation::Source::HarnessVerified;
        gc.attestation.eta = eta;
        gc.attestation.radius = radius;
        gc.attestation.grid = total;
    }
    return gc;
}

PerturbStudy run_perturbation_study(const ParamProblem& p,
                                    const std::vector<std::vector<double>>& w_grid,
                                    int order, const SearchConfig& cfg) {
    if (order != 1 && order != 2) throw InputError("run_perturbation_study: order must be 1 or 2");
    PerturbStudy st;
    st.problem = p.name;
    st.order = order;

    for (const auto& w : w_grid) {
        PerturbSample smp;
        smp.w = w;
        smp.err = error_measures(p, w);
        smp.found = find_stationary_points(p, w, cfg);

        // distance from the base point to the perturbed feasible set
        auto xb = p.xbar_d();
        QFEval ev0 = eval_qf(p, xb, w);
        if (distance_to_set(p.ref.P, ev0.q) <= 1e-11 * (1.0 + norm_inf(ev0.q))) {
            smp.feas_dist = 0;
        } else {
            double best = kInf;
            auto cands = search_all_branches(p, w, Obj::Proj, cfg);
            for (const auto& c : cands) {
                std::vector<double> diff(c.x);
                for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= xb[j];
                best = std::min(best, norm2(diff));
            }
            for (const auto& fp : smp.found) best = std::min(best, fp.dist);
            smp.feas_dist = best;
        }

        smp.dist_min = kInf;
        smp.dist_max_local = 0;
        smp.n_local = 0;
        for (const auto& fp : smp.found) {
            smp.dist_min = std::min(smp.dist_min, fp.dist);
            if (fp.dist <= cfg.locality_radius) {
                ++smp.n_local;
                smp.dist_max_local = std::max(smp.dist_max_local, fp.dist);
            }
        }
        st.samples.push_back(std::move(smp));
    }

    RatioEstimate& re = st.ratio;
    re.order = order;
    const std::size_t half = (st.samples.size() + 1) / 2;
    bool any_half = false;
    for (std::size_t i = 0; i < st.samples.size(); ++i) {
        const auto& smp = st.samples[i];
        double tau = order == 1 ? smp.err.tau1 : smp.err.tau2;
        if (smp.n_local == 0 || !(tau > 1e-300)) continue;
        double r = smp.dist_max_local / tau;
        if (!re.any || r > re.sup) {
            re.sup = r;
            re.arg_w = smp.w;
        }
        re.any = true;
        if (i < half) {
            any_half = true;
            re.sup_first_half = std::max(re.sup_first_half, r);
        }
    }
    if (!re.any)
        re.consistent = true;
    else if (!any_half)
        re.consistent = false;
    else
        re.consistent = re.sup <= 2.0 * re.sup_first_half * (1 + 1e-12);
    {
        std::ostringstream os;
        os << st.samples.size() << " samples; sup " << re.sup << " vs first-half sup "
           << re.sup_first_half;
        re.grid_note = os.str();
    }
    return st;
}

std::vector<std::vector<double>> directional_sampler(const std::vector<double>& u, double rho,
                                                     double delta, int count) {
    if (rho <= 0 || delta < 0) throw InputError("directional_sampler: bad rho or delta");
    const int n = (int)u.size();
    if (n == 0) throw InputError("directional_sampler: empty direction");
    std::vector<std::vector<double>> out;
    double un = norm2(u);

    if (un == 0) {
        // the whole ball
        auto dirs = sphere_dirs(n, count);
        for (int k = 0; k < (int)dirs.size(); ++k) {
            double t = rho * std::max(halton((unsigned long long)k + 1, 2), 1.0 / (2.0 * count));
            std::vector<double> z(dirs[(std::size_t)k]);
            for (double& x : z) x *= t;
            out.push_back(std::move(z));
        }
        return out;
    }

    std::vector<double> uhat(u);
    for (double& x : uhat) x /= un;
    // orthonormal basis of the complement of uhat
    std::vector<std::vector<double>> basis;
    for (int axis = 0; axis < n && (int)basis.size() < n - 1; ++axis) {
        std::vector<double> v(n, 0.0);
        v[(std::size_t)axis] = 1.0;
        double du = 0;
        for (int j = 0; j < n; ++j) du += v[(std::size_t)j] * uhat[(std::size_t)j];
        for (int j = 0; j < n; ++j) v[(std::size_t)j] -= du * uhat[(std::size_t)j];
        for (const auto& bvec : basis) {
            double dv = 0;
            for (int j = 0; j < n; ++j) dv += v[(std::size_t)j] * bvec[(std::size_t)j];
            for (int j = 0; j < n; ++j) v[(std::size_t)j] -= dv * bvec[(std::size_t)j];
        }
        double nv = norm2(v);
        if (nv < 1e-9) continue;
        for (double& x : v) x /= nv;
        basis.push_back(std::move(v));
    }

    // unit direction uhat tilted by at most c: the chord bound
    // |normalize(uhat + c v) - uhat| <= c for any unit-ball v orthogonal
    // to uhat keeps every sample inside the neighborhood
    const double c = 0.999 * std::min(delta, 2.0);
    for (int k = 0; k < count; ++k) {
        double t = rho * std::max(halton((unsigned long long)k + 1, 2), 1.0 / (2.0 * count));
        std::vector<double> v(n, 0.0);
        if (!basis.empty() && k % 4 != 0) {
            double s2 = 0;
            std::vector<double> coef(basis.size());
            for (std::size_t d = 0; d < basis.size(); ++d) {
                coef[d] = 2.0 * halton((unsigned long long)k + 1, kPrimes[(d + 1) % 7]) - 1.0;
                s2 += coef[d] * coef[d];
            }
            double scale = s2 > 1.0 ? 1.0 / std::sqrt(s2) : 1.0;
            for (std::size_t d = 0; d < basis.size(); ++d)
                for (int j = 0; j < n; ++j) v[(std::size_t)j] += scale * coef[d] * basis[d][(std::size_t)j];
        }
        std::vector<double> dvec(n);
        for (int j = 0; j < n; ++j) dvec[(std::size_t)j] = uhat[(std::size_t)j] + c * v[(std::size_t)j];
        double dn = norm2(dvec);
        std::vector<double> z(n);
        for (int j = 0; j < n; ++j) z[(std::size_t)j] = t * dvec[(std::size_t)j] / dn;
        out.push_back(std::move(z));
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_study_csv(std::ostream& os, const PerturbStudy& st) {
    int s = st.samples.empty() ? 0 : (int)st.samples.front().w.size();
    for (int j = 0; j < s; ++j) os << "omega_" << (j + 1) << ",";
    os << "e1,e2,tau1,tau2,feas_dist,n_points,dist_min,dist_max_local\n";
    for (const auto& smp : st.samples) {
        for (double wj : smp.w) os << fmt_double(wj) << ",";
        os << fmt_double(smp.err.e1) << "," << fmt_double(smp.err.e2) << ","
           << fmt_double(smp.err.tau1) << "," << fmt_double(smp.err.tau2) << ","
           << fmt_double(smp.feas_dist) << "," << smp.found.size() << ","
           << fmt_double(smp.dist_min) << "," << fmt_double(smp.dist_max_local) << "\n";
    }
}

std::string study_json(const PerturbStudy& st) {
    using json = nlohmann::ordered_json;
    auto num = [](double v) -> json {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        if (std::isnan(v)) return "nan";
        return v;
    };
    json j;
    j["schema"] = "perturb-study/1";
    j["problem"] = st.problem;
    j["order"] = st.order;
    json ratio;
    ratio["any"] = st.ratio.any;
    ratio["sup"] = num(st.ratio.sup);
    ratio["arg_w"] = st.ratio.arg_w;
    ratio["sup_first_half"] = num(st.ratio.sup_first_half);
    ratio["consistent"] = st.ratio.consistent;
    ratio["grid_note"] = st.ratio.grid_note;
    j["ratio"] = ratio;
    j["samples"] = json::array();
    for (const auto& smp : st.samples) {
        json js;
        js["w"] = smp.w;
        js["e1"] = num(smp.err.e1);
        js["e2"] = num(smp.err.e2);
        js["tau1"] = num(smp.err.tau1);
        js["tau2"] = num(smp.err.tau2);
        js["feas_dist"] = num(smp.feas_dist);
        js["dist_min"] = num(smp.dist_min);
        js["dist_max_local"] = num(smp.dist_max_local);
        js["n_local"] = smp.n_local;
        js["found"] = json::array();
        for (const auto& fp : smp.found) {
            json jf;
            jf["x"] = fp.x;
            jf["branch"] = fp.branch;
            jf["residual"] = num(fp.residual);
            jf["kkt"] = fp.kkt;
            jf["m_stationary"] = fp.m_stationary;
            jf["b_stationary_linearized"] = fp.b_stationary_linearized;
            jf["b_caveat"] = fp.b_caveat;
            jf["local_min_candidate"] = fp.local_min_candidate;
            jf["multiplier_norm"] = num(fp.multiplier_norm);
            jf["dist"] = num(fp.dist);
            js["found"].push_back(std::move(jf));
        }
        j["samples"].push_back(std::move(js));
    }
    return j.dump(2);
}

}  // namespace stab
