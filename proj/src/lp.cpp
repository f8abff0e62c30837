#include "stab/lp.hpp"

#include <algorithm>
#include <cassert>

namespace stab {

namespace {

// Dense exact tableau. Rows are kept with nonnegative right-hand sides; the
// original row signs are tracked outside so duals can be mapped back.
struct Tableau {
    int m = 0;
    int ncols = 0;
    std::vector<QVec> T;  // m rows of length ncols
    QVec rhs;             // length m, always >= 0
    std::vector<int> basis;
    std::vector<bool> is_artificial;  // per column

    void pivot(int pr, int pc) {
        Rat piv = T[pr][pc];
        if (piv == 0) throw InternalError("simplex: zero pivot");
        for (int j = 0; j < ncols; ++j) T[pr][j] /= piv;
        rhs[pr] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == pr || T[i][pc] == 0) continue;
            Rat f = T[i][pc];
            for (int j = 0; j < ncols; ++j) T[i][j] -= f * T[pr][j];
            rhs[i] -= f * rhs[pr];
        }
        basis[pr] = pc;
    }

    // Reduced cost of column j under objective coefficients c (maximization).
    Rat reduced_cost(const QVec& c, int j) const {
        Rat r = c[j];
        for (int i = 0; i < m; ++i)
            if (T[i][j] != 0) r -= c[basis[i]] * T[i][j];
        return r;
    }

    // y'_i = c_B^T B^{-1} e_{id_i}; the initial identity column of row i is
    // its slack or artificial column, whose current content is B^{-1} e_i.
    Rat row_dual(const QVec& c, int id_col) const {
        Rat y = 0;
        for (int i = 0; i < m; ++i)
            if (T[i][id_col] != 0) y += c[basis[i]] * T[i][id_col];
        return y;
    }

    // If an artificial variable is basic at value zero in a row where column
    // j has a nonzero entry, pivot it out (zero rhs makes the pivot valid for
    // either sign and keeps feasibility). Returns true if pivoted. Keeps
    // artificials pinned at zero throughout phase 2.
    bool kick_artificial(int j) {
        for (int i = 0; i < m; ++i) {
            if (is_artificial[basis[i]] && rhs[i] == 0 && T[i][j] != 0) {
                pivot(i, j);
                return true;
            }
        }
        return false;
    }

    enum class StepResult { Optimal, Unbounded };

    // Bland's rule simplex; barred columns never enter. With pin set (phase
    // 2), artificial variables are pivoted out before they can move, so they
    // stay at zero and never enter rays. On Unbounded, *unbounded_col is the
    // entering column with no blocking row. Terminates: pin pivots strictly
    // shrink the artificial basis, and the kick-free segments are pure
    // Bland's rule.
    StepResult run(const QVec& c, const std::vector<bool>& barred, int* unbounded_col,
                   bool pin) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (barred[j]) continue;
                if (reduced_cost(c, j) > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return StepResult::Optimal;
            if (pin && kick_artificial(enter)) continue;
            int leave = -1;
            Rat best;
            for (int i = 0; i < m; ++i) {
                if (T[i][enter] <= 0) continue;
                Rat ratio = rhs[i] / T[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) {
                if (unbounded_col) *unbounded_col = enter;
                return StepResult::Unbounded;
            }
            pivot(leave, enter);
        }
    }
};

struct StandardForm {
    Tableau tab;
    int nvars = 0;
    std::vector<int> col_pos, col_neg;  // per variable; col_neg = -1 if nonneg
    std::vector<int> id_col;            // per row: slack or artificial column
    std::vector<int> row_sign;          // +1 / -1 scaling applied to the row
    int first_artificial = 0;

    QVec solution() const {
        QVec val(tab.ncols, Rat(0));
        for (int i = 0; i < tab.m; ++i) val[tab.basis[i]] = tab.rhs[i];
        QVec x(nvars, Rat(0));
        for (int j = 0; j < nvars; ++j) {
            x[j] = val[col_pos[j]];
            if (col_neg[j] >= 0) x[j] -= val[col_neg[j]];
        }
        return x;
    }
};

StandardForm build(int nvars, const std::vector<LinCons>& cons, const std::vector<bool>& nonneg) {
    for (const auto& c : cons) {
        if (static_cast<int>(c.a.size()) != nvars) throw InputError("lp: row size mismatch");
        if (c.rel == Rel::LT) throw InputError("lp_solve: strict row not allowed");
    }
    StandardForm sf;
    sf.nvars = nvars;
    int m = static_cast<int>(cons.size());

    // Column layout: structural (split for free vars), then slacks/surpluses,
    // then artificials.
    int col = 0;
    sf.col_pos.resize(nvars);
    sf.col_neg.assign(nvars, -1);
    for (int j = 0; j < nvars; ++j) {
        sf.col_pos[j] = col++;
        if (!nonneg[j]) sf.col_neg[j] = col++;
    }
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    sf.row_sign.resize(m);
    for (int i = 0; i < m; ++i) {
        sf.row_sign[i] = cons[i].b < 0 ? -1 : 1;
        bool needs_art = cons[i].rel == Rel::EQ || sf.row_sign[i] < 0;
        if (cons[i].rel == Rel::LE) slack_col[i] = col++;
        if (needs_art) art_col[i] = -2;  // placed after all slacks
    }
    sf.first_artificial = col;
    for (int i = 0; i < m; ++i)
        if (art_col[i] == -2) art_col[i] = col++;

    Tableau& t = sf.tab;
    t.m = m;
    t.ncols = col;
    t.T.assign(m, QVec(col, Rat(0)));
    t.rhs.assign(m, Rat(0));
    t.basis.assign(m, -1);
    t.is_artificial.assign(col, false);
    for (int i = 0; i < m; ++i)
        if (art_col[i] >= 0) t.is_artificial[art_col[i]] = true;

    sf.id_col.resize(m);
    for (int i = 0; i < m; ++i) {
        Rat s = sf.row_sign[i];
        for (int j = 0; j < nvars; ++j) {
            Rat v = s * cons[i].a[j];
            if (v == 0) continue;
            t.T[i][sf.col_pos[j]] = v;
            if (sf.col_neg[j] >= 0) t.T[i][sf.col_neg[j]] = -v;
        }
        t.rhs[i] = s * cons[i].b;
        if (slack_col[i] >= 0) t.T[i][slack_col[i]] = Rat(sf.row_sign[i]);
        if (art_col[i] >= 0) {
            t.T[i][art_col[i]] = 1;
            t.basis[i] = art_col[i];
            sf.id_col[i] = art_col[i];
        } else {
            t.basis[i] = slack_col[i];
            sf.id_col[i] = slack_col[i];
        }
    }
    return sf;
}

}  // namespace

bool verify_farkas(int nvars, const std::vector<LinCons>& cons, const QVec& f,
                   const std::vector<bool>& nonneg) {
    if (f.size() != cons.size()) return false;
    for (std::size_t i = 0; i < cons.size(); ++i)
        if (cons[i].rel != Rel::EQ && f[i] < 0) return false;
    Rat rhs = 0;
    QVec comb(nvars, Rat(0));
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (f[i] == 0) continue;
        for (int j = 0; j < nvars; ++j) comb[j] += f[i] * cons[i].a[j];
        rhs += f[i] * cons[i].b;
    }
    for (int j = 0; j < nvars; ++j) {
        bool nn = j < static_cast<int>(nonneg.size()) && nonneg[j];
        if (nn ? comb[j] < 0 : comb[j] != 0) return false;
    }
    return rhs < 0;
}

bool verify_farkas(int nvars, const std::vector<LinCons>& cons, const QVec& f) {
    return verify_farkas(nvars, cons, f, std::vector<bool>(nvars, false));
}

LPResult lp_solve(int nvars, const std::vector<LinCons>& cons, const QVec& c,
                  const std::vector<bool>& nonneg) {
    if (static_cast<int>(c.size()) != nvars) throw InputError("lp_solve: objective size");
    if (static_cast<int>(nonneg.size()) != nvars) throw InputError("lp_solve: nonneg size");
    StandardForm sf = build(nvars, cons, nonneg);
    Tableau& t = sf.tab;
    int m = t.m;

    // Phase 1: maximize -sum(artificials).
    QVec c1(t.ncols, Rat(0));
    for (int j = sf.first_artificial; j < t.ncols; ++j) c1[j] = -1;
    std::vector<bool> barred(t.ncols, false);
    int ub_col = -1;
    if (t.run(c1, barred, &ub_col, false) != Tableau::StepResult::Optimal)
        throw InternalError("lp: phase 1 unbounded");

    Rat art_sum = 0;
    for (int i = 0; i < m; ++i)
        if (t.is_artificial[t.basis[i]]) art_sum += t.rhs[i];
    LPResult res;
    if (art_sum > 0) {
        res.status = LPStatus::Infeasible;
        res.farkas.resize(m);
        for (int i = 0; i < m; ++i)
            res.farkas[i] = Rat(sf.row_sign[i]) * t.row_dual(c1, sf.id_col[i]);
        if (!verify_farkas(nvars, cons, res.farkas, nonneg))
            throw InternalError("lp: Farkas certificate failed re-check");
        return res;
    }

    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (!t.is_artificial[t.basis[i]]) continue;
        for (int j = 0; j < sf.first_artificial; ++j)
            if (t.T[i][j] != 0) {
                t.pivot(i, j);
                break;
            }
    }
    for (int j = sf.first_artificial; j < t.ncols; ++j) barred[j] = true;

    // Phase 2: maximize the real objective.
    QVec c2(t.ncols, Rat(0));
    for (int j = 0; j < nvars; ++j) {
        c2[sf.col_pos[j]] = c[j];
        if (sf.col_neg[j] >= 0) c2[sf.col_neg[j]] = -c[j];
    }
    if (t.run(c2, barred, &ub_col, true) == Tableau::StepResult::Unbounded) {
        res.status = LPStatus::Unbounded;
        res.x = sf.solution();
        QVec dval(t.ncols, Rat(0));
        dval[ub_col] = 1;
        for (int i = 0; i < m; ++i) dval[t.basis[i]] = -t.T[i][ub_col];
        res.ray.assign(nvars, Rat(0));
        for (int j = 0; j < nvars; ++j) {
            res.ray[j] = dval[sf.col_pos[j]];
            if (sf.col_neg[j] >= 0) res.ray[j] -= dval[sf.col_neg[j]];
        }
        // Exact re-check: improving feasible direction.
        if (dot(c, res.ray) <= 0) throw InternalError("lp: unbounded ray not improving");
        for (std::size_t i = 0; i < cons.size(); ++i) {
            Rat v = dot(cons[i].a, res.ray);
            if (cons[i].rel == Rel::EQ ? v != 0 : v > 0)
                throw InternalError("lp: unbounded ray infeasible");
        }
        for (int j = 0; j < nvars; ++j)
            if (nonneg[j] && res.ray[j] < 0) throw InternalError("lp: ray sign");
        return res;
    }

    res.status = LPStatus::Optimal;
    res.x = sf.solution();
    res.value = dot(c, res.x);
    res.y.resize(m);
    for (int i = 0; i < m; ++i)
        res.y[i] = Rat(sf.row_sign[i]) * t.row_dual(c2, sf.id_col[i]);

    // Exact optimality re-check: primal feasibility, dual feasibility and
    // complementary slackness.
    for (std::size_t i = 0; i < cons.size(); ++i) {
        Rat v = dot(cons[i].a, res.x);
        if (cons[i].rel == Rel::EQ ? v != cons[i].b : v > cons[i].b)
            throw InternalError("lp: optimal point infeasible");
        if (cons[i].rel == Rel::LE) {
            if (res.y[i] < 0) throw InternalError("lp: dual sign");
            if (res.y[i] != 0 && v != cons[i].b) throw InternalError("lp: row slackness");
        }
    }
    for (int j = 0; j < nvars; ++j) {
        if (nonneg[j] && res.x[j] < 0) throw InternalError("lp: variable sign");
        Rat s = 0;
        for (std::size_t i = 0; i < cons.size(); ++i) s += res.y[i] * cons[i].a[j];
        if (nonneg[j]) {
            if (s < c[j]) throw InternalError("lp: dual column infeasible");
            if (res.x[j] != 0 && s != c[j]) throw InternalError("lp: column slackness");
        } else if (s != c[j]) {
            throw InternalError("lp: dual column mismatch");
        }
    }
    return res;
}

LPResult lp_solve(int nvars, const std::vector<LinCons>& cons, const QVec& c) {
    return lp_solve(nvars, cons, c, std::vector<bool>(nvars, false));
}

bool verify_refutation(int nvars, const std::vector<LinCons>& cons, const QVec& m) {
    if (m.size() != cons.size()) return false;
    bool any = false;
    for (const auto& v : m)
        if (v != 0) any = true;
    if (!any) return false;
    QVec comb(nvars, Rat(0));
    Rat rhs = 0, strict_mass = 0;
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (cons[i].rel != Rel::EQ && m[i] < 0) return false;
        if (m[i] == 0) continue;
        for (int j = 0; j < nvars; ++j) comb[j] += m[i] * cons[i].a[j];
        rhs += m[i] * cons[i].b;
        if (cons[i].rel == Rel::LT) strict_mass += m[i];
    }
    if (!is_zero_vec(comb)) return false;
    return rhs < 0 || (rhs == 0 && strict_mass > 0);
}

FeasResult lp_feasible(int nvars, const std::vector<LinCons>& cons) {
    FeasResult fr;
    bool any_strict = false;
    for (const auto& c : cons)
        if (c.rel == Rel::LT) any_strict = true;

    if (!any_strict) {
        LPResult lr = lp_solve(nvars, cons, QVec(nvars, Rat(0)));
        if (lr.status == LPStatus::Optimal) {
            fr.feasible = true;
            fr.point = lr.x;
        } else {
            fr.refutation = lr.farkas;
            if (!verify_refutation(nvars, cons, fr.refutation))
                throw InternalError("lp_feasible: refutation failed re-check");
        }
        return fr;
    }

    // Shared-gap formulation: x free, extra variable t >= 0, strict rows get
    // a.x + t <= b, cap t <= 1, maximize t. t > 0 at the optimum yields a
    // strict witness; t = 0 yields transposition multipliers from the duals.
    int nv = nvars + 1;
    std::vector<LinCons> rows;
    rows.reserve(cons.size() + 1);
    for (const auto& c : cons) {
        QVec a = c.a;
        a.push_back(c.rel == Rel::LT ? Rat(1) : Rat(0));
        rows.push_back({std::move(a), c.b, c.rel == Rel::LT ? Rel::LE : c.rel});
    }
    QVec cap(nv, Rat(0));
    cap[nvars] = 1;
    rows.push_back(cons_le(cap, Rat(1)));
    std::vector<bool> nonneg(nv, false);
    nonneg[nvars] = true;
    QVec obj(nv, Rat(0));
    obj[nvars] = 1;

    LPResult lr = lp_solve(nv, rows, obj, nonneg);
    if (lr.status == LPStatus::Unbounded) throw InternalError("lp_feasible: capped LP unbounded");
    if (lr.status == LPStatus::Optimal && lr.value > 0) {
        fr.feasible = true;
        fr.point.assign(lr.x.begin(), lr.x.begin() + nvars);
        return fr;
    }
    const QVec& mult = lr.status == LPStatus::Infeasible ? lr.farkas : lr.y;
    fr.refutation.assign(mult.begin(), mult.begin() + cons.size());
    if (!verify_refutation(nvars, cons, fr.refutation))
        throw InternalError("lp_feasible: refutation failed re-check");
    return fr;
}

}  // namespace stab
