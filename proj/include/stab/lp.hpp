// Exact rational linear programming with certificate extraction.
//
// Solver: two-phase dense-tableau simplex with Bland's rule (guaranteed
// termination). Optimal solves return dual multipliers per input row;
// infeasible solves return Farkas multipliers. Strict inequalities are
// handled by a shared gap variable; empty strict systems yield Motzkin
// transposition multipliers. Every certificate is re-verified in rational
// arithmetic before it is returned; a failed re-check is an internal error.
#pragma once

#include "stab/rational.hpp"
#include "stab/verdict.hpp"

#include <optional>

namespace stab {

enum class Rel { LE, EQ, LT };  // a.x <= b, a.x == b, a.x < b

struct LinCons {
    QVec a;
    Rat b;
    Rel rel = Rel::LE;
};

inline LinCons cons_le(QVec a, Rat b) { return {std::move(a), std::move(b), Rel::LE}; }
inline LinCons cons_eq(QVec a, Rat b) { return {std::move(a), std::move(b), Rel::EQ}; }
inline LinCons cons_lt(QVec a, Rat b) { return {std::move(a), std::move(b), Rel::LT}; }

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    QVec x;      // primal optimum (Optimal)
    Rat value;   // objective value at x (Optimal)
    QVec y;      // per-row duals (Optimal): value == sum_i y_i b_i + free-var part
    QVec farkas; // per-row multipliers (Infeasible): see verify_farkas
    QVec ray;    // unbounded improving direction (Unbounded)
};

// Maximize c.x subject to cons (Rel::LE / Rel::EQ rows only; Rel::LT rejected).
// nonneg[j] marks variables constrained to x_j >= 0; free variables are split
// internally. Throws InputError on malformed input.
LPResult lp_solve(int nvars, const std::vector<LinCons>& cons, const QVec& c,
                  const std::vector<bool>& nonneg);

// Convenience: all variables free.
LPResult lp_solve(int nvars, const std::vector<LinCons>& cons, const QVec& c);

// Farkas check for LE/EQ systems: f_i >= 0 on LE rows, sum_i f_i a_i = 0
// (componentwise >= 0 on nonneg variables), sum_i f_i b_i < 0. Exact.
bool verify_farkas(int nvars, const std::vector<LinCons>& cons, const QVec& f);
bool verify_farkas(int nvars, const std::vector<LinCons>& cons, const QVec& f,
                   const std::vector<bool>& nonneg);

// Feasibility of a mixed system that may contain strict rows.
struct FeasResult {
    bool feasible = false;
    QVec point;    // witness satisfying every row (strictly where required)
    // Refutation multipliers m, one per row: m_i >= 0 on LE and LT rows,
    // sum m_i a_i = 0, and either sum m_i b_i < 0, or sum m_i b_i == 0 with
    // m_i > 0 for at least one LT row (Motzkin transposition).
    QVec refutation;
};

FeasResult lp_feasible(int nvars, const std::vector<LinCons>& cons);

// Exact check of a FeasResult refutation against the system.
bool verify_refutation(int nvars, const std::vector<LinCons>& cons, const QVec& m);

}  // namespace stab
