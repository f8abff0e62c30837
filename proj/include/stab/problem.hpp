// Parametric problem data: exact reference quantities at the point under
// study plus optional closed-form expressions for evaluation away from it.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stab/disjunctive.hpp"
#include "stab/expr.hpp"
#include "stab/rational.hpp"

namespace stab {

// Exact data at the reference point: constraint value, first and second
// derivatives, objective derivatives, and optionally a base field F with
// its Jacobian for the variant error measure. All entries are rational and
// authoritative; expressions must reproduce them where differentiable.
struct ReferenceData {
    int n = 0;  // decision variables
    int m = 0;  // constraint rows
    int s = 0;  // parameters
    DisjunctiveSet P;
    QVec qbar;               // q(xbar, wbar), must lie in P
    QMat J;                  // m x n Jacobian of q in x
    std::vector<QMat> Hq;    // m Hessians, each n x n
    QVec grad_f;             // n
    QMat Hf;                 // n x n
    bool has_F = false;
    QVec Fbar;               // n
    QMat JF;                 // n x n

    void validate() const;
    // Hessian of lambda^T q.
    QMat Qmat(const QVec& lambda) const;
};

struct ExprSet {
    Expr f;
    std::vector<Expr> q;  // m entries
    std::vector<Expr> F;  // empty or n entries
};

struct ParamProblem {
    std::string name;
    ReferenceData ref;
    QVec xbar;  // n
    QVec wbar;  // s
    std::optional<ExprSet> exprs;
    std::vector<std::string> nondiff;  // names exempt from the consistency check

    bool has_expressions() const { return exprs.has_value(); }
    std::vector<double> xbar_d() const;
    std::vector<double> wbar_d() const;
};

// Parse the structured problem format (see docs/problem-format.md). Throws
// ParseError with a line number on malformed input, InputError on
// inconsistent data. Expression derivatives are checked against the
// reference data unless the entry is flagged nondifferentiable_at_ref.
ParamProblem parse_problem(const std::string& text, const std::string& name = "");
ParamProblem load_problem(const std::string& path);

// Compare expression values/derivatives at the reference point against the
// rational reference entries; tolerance is absolute over max(1, |ref|).
void check_consistency(const ParamProblem& p, double tol = 1e-8);

enum class NormKind { Spectral, Frobenius };

// Perturbation sizes at the reference x for a parameter value w: e_l
// combines the Jacobian drift with the l-th root of the value drift; tau_l
// adds the objective-gradient drift, the hat variants the base-field drift.
struct ErrorMeasures {
    double e1 = 0, e2 = 0;
    double tau1 = 0, tau2 = 0;
    bool has_hat = false;
    double tau1_hat = 0, tau2_hat = 0;
};

ErrorMeasures error_measures(const ParamProblem& p, const std::vector<double>& w,
                             NormKind norm = NormKind::Spectral);

// Expression evaluation bundle at a float point.
struct QFEval {
    std::vector<double> q;                // m
    std::vector<std::vector<double>> gq;  // m gradients, each n
    std::vector<std::vector<double>> hq;  // m Hessians, each n*n row-major
    double f = 0;
    std::vector<double> gf;               // n
    std::vector<double> hf;               // n*n
    std::vector<double> F;                // empty or n
};

QFEval eval_qf(const ParamProblem& p, const std::vector<double>& x,
               const std::vector<double>& w);

}  // namespace stab
