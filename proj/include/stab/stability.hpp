// Stability analysis at the reference point: stationarity tests, multiplier
// sets, and certificates for upper Lipschitz / upper Hoelder bounds on the
// stationary-solution map under parameter perturbations.
//
// The certificates are one-sided sufficient conditions. Holds means the
// condition was established (exactly, or within the documented tolerance);
// Fails means the condition itself is refuted by an exact witness, which
// does not by itself prove instability. Every Fails witness is re-verified
// in rational arithmetic against the full defining system before it is
// reported.
#pragma once

#include "stab/cq.hpp"
#include "stab/polyhedron.hpp"

namespace stab {

// Union of polyhedral pieces in multiplier space. Each piece is tagged with
// the discrete branch pattern that produced it; pieces are nonempty and may
// overlap, the represented set is their union.
struct MultiplierSet {
    int dim = 0;
    struct Piece {
        CellSignature tag;
        Polyhedron poly;
    };
    std::vector<Piece> pieces;

    bool empty() const { return pieces.empty(); }
    bool contains(const QVec& lam) const;
    bool subset_of(const MultiplierSet& o) const;  // exact region containment
    bool set_equal(const MultiplierSet& o) const;
};

// Provenance of a quadratic-growth statement about the objective at the
// reference point. The checks here never establish growth on their own; it
// is either asserted by the caller or verified by the sampling harness.
struct GrowthAttestation {
    enum class Source { None, UserAsserted, HarnessVerified };
    Source source = Source::None;
    double eta = 0;     // growth constant
    double radius = 0;  // neighborhood radius covered by the attestation
    long grid = 0;      // sample count behind a harness verification

    bool attested() const { return source != Source::None; }
    std::string describe() const;
};

struct StabilityReport {
    Verdict b_stationary;  // linearized test; exact under metric subregularity
    Verdict m_stationary;
    Verdict rsssoc;
    Verdict lipschitz_cert;
    Verdict hoelder_cert;
    bool existence_flag = false;  // perturbed problems keep stationary points
    std::string existence_reason;
};

// M-stationarity: some multiplier in the limiting normal cone solves the
// stationarity equation. Exact both ways; Holds carries the multiplier.
Verdict check_m_stationary(const ReferenceData& ref);

// Linearized B-stationarity: no piece of the linearized cone contains a
// descent direction of the objective. Equals B-stationarity whenever the
// constraint system is metrically subregular; the reason records the caveat.
Verdict check_b_stationary_linearized(const ReferenceData& ref);

// Directions in the linearized cone along which the objective does not
// ascend, and its arrangement cells (nonzero, sign-refined).
ConeUnion critical_cone(const ReferenceData& ref);
std::vector<SignedCell> critical_cells(const ReferenceData& ref);

// Multipliers attached to one critical cell: directional limiting normals at
// the cell representative intersected with the stationarity equation. The
// cell must be one of critical_cells(ref); anything else is an InputError.
MultiplierSet lambda1_set(const ReferenceData& ref, const CellSignature& cell);

// Second-order condition over the critical cone: every multiplier attached
// to a critical direction gives the Lagrangian Hessian a positive value on
// it. Vacuously Holds when the critical cone is trivial. Fails carries an
// exact pair {u, lambda} with value <= 0.
Verdict check_rsssoc(const ReferenceData& ref, double tol = 1e-9);

// Nonexistence certificate for the first-order perturbation system: no
// direction u in the linearized cone admits multipliers (lambda, mu) with
//   lambda in N(qbar; P; Ju),  F + J^T lambda = 0,
//   mu in T(lambda; N(qbar; P; Ju)),  JF u + Q(lambda) u + J^T mu = 0.
// Holds certifies upper Lipschitz bounds when the order-1 residual property
// is available. use_F switches the base field from the objective gradient to
// the supplied F. Fails witness: {u, lambda, mu}.
Verdict check_lipschitz_certificate(const ReferenceData& ref, bool use_F = false);

// Same for the second-order system, which extends the triple by v with
//   Jv + u^T Hq u in T(qbar; union of active pieces),
//   u^T Q(lambda) u = F . v.
// A cell refuted for the first-order system is refuted here as well; the
// checks share the exact infeasibility ladder. Fails witness: {u, lambda,
// mu, v}.
Verdict check_hoelder_certificate(const ReferenceData& ref, bool use_F = false);

// Combined stability report. Routes, in order of preference:
//   upper Lipschitz: first-order cone condition + second-order sufficiency,
//     else the direct nonexistence certificate;
//   upper Hoelder: directional second-order condition + attested growth,
//     else implied by the Lipschitz certificate, else the direct system.
// Constituent verdicts are reported unchanged; a theorem route never
// overrides a Fails of its own ingredients.
StabilityReport check_stab_via_thm2(const ReferenceData& ref, const GrowthAttestation& growth,
                                    double tol = 1e-9);

// ---- Complementarity-structured specializations -----------------------

// Row layout [inequalities][equalities][pairs...], where each pair occupies
// two consecutive rows constrained to the complementarity corner set.
struct MpecLayout {
    int n_ineq = 0;
    int n_eq = 0;
    int n_pairs = 0;
    int ineq_row(int i) const { return i; }
    int eq_row(int i) const { return n_ineq + i; }
    int pair_row(int j, int comp) const { return n_ineq + n_eq + 2 * j + comp; }
};

// Throws InputError unless the blocks are laid out as above.
MpecLayout mpec_layout(const ReferenceData& ref);

// Active-set structure at the reference point or relative to a direction.
// Pairs are classified by which branch of the corner set they sit on.
struct MpecActivity {
    std::vector<int> ineq_active;    // inequality rows at their bound
    std::vector<int> first_branch;   // pairs on the first branch (second row zero)
    std::vector<int> second_branch;  // pairs on the second branch (first row zero)
    std::vector<int> biactive;       // pairs at the corner
};
MpecActivity mpec_index_sets(const ReferenceData& ref);
// Directional refinement on a direction u from the linearized cone: rows
// active along u, biactive pairs split by the branch the direction enters.
MpecActivity mpec_index_sets_dir(const ReferenceData& ref, const QVec& u);

// Multipliers certifying M-stationarity, assembled per complementarity
// branch pattern. Tags carry one entry per biactive pair: -1 first
// component pinned to zero, +1 second component pinned, 0 both sign-bound.
MultiplierSet mpec_multiplier_set(const ReferenceData& ref);

// Lipschitz / Hoelder certificates built from closed-form sign conditions
// on the pair structure instead of generic cone objects. Agrees with the
// general-path checks on every complementarity-structured instance.
struct MpecCertificates {
    Verdict lipschitz;
    Verdict hoelder;
};
MpecCertificates check_mpec_certificates(const ReferenceData& ref);

// Classical upper Lipschitz criterion for inequality/equality systems: at
// every enumerated multiplier (vertices and extreme rays of the multiplier
// polyhedron), the auxiliary system in (u, alpha, beta) admits only u = 0.
// Requires metric regularity at the reference point; reports Inconclusive
// with reason "not applicable" otherwise. Fails witness: {lambda, u, alpha,
// beta}.
Verdict check_nlp_klatte_kummer(const ReferenceData& ref);

}  // namespace stab
