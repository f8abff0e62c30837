// Numerical companion to the exact certificates: branch enumeration,
// stationary-point search, growth verification on grids, and perturbation
// studies that estimate calmness ratios empirically.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stab/problem.hpp"
#include "stab/stability.hpp"

namespace stab {

// One polyhedral selection of the disjunctive constraint set: fixing a piece
// in every block turns the feasibility system q(x,w) in P into an ordinary
// nonlinear program over the chosen region.
struct Branch {
    std::vector<int> choice;  // piece index per block
    Polyhedron region;
};

// All distinct branches, in lexicographic choice order. Branches whose
// region duplicates an earlier one (possible when a union block repeats a
// piece) are dropped.
std::vector<Branch> enumerate_branches(const DisjunctiveSet& P);

// Euclidean distance from a point to a polyhedron, computed by enumerating
// candidate active sets of the projection. Exact up to the linear algebra.
double distance_to_polyhedron(const Polyhedron& piece, const std::vector<double>& y);

// Distance to the disjunctive set: min over its flattened pieces.
double distance_to_set(const DisjunctiveSet& P, const std::vector<double>& y);

struct SearchConfig {
    double box_radius = 1.0;     // search box half-width around the base point
    int grid_per_dim = 7;        // Newton starts per coordinate
    int newton_iters = 80;
    double residual_tol = 1e-10; // accept a solved branch system below this
    double merge_radius = 1e-7;  // collapse points closer than this
    double snap_tol = 1e-8;      // activity snap before exact classification
    double feas_tol = 1e-9;
    double sign_tol = 1e-7;      // multiplier sign slack in the branch check
    int face_scan = 4001;        // samples for the one-dimensional face scan
    double probe_radius = 1e-3;  // local-minimality sampling radius
    int probe_count = 64;
    double locality_radius = 0.5;   // "near the base point" for study stats
    double multiplier_box = 1e6;    // box bound in the classification programs
    double class_tol = 1e-7;        // stationarity residual threshold
};

// A stationary-point candidate together with its classification. The
// classification is computed on a rationalized snapshot of the local data,
// so the stationarity flags are exact statements about a snapped problem
// within snap_tol of the numeric point.
struct FoundPoint {
    std::vector<double> x;
    int branch = 0;
    double residual = 0;  // branch system residual at acceptance
    bool kkt = false;     // branch KKT point with admissible signs
    bool m_stationary = false;
    bool b_stationary_linearized = false;
    bool b_caveat = false;  // linearized test may be weaker than the exact one
    bool local_min_candidate = false;
    double multiplier_norm = 0;  // inf-norm of the best classification multiplier
    double dist = 0;             // distance to the reference point
};

std::vector<FoundPoint> find_stationary_points(const ParamProblem& p,
                                               const std::vector<double>& w,
                                               const SearchConfig& cfg = {});

// Grid check of quadratic growth: over the box of the given radius, every
// sample must satisfy max(f(x) - f(xbar), dist(q(x), P)) >= eta*|x - xbar|^2.
// On success the attestation is HarnessVerified; on failure the worst
// violating sample and its gap are reported.
struct GrowthCheck {
    GrowthAttestation attestation;
    bool verified = false;
    std::vector<double> violation_x;
    double violation_gap = 0;
};

GrowthCheck verify_growth(const ParamProblem& p, double eta, double radius, int grid_n);

struct PerturbSample {
    std::vector<double> w;
    ErrorMeasures err;
    std::vector<FoundPoint> found;
    double feas_dist = 0;       // distance from the base point to the perturbed
                                // feasible set (0 when it stays feasible)
    double dist_min = 0;        // min distance over found points, inf when none
    double dist_max_local = 0;  // max distance over found points within the
                                // locality radius, 0 when none
    int n_local = 0;
};

// sup of dist_max_local / tau_l over the samples, with a crude consistency
// probe: the sup over the first half of the grid must already be within a
// factor two of the full sup, otherwise the ratio is still drifting and the
// bound should not be trusted.
struct RatioEstimate {
    int order = 1;
    bool any = false;
    double sup = 0;
    std::vector<double> arg_w;
    double sup_first_half = 0;
    bool consistent = true;
    std::string grid_note;
};

struct PerturbStudy {
    std::string problem;
    int order = 1;
    std::vector<PerturbSample> samples;
    RatioEstimate ratio;
};

PerturbStudy run_perturbation_study(const ParamProblem& p,
                                    const std::vector<std::vector<double>>& w_grid,
                                    int order, const SearchConfig& cfg = {});

// Deterministic low-discrepancy samples of the directional neighborhood
//   { z : |z| <= rho, | |u| z - |z| u | <= delta |z| |u| },
// which is the full rho-ball when u = 0. Every returned point satisfies the
// defining inequality by construction.
std::vector<std::vector<double>> directional_sampler(const std::vector<double>& u,
                                                     double rho, double delta,
                                                     int count = 64);

// CSV table of a study, one row per sample:
//   omega_1..omega_s, e1, e2, tau1, tau2, feas_dist, n_points, dist_min,
//   dist_max_local
// dist_min prints "inf" when no point was found.
void write_study_csv(std::ostream& os, const PerturbStudy& st);

// JSON companion with the full per-point listings.
std::string study_json(const PerturbStudy& st);

}  // namespace stab
