#include "stab/quadratic.hpp"

#include "stab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>

namespace stab {

namespace {

Rat rayleigh(const QMat& Q, const QVec& z) {
    Rat num = 0, den = 0;
    QVec Qz = Q.mul(z);
    for (std::size_t i = 0; i < z.size(); ++i) {
        num += z[i] * Qz[i];
        den += z[i] * z[i];
    }
    if (den == 0) throw InternalError("rayleigh: zero vector");
    return num / den;
}

// Exact restriction B^T Q B for a list of basis vectors.
QMat restrict_form(const QMat& Q, const std::vector<QVec>& basis) {
    int k = static_cast<int>(basis.size());
    QMat R(k, k);
    for (int i = 0; i < k; ++i) {
        QVec Qbi = Q.mul(basis[i]);
        for (int j = 0; j < k; ++j) R.at(i, j) = dot(Qbi, basis[j]);
    }
    return R;
}

}  // namespace

QuadResult max_quadratic_on_cone(const QMat& Q, const ConvexCone& C, double tol) {
    if (Q.rows != C.dim || Q.cols != C.dim) throw InputError("max_quadratic: shape");
    QuadResult res;
    ConvexCone::Generators gen = C.generators();
    if (gen.rays.empty() && gen.lin.empty()) {
        res.sign = QSign::Negative;
        res.exact = true;
        res.note = "cone is trivial";
        res.best = 0.0;
        res.upper = 0.0;
        return res;
    }

    std::vector<QVec> gens = gen.rays;
    gens.insert(gens.end(), gen.lin.begin(), gen.lin.end());
    std::vector<QVec> spanb = span_basis(gens, C.dim);

    // Form vanishes identically on span(C): the supremum is exactly zero.
    if (restrict_form(Q, spanb).is_zero()) {
        res.sign = QSign::Zero;
        res.exact = true;
        res.witness = gens.front();
        res.best = 0.0;
        res.upper = 0.0;
        res.note = "form vanishes on span";
        return res;
    }

    // One-dimensional span: a single exact Rayleigh value decides.
    if (spanb.size() == 1) {
        Rat v = rayleigh(Q, gens.front());
        res.best = to_double(v);
        res.upper = res.best;
        res.exact = true;
        res.witness = gens.front();
        if (v > 0)
            res.sign = QSign::Positive;
        else if (v == 0)
            res.sign = QSign::Zero;
        else
            res.sign = QSign::Negative;
        res.note = "one-dimensional span, exact value";
        return res;
    }

    bool have_exact_lo = false;
    Rat exact_lo = 0;
    QVec exact_lo_witness;
    auto offer_exact = [&](const QVec& z) {
        Rat v = rayleigh(Q, z);
        if (!have_exact_lo || v > exact_lo) {
            have_exact_lo = true;
            exact_lo = v;
            exact_lo_witness = z;
        }
    };
    for (const auto& r : gen.rays) offer_exact(r);
    for (const auto& l : gen.lin) offer_exact(l);

    double float_hi = to_double(exact_lo);
    bool uncertain_candidates = false;

    // Face enumeration: for every subset of inequality rows, restrict to the
    // subspace where they (and all equations) vanish and take eigenvectors.
    int g = C.G.rows;
    if (g > 20) throw InputError("max_quadratic: too many inequality rows");
    for (unsigned long mask = 0; mask < (1ul << g); ++mask) {
        QMat M = C.H;
        if (M.cols == 0) M = QMat(0, C.dim);
        for (int i = 0; i < g; ++i)
            if (mask & (1ul << i)) M.append_row(C.G.row(i));
        std::vector<QVec> K = kernel_basis(M);
        int k = static_cast<int>(K.size());
        if (k == 0) continue;
        QMat A = restrict_form(Q, K);
        QMat B = restrict_form(QMat::identity(C.dim), K);  // Gram matrix
        Eigen::MatrixXd Af(k, k), Bf(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                Af(i, j) = to_double(A.at(i, j));
                Bf(i, j) = to_double(B.at(i, j));
            }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Af, Bf);
        if (es.info() != Eigen::Success) {
            uncertain_candidates = true;
            float_hi = std::numeric_limits<double>::infinity();
            continue;
        }
        for (int e = 0; e < k; ++e) {
            double sigma = es.eigenvalues()(e);
            // Rationalize the coordinate vector and test cone membership of
            // the exact candidate (both orientations).
            QVec coef(k);
            for (int i = 0; i < k; ++i) coef[i] = rat_of_double(es.eigenvectors()(i, e));
            QVec z(C.dim, Rat(0));
            for (int i = 0; i < k; ++i) z = vadd(z, vscale(coef[i], K[i]));
            if (is_zero_vec(z)) continue;
            z = canonical_ray(z);
            if (C.contains(z)) {
                offer_exact(z);
            } else if (C.contains(vneg(z))) {
                offer_exact(vneg(z));
            } else {
                // Candidate outside the cone: its value constrains nothing
                // exactly, but a large one blocks a Negative verdict.
                uncertain_candidates = true;
                float_hi = std::max(float_hi, sigma);
            }
        }
    }

    res.best = have_exact_lo ? to_double(exact_lo) : float_hi;
    res.upper = float_hi;
    if (have_exact_lo && exact_lo > 0) {
        res.sign = QSign::Positive;
        res.exact = true;
        res.witness = exact_lo_witness;
        res.note = "exact witness";
        return res;
    }
    if (float_hi < -tol) {
        res.sign = QSign::Negative;
        res.exact = false;
        res.note = "all candidates below -tol";
        res.best = float_hi;
        return res;
    }
    if (have_exact_lo && exact_lo == 0 && float_hi <= tol) {
        res.sign = QSign::Zero;
        res.exact = true;  // the witness attains exactly zero
        res.witness = exact_lo_witness;
        res.note = "exact zero witness, remainder pinched";
        return res;
    }
    if (have_exact_lo && exact_lo == 0) {
        // Still an exact certificate that the supremum is >= 0.
        res.sign = QSign::Zero;
        res.exact = true;
        res.witness = exact_lo_witness;
        res.note = "exact zero witness, larger float candidates remain";
        return res;
    }
    res.sign = QSign::Inconclusive;
    res.note = uncertain_candidates ? "boundary candidates could not be certified"
                                    : "no candidate settled the sign";
    return res;
}

}  // namespace stab
