#include "stab/cone.hpp"

#include "stab/linalg.hpp"

#include <algorithm>
#include <set>

namespace stab {

namespace {

// Incremental double description with explicit lineality handling. State is
// (B, R): the current cone is span(B) + cone(R), span(B) is exactly the
// kernel of the rows processed so far, and no ray lies in span(B), which
// keeps the ray part pointed modulo span(B) so the combinatorial adjacency
// test below is valid.
struct DDState {
    int dim;
    std::vector<QVec> B;
    std::vector<QVec> R;
    std::vector<std::set<int>> zero_sets;  // per ray: processed ineq rows tight on it
    int n_processed = 0;

    explicit DDState(int d) : dim(d) {
        for (int j = 0; j < d; ++j) {
            QVec e(d, Rat(0));
            e[j] = 1;
            B.push_back(e);
        }
    }

    void process(const QVec& a, bool equality) {
        if (equality) {
            process_ineq(a);
            process_ineq(vneg(a));
            return;
        }
        process_ineq(a);
    }

    void process_ineq(const QVec& a) {
        int row_id = n_processed++;
        // Lineality reduction: if some basis vector leaves the hyperplane,
        // use it to project everything else onto {a z = 0} and demote it to
        // a ray on the correct side.
        int star = -1;
        for (std::size_t i = 0; i < B.size(); ++i)
            if (dot(a, B[i]) != 0) {
                star = static_cast<int>(i);
                break;
            }
        if (star >= 0) {
            QVec bs = B[static_cast<std::size_t>(star)];
            Rat abs_val = dot(a, bs);
            if (abs_val > 0) {
                bs = vneg(bs);
                abs_val = -abs_val;
            }
            std::vector<QVec> nb;
            for (std::size_t i = 0; i < B.size(); ++i) {
                if (static_cast<int>(i) == star) continue;
                const QVec& b = B[i];
                nb.push_back(vsub(b, vscale(dot(a, b) / abs_val, bs)));
            }
            for (std::size_t i = 0; i < R.size(); ++i) {
                Rat ar = dot(a, R[i]);
                if (ar != 0) R[i] = vsub(R[i], vscale(ar / abs_val, bs));
                zero_sets[i].insert(row_id);
            }
            B = std::move(nb);
            R.push_back(canonical_ray(bs));
            // The demoted vector came from the kernel of every earlier row,
            // so it is tight on all of them and strictly negative on this one.
            std::set<int> prior;
            for (int j = 0; j < row_id; ++j) prior.insert(j);
            zero_sets.push_back(std::move(prior));
            return;
        }
        // Ray step: a vanishes on span(B). Split rays by sign.
        std::vector<int> neg, zero, pos;
        std::vector<Rat> val(R.size());
        for (std::size_t i = 0; i < R.size(); ++i) {
            val[i] = dot(a, R[i]);
            if (val[i] < 0)
                neg.push_back(static_cast<int>(i));
            else if (val[i] == 0)
                zero.push_back(static_cast<int>(i));
            else
                pos.push_back(static_cast<int>(i));
        }
        std::vector<QVec> nr;
        std::vector<std::set<int>> nz;
        for (int i : neg) {
            nr.push_back(R[i]);
            nz.push_back(zero_sets[i]);
        }
        for (int i : zero) {
            nr.push_back(R[i]);
            auto z = zero_sets[i];
            z.insert(row_id);
            nz.push_back(std::move(z));
        }
        for (int ip : pos)
            for (int in : neg) {
                if (!adjacent(ip, in)) continue;
                QVec combo = vsub(vscale(val[ip], R[in]), vscale(val[in], R[ip]));
                combo = canonical_ray(combo);
                if (is_zero_vec(combo)) continue;
                std::set<int> z;
                std::set_intersection(zero_sets[ip].begin(), zero_sets[ip].end(),
                                      zero_sets[in].begin(), zero_sets[in].end(),
                                      std::inserter(z, z.begin()));
                z.insert(row_id);
                // Dedup combinatorially identical rays.
                bool dup = false;
                for (std::size_t k = 0; k < nr.size(); ++k)
                    if (nr[k] == combo) {
                        dup = true;
                        break;
                    }
                if (!dup) {
                    nr.push_back(std::move(combo));
                    nz.push_back(std::move(z));
                }
            }
        R = std::move(nr);
        zero_sets = std::move(nz);
    }

    // r1, r2 adjacent iff no third ray's zero set contains the intersection
    // of theirs (valid in the pointed quotient modulo span(B)).
    bool adjacent(int r1, int r2) const {
        std::set<int> common;
        std::set_intersection(zero_sets[r1].begin(), zero_sets[r1].end(),
                              zero_sets[r2].begin(), zero_sets[r2].end(),
                              std::inserter(common, common.begin()));
        for (std::size_t k = 0; k < R.size(); ++k) {
            if (static_cast<int>(k) == r1 || static_cast<int>(k) == r2) continue;
            if (std::includes(zero_sets[k].begin(), zero_sets[k].end(), common.begin(),
                              common.end()))
                return false;
        }
        return true;
    }
};

}  // namespace

ConvexCone::Generators ConvexCone::generators() const {
    DDState dd(dim);
    for (int i = 0; i < H.rows; ++i) dd.process(H.row(i), true);
    for (int i = 0; i < G.rows; ++i) dd.process(G.row(i), false);
    Generators g;
    for (auto& r : dd.R) g.rays.push_back(canonical_ray(r));
    for (auto& b : dd.B) g.lin.push_back(canonical_ray(b));
    // Sanity: every generator must satisfy the H-representation.
    for (const auto& r : g.rays)
        if (!contains(r)) throw InternalError("DD: ray violates cone");
    for (const auto& l : g.lin)
        if (!contains(l) || !contains(vneg(l))) throw InternalError("DD: lineality violates cone");
    return g;
}

bool ConvexCone::contains(const QVec& z) const {
    if (static_cast<int>(z.size()) != dim) throw InputError("cone contains: size");
    for (int i = 0; i < G.rows; ++i)
        if (dot(G.row(i), z) > 0) return false;
    for (int i = 0; i < H.rows; ++i)
        if (dot(H.row(i), z) != 0) return false;
    return true;
}

ConvexCone ConvexCone::from_generators(int d, const std::vector<QVec>& rays,
                                       const std::vector<QVec>& lin) {
    // The polar of the generated cone has the generators as H-rep rows;
    // dualizing its generator description recovers an H-rep of the original.
    ConvexCone pol(d);
    for (const auto& r : rays) pol.add_ineq(r);
    for (const auto& l : lin) pol.add_eq(l);
    Generators pg = pol.generators();
    ConvexCone out(d);
    for (const auto& r : pg.rays) out.add_ineq(r);
    for (const auto& l : pg.lin) out.add_eq(l);
    return out;
}

ConvexCone ConvexCone::polar() const {
    std::vector<QVec> rays, lin;
    for (int i = 0; i < G.rows; ++i) rays.push_back(G.row(i));
    for (int i = 0; i < H.rows; ++i) lin.push_back(H.row(i));
    return from_generators(dim, rays, lin);
}

bool ConvexCone::is_trivial() const {
    Generators g = generators();
    return g.rays.empty() && g.lin.empty();
}

bool ConvexCone::subset_of(const ConvexCone& other) const {
    Generators g = generators();
    for (const auto& r : g.rays)
        if (!other.contains(r)) return false;
    for (const auto& l : g.lin)
        if (!other.contains(l) || !other.contains(vneg(l))) return false;
    return true;
}

bool ConvexCone::set_equal(const ConvexCone& other) const {
    return subset_of(other) && other.subset_of(*this);
}

std::vector<LinCons> ConvexCone::to_cons() const {
    std::vector<LinCons> cons;
    for (int i = 0; i < G.rows; ++i) cons.push_back(cons_le(G.row(i), Rat(0)));
    for (int i = 0; i < H.rows; ++i) cons.push_back(cons_eq(H.row(i), Rat(0)));
    return cons;
}

std::vector<QVec> ConvexCone::span() const {
    Generators g = generators();
    std::vector<QVec> vecs = g.rays;
    vecs.insert(vecs.end(), g.lin.begin(), g.lin.end());
    return span_basis(vecs, dim);
}

ConvexCone intersect(const ConvexCone& a, const ConvexCone& b) {
    if (a.dim != b.dim) throw InputError("cone intersect: dim mismatch");
    ConvexCone c = a;
    for (int i = 0; i < b.G.rows; ++i) c.add_ineq(b.G.row(i));
    for (int i = 0; i < b.H.rows; ++i) c.add_eq(b.H.row(i));
    return c;
}

ConvexCone product(const ConvexCone& a, const ConvexCone& b) {
    ConvexCone c(a.dim + b.dim);
    auto emb = [&](const QMat& M, int offset) {
        std::vector<QVec> rows;
        for (int i = 0; i < M.rows; ++i) {
            QVec r(c.dim, Rat(0));
            for (int j = 0; j < M.cols; ++j) r[offset + j] = M.at(i, j);
            rows.push_back(std::move(r));
        }
        return rows;
    };
    for (auto& r : emb(a.G, 0)) c.add_ineq(r);
    for (auto& r : emb(a.H, 0)) c.add_eq(r);
    for (auto& r : emb(b.G, a.dim)) c.add_ineq(r);
    for (auto& r : emb(b.H, a.dim)) c.add_eq(r);
    return c;
}

Verdict cone_nontrivial(const ConvexCone& c, const QMat& extra_eq) {
    if (extra_eq.rows > 0 && extra_eq.cols != c.dim)
        throw InputError("cone_nontrivial: extra_eq column count mismatch");
    std::vector<LinCons> base = c.to_cons();
    for (int i = 0; i < extra_eq.rows; ++i)
        base.push_back(cons_eq(extra_eq.row(i), Rat(0)));
    // Any nonzero point of a cone scales (by a positive factor) to one with
    // some coordinate equal to +1 or -1, so 2*dim feasibility probes decide.
    for (int k = 0; k < c.dim; ++k) {
        for (int sgn : {1, -1}) {
            std::vector<LinCons> cons = base;
            QVec ek(c.dim, Rat(0));
            ek[k] = Rat(1);
            cons.push_back(cons_eq(ek, Rat(sgn)));
            FeasResult fr = lp_feasible(c.dim, cons);
            if (fr.feasible) {
                Verdict v = Verdict::make_holds("nonzero point found", "normalization-lp");
                v.with_witness(std::move(fr.point));
                return v;
            }
        }
    }
    return Verdict::make_fails("all 2*dim normalization probes infeasible", "normalization-lp");
}

std::vector<ConeFace> enumerate_faces(const ConvexCone& c) {
    std::vector<ConeFace> out;
    int g = c.G.rows;
    // Subset enumeration with exact relative-interior feasibility per face.
    for (unsigned long mask = 0; mask < (1ul << g); ++mask) {
        std::vector<LinCons> cons;
        std::vector<int> active;
        for (int i = 0; i < g; ++i) {
            if (mask & (1ul << i)) {
                cons.push_back(cons_eq(c.G.row(i), Rat(0)));
                active.push_back(i);
            } else {
                cons.push_back(cons_lt(c.G.row(i), Rat(0)));
            }
        }
        for (int i = 0; i < c.H.rows; ++i) cons.push_back(cons_eq(c.H.row(i), Rat(0)));
        FeasResult fr = lp_feasible(c.dim, cons);
        if (fr.feasible) out.push_back({std::move(active), std::move(fr.point)});
    }
    return out;
}

}  // namespace stab
