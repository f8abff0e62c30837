#include "stab/disjunctive.hpp"

namespace stab {

namespace {

Polyhedron orthant_nonpos(int k) {
    Polyhedron p(k);
    for (int i = 0; i < k; ++i) {
        QVec a(k, Rat(0));
        a[i] = 1;
        p.add_ineq(a, 0);
    }
    return p;
}

Polyhedron all_zero(int k) {
    Polyhedron p(k);
    for (int i = 0; i < k; ++i) {
        QVec a(k, Rat(0));
        a[i] = 1;
        p.add_eq(a, 0);
    }
    return p;
}

// Helper for the 2d complementarity pieces: rows over (y1, y2).
Polyhedron piece2(std::initializer_list<std::tuple<Rat, Rat, bool>> rows) {
    Polyhedron p(2);
    for (const auto& [c1, c2, is_eq] : rows) {
        if (is_eq)
            p.add_eq({c1, c2}, 0);
        else
            p.add_ineq({c1, c2}, 0);
    }
    return p;
}

}  // namespace

Block Block::nonpos(int k) {
    Block b;
    b.kind = Kind::NonPos;
    b.dim = k;
    b.pieces = {orthant_nonpos(k)};
    return b;
}

Block Block::zero(int k) {
    Block b;
    b.kind = Kind::Zero;
    b.dim = k;
    b.pieces = {all_zero(k)};
    return b;
}

Block Block::free_block(int k) {
    Block b;
    b.kind = Kind::Free;
    b.dim = k;
    b.pieces = {Polyhedron(k)};
    return b;
}

Block Block::ec() {
    Block b;
    b.kind = Kind::EC;
    b.dim = 2;
    b.pieces = {
        piece2({{1, 0, false}, {0, 1, true}}),   // y1 <= 0, y2 = 0
        piece2({{1, 0, true}, {0, 1, false}}),   // y1 = 0, y2 <= 0
    };
    return b;
}

Block Block::vc() {
    Block b;
    b.kind = Kind::VC;
    b.dim = 2;
    b.pieces = {
        piece2({{-1, 0, false}, {0, 1, false}}),  // y1 >= 0, y2 <= 0
        piece2({{1, 0, true}, {0, -1, false}}),   // y1 = 0, y2 >= 0
    };
    return b;
}

Block Block::union_of(std::vector<Polyhedron> pieces) {
    if (pieces.empty()) throw InputError("union block needs at least one piece");
    Block b;
    b.kind = Kind::Union;
    b.dim = pieces[0].dim;
    for (const auto& p : pieces)
        if (p.dim != b.dim) throw InputError("union block pieces disagree on dimension");
    b.pieces = std::move(pieces);
    return b;
}

bool Block::contains(const QVec& y) const {
    for (const auto& p : pieces)
        if (p.contains(y)) return true;
    return false;
}

bool DisjunctiveSet::contains(const QVec& y) const {
    if ((int)y.size() != dim) throw InputError("contains: dimension mismatch");
    int off = 0;
    for (const auto& b : blocks) {
        QVec yb(y.begin() + off, y.begin() + off + b.dim);
        if (!b.contains(yb)) return false;
        off += b.dim;
    }
    return true;
}

int DisjunctiveSet::block_offset(int bi) const {
    int off = 0;
    for (int i = 0; i < bi; ++i) off += blocks[i].dim;
    return off;
}

QVec DisjunctiveSet::block_slice(const QVec& y, int bi) const {
    int off = block_offset(bi);
    return QVec(y.begin() + off, y.begin() + off + blocks[bi].dim);
}

DisjunctiveSet::Flattened DisjunctiveSet::flatten() const {
    Flattened out;
    // Start from the 0-dimensional empty product and extend block by block.
    out.pieces.push_back(Polyhedron(0));
    out.choices.push_back({});
    int off = 0;
    for (const auto& b : blocks) {
        std::vector<Polyhedron> next;
        std::vector<std::vector<int>> next_choices;
        for (size_t f = 0; f < out.pieces.size(); ++f) {
            for (size_t k = 0; k < b.pieces.size(); ++k) {
                const Polyhedron& prev = out.pieces[f];
                const Polyhedron& pc = b.pieces[k];
                Polyhedron ext(off + b.dim);
                for (int r = 0; r < prev.A.rows; ++r) {
                    QVec row = prev.A.row(r);
                    row.resize(off + b.dim, Rat(0));
                    if (prev.eq[r])
                        ext.add_eq(row, prev.b[r]);
                    else
                        ext.add_ineq(row, prev.b[r]);
                }
                for (int r = 0; r < pc.A.rows; ++r) {
                    QVec row(off + b.dim, Rat(0));
                    for (int j = 0; j < b.dim; ++j) row[off + j] = pc.A.at(r, j);
                    if (pc.eq[r])
                        ext.add_eq(row, pc.b[r]);
                    else
                        ext.add_ineq(row, pc.b[r]);
                }
                next.push_back(std::move(ext));
                auto ch = out.choices[f];
                ch.push_back((int)k);
                next_choices.push_back(std::move(ch));
            }
        }
        out.pieces = std::move(next);
        out.choices = std::move(next_choices);
        off += b.dim;
    }
    return out;
}

}  // namespace stab
