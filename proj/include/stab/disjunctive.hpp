// Disjunctive constraint sets: ordered blocks of standard shapes (nonpositive
// orthant, zero, free, two complementarity shapes) and explicit polyhedral
// unions, forming P = B_1 x ... x B_r.
#pragma once

#include "stab/polyhedron.hpp"

namespace stab {

struct Block {
    enum class Kind { NonPos, Zero, Free, EC, VC, Union };
    Kind kind = Kind::Free;
    int dim = 0;
    std::vector<Polyhedron> pieces;  // block coordinates; union of these

    static Block nonpos(int k);
    static Block zero(int k);
    static Block free_block(int k);
    // { (a, b) : a <= 0, b <= 0, ab = 0 } as a two-piece union.
    static Block ec();
    // { (a, b) : a >= 0, b <= 0, ab = 0 } union { 0 } x R_+.
    static Block vc();
    static Block union_of(std::vector<Polyhedron> pieces);

    bool contains(const QVec& y) const;
};

struct DisjunctiveSet {
    int dim = 0;
    std::vector<Block> blocks;

    void add(Block b) {
        dim += b.dim;
        blocks.push_back(std::move(b));
    }

    bool contains(const QVec& y) const;

    // Cartesian products of per-block piece choices, as polyhedra in the
    // full space, together with the choice vector that produced each.
    struct Flattened {
        std::vector<Polyhedron> pieces;
        std::vector<std::vector<int>> choices;  // per piece: block -> local index
    };
    Flattened flatten() const;

    // Slice of a full-space vector belonging to block bi.
    QVec block_slice(const QVec& y, int bi) const;
    int block_offset(int bi) const;
};

}  // namespace stab
