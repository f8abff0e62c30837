// Exact dense linear algebra over the rationals: row reduction, kernels, solves.
#pragma once

#include "stab/rational.hpp"

namespace stab {

// Reduce A to reduced row-echelon form in place; returns pivot column indices.
std::vector<int> rref(QMat& A);

int rank(QMat A);

// Basis of { x : A x = 0 }, one QVec per basis vector (possibly empty).
std::vector<QVec> kernel_basis(const QMat& A);

// One solution of A x = b, if any.
bool solve_linear(const QMat& A, const QVec& b, QVec& x);

// Basis of the span of the given vectors.
std::vector<QVec> span_basis(const std::vector<QVec>& vecs, int dim);

// True if v lies in span(basis).
bool in_span(const std::vector<QVec>& basis, const QVec& v, int dim);

// Matrix whose kernel is exactly span(vecs): rows form a basis of the
// orthogonal complement. Used to turn generator data back into equations.
QMat orthogonal_complement(const std::vector<QVec>& vecs, int dim);

}  // namespace stab
