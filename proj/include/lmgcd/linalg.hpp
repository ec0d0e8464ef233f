#pragma once

#include "lmgcd/types.hpp"

namespace lmgcd::linalg {

struct HermitianEigen {
    RVector values;   // ascending
    CMatrix vectors;  // orthonormal columns
};

/// Full eigendecomposition of a Hermitian matrix (LAPACK divide and conquer).
/// Only the lower triangle is read.
HermitianEigen eigh(const CMatrix& h);

/// Real symmetric tridiagonal eigendecomposition (LAPACK MRRR).
struct TridiagonalEigen {
    RVector values;
    RMatrix vectors;
};
TridiagonalEigen eigh_tridiagonal(const RVector& diag, const RVector& offdiag);

/// Largest |i - j| with |h(i,j)| > rel_tol * max|h|.
Eigen::Index bandwidth(const CMatrix& h, double rel_tol = 1e-15);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// Tr(a b) without forming the product.
cplx trace_product(const CMatrix& a, const CMatrix& b);

double max_abs(const CMatrix& m);

/// max |(u^dagger u - 1)_{ij}|
double unitarity_defect(const CMatrix& u);

/// Unitary polar factor W V^dagger of u = W S V^dagger.
CMatrix nearest_unitary(const CMatrix& u);

/// Max elementwise deviation from Hermiticity.
double hermiticity_defect(const CMatrix& h);

/// exp(-i h dt) for Hermitian h via eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double dt);

/// Applies exp(-i h dt) to the columns of `target` in place.
///
/// Tridiagonal inputs (bandwidth <= 1) are gauged to a real symmetric
/// tridiagonal matrix by a diagonal unitary and solved with MRRR; the rest go
/// through the dense Hermitian solver. Both routes are exactly unitary up to
/// the orthonormality of the computed eigenvectors.
void apply_hermitian_exp(const CMatrix& h, double dt, CMatrix& target);
void apply_hermitian_exp(const CMatrix& h, double dt, CVector& target);

}  // namespace lmgcd::linalg
