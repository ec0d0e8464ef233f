#pragma once

// State functionals on the maximal-spin sector. Entropies are in nats.

#include "lmgcd/spin_core.hpp"

namespace lmgcd {

double expectation(const DickeState& psi, const CMatrix& op);

/// |<psi0|psi>|^2
double fidelity(const DickeState& psi, const DickeState& psi0);

/// Entropy of one spin against the rest, from
/// rho = 1/2 + (1/N) sum_a <S^a> sigma^a.
/// Throws NumericalError if an eigenvalue of rho leaves [-1e-10, 1 + 1e-10].
double one_spin_entropy(const DickeState& psi, const CollectiveOps& ops);

/// Entropy of an m-spin block (1 <= m <= N-1) of a permutation-symmetric state.
///
/// The state is split with the Dicke coefficients
///   <D_m^q D_{N-m}^{k-q} | D_N^k> = sqrt[C(m,q) C(N-m,k-q) / C(N,k)]
/// into an (m+1) x (N-m+1) coefficient matrix W, and the entropy is taken
/// from the spectrum of W W^dagger.
double block_entropy(const DickeState& psi, int block_size);

/// Reduced density matrix of the m-spin block in its symmetric (m+1)-dim basis.
CMatrix block_reduced_matrix(const DickeState& psi, int block_size);

/// xi^2 = (<Sz^2> - <Sz>^2) / (N/4)
double squeezing_xi2(const DickeState& psi, const CollectiveOps& ops);

/// |<S^z = 0|psi>|^2 (N even).
double dicke_overlap(const DickeState& psi);

/// -sum p ln p over eigenvalues, after checking they lie in [-tol, 1 + tol];
/// checked values are clipped to [0, 1].
double entropy_from_eigenvalues(const RVector& eigenvalues, double tolerance = 1e-10);

}  // namespace lmgcd
