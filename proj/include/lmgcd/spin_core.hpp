#pragma once

// Maximal-spin (S = N/2) sector of N spin-1/2 particles.
//
// Basis ordering is descending M: index k holds |S, M = S - k>, so the
// highest-weight state is index 0. Ladder elements follow Condon-Shortley,
// <M+1|S+|M> = sqrt(S(S+1) - M(M+1)) > 0.

#include <string>
#include <vector>

#include "lmgcd/types.hpp"

namespace lmgcd {

/// Largest particle count the dense sector representation accepts. Four dense
/// complex (N+1)^2 matrices at N = 4096 take about 1.1 GB.
inline constexpr int kMaxParticles = 4096;

struct CollectiveOps {
    int n_particles = 0;
    CMatrix sx;
    CMatrix sy;
    CMatrix sz;
    CMatrix sz2;  // sz * sz

    double spin() const { return 0.5 * n_particles; }
    Eigen::Index dim() const { return n_particles + 1; }
};

struct DickeState {
    int n_particles = 0;
    CVector amplitudes;

    double norm() const { return amplitudes.norm(); }
};

CollectiveOps build_collective_ops(int n_particles);

/// |S = N/2, M>; M must be one of N/2, N/2 - 1, ..., -N/2.
DickeState dicke_state(int n_particles, double m);

/// exp[i theta (Sx sin(phi) - Sy cos(phi))] |M = N/2>, evaluated with an exact
/// Hermitian exponential of the generator.
///
/// The result equals, including its global phase,
///   a_k = sqrt(C(N,k)) cos^{N-k}(theta/2) sin^k(theta/2) exp(+i k phi),
/// which is what `coherent_amplitudes` evaluates directly. Downstream
/// quantities (Husimi values, entropies, overlaps) never depend on the phase.
DickeState coherent_state(const CollectiveOps& ops, double theta, double phi);
DickeState coherent_state(int n_particles, double theta, double phi);

/// Closed-form coherent-state amplitudes (log-space binomials; valid for any N).
CVector coherent_amplitudes(int n_particles, double theta, double phi);

/// ln C(n, k)
double log_binomial(int n, int k);

/// Eigenspaces of the spin flip |M> -> |-M> (index k -> N - k).
enum class Parity { Even, Odd };
std::string to_string(Parity parity);

/// Real orthonormal basis of one flip sector. Column j is
/// (|j> +- |N-j>)/sqrt(2) for j < N/2, and |N/2> alone (even sector, N even).
/// Sector sizes are floor(N/2) + 1 (even) and ceil(N/2) (odd).
class ParityBasis {
public:
    ParityBasis(int n_particles, Parity parity);

    Parity parity() const { return parity_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(first_.size()); }
    Eigen::Index full_dim() const { return full_dim_; }

    /// Q^T op Q for an operator on the full sector.
    CMatrix restrict(const CMatrix& op) const;
    /// Q^T x for the columns of x.
    CMatrix project(const CMatrix& x) const;
    /// Q y, back to the full sector.
    CMatrix lift(const CMatrix& y) const;
    /// Adds Q block Q^T to `target`.
    void embed(const CMatrix& block, CMatrix& target) const;
    RMatrix isometry() const;

private:
    Parity parity_;
    Eigen::Index full_dim_;
    std::vector<Eigen::Index> first_, second_;  // second_ == first_ for the centre state
    double sign_;
};

}  // namespace lmgcd
