#pragma once

// Brute-force reference in the full 2^N Hilbert space (N <= 8).
//
// Site i is bit N-1-i of the basis index; a set bit is spin down. The Dicke
// state |S, M = S - k> is the normalised equal-weight sum over bit strings
// with k set bits. Time evolution uses truncated Taylor series on vectors
// rather than eigendecompositions, so it shares no linear-algebra path with
// the sector code.

#include <array>
#include <vector>

#include "lmgcd/propagate.hpp"

namespace lmgcd::oracle {

inline constexpr int kMaxParticles = 8;

struct FullState {
    int n_particles = 0;
    CVector amplitudes;  // length 2^N
};

/// Collective operators as Pauli sums, S^a = (1/2) sum_i sigma_i^a.
struct FullOps {
    int n_particles = 0;
    CMatrix sx;
    CMatrix sy;
    CMatrix sz;

    Eigen::Index dim() const { return sx.rows(); }
};

/// I x ... x P (at `site`) x ... x I
CMatrix site_operator(int n_particles, int site, const Eigen::Matrix2cd& pauli);
FullOps build_full_ops(int n_particles);

/// -(1 - lambda) sum_i sigma_i^x + lambda (J/N) sum_{i,j} sigma_i^z sigma_j^z
CMatrix full_hamiltonian(int n_particles, double lambda, double coupling);
CMatrix full_lambda_derivative(int n_particles, double coupling);

/// 2^N x (N+1) isometry whose columns are the Dicke states.
RMatrix dicke_embedding(int n_particles);
FullState embed(const DickeState& psi);

struct Projection {
    DickeState state;
    double leakage = 0.0;  // 1 - ||P psi||^2
};
Projection project_to_sector(const FullState& psi);

/// exp(-i h dt) v by scaled Taylor series.
CVector taylor_expm_apply(const CMatrix& h, double dt, const CVector& v);

/// Full-space H_CD(t). Krylov operators are nested commutators of the full
/// operators; the scalar coefficients come from the sector drive.
class FullCdDrive {
public:
    FullCdDrive(const CdDrive& sector, int n_particles);
    CMatrix hamiltonian_at(double t, double tau) const;

private:
    const CdDrive* sector_;
    CMatrix a_, b_, o1_;
    std::array<CMatrix, 3> o2_;
};

struct OracleRun {
    std::vector<FullState> full;        // at t = k tau, k = 0 .. 2 n_periods
    std::vector<DickeState> projected;  // same times
    double max_leakage = 0.0;
};

/// Integrates the embedded psi0 over n_periods on the same Magnus4 grid as
/// the sector propagator and projects every half-period sample back.
/// Throws NumericalError if leakage exceeds 1e-10.
OracleRun full_evolve_and_project(const DriveConfig& config, const DickeState& psi0, int n_periods);

double full_block_entropy(const FullState& psi, int block_size);
double full_one_spin_entropy(const FullState& psi);
double full_squeezing_xi2(const FullState& psi, const FullOps& ops);
double full_dicke_overlap(const FullState& psi);
double full_fidelity(const FullState& psi, const FullState& psi0);

/// exp[i theta (Sx sin phi - Sy cos phi)] applied to the all-up product state.
FullState full_coherent_state(const FullOps& ops, double theta, double phi);
double full_husimi(const FullState& psi, const FullOps& ops, double theta, double phi);

}  // namespace lmgcd::oracle
