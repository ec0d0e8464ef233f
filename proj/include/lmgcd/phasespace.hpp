#pragma once

// Husimi-function localisation measures on the Bloch sphere.
//
//   Q(theta, phi) = |<theta, phi|psi>|^2
//   IPR  = [ ((N+1)^2 / 4pi) * int Q^2 dOmega ]^-1     (1 for uniform Q)
//   S_w  = -((N+1) / 4pi) * int Q ln Q dOmega
//   L    = exp(S_w) / (N+1)

#include <vector>

#include "lmgcd/propagate.hpp"

namespace lmgcd {

/// Gauss-Legendre in cos(theta) times a uniform periodic grid in phi.
/// Node (i, j) is flattened as i * n_phi + j.
struct PhaseSpaceGrid {
    int n_particles = 0;
    int n_theta = 0;
    int n_phi = 0;
    RVector theta;    // n_theta nodes
    RVector phi;      // n_phi nodes
    RVector weights;  // n_theta * n_phi solid-angle weights, sum 4 pi

    Eigen::Index size() const { return weights.size(); }
};

/// Requires n_theta >= N/2 + 4 and n_phi >= N + 4.
PhaseSpaceGrid build_grid(int n_particles, int n_theta, int n_phi);

/// Resolution used when the caller has no preference: n_theta = N + 8,
/// n_phi = 2N + 16, which integrates Q^2 exactly.
PhaseSpaceGrid default_grid(int n_particles);

/// Q on every grid node, flattened like `weights`.
RVector husimi(const DickeState& psi, const PhaseSpaceGrid& grid);
/// Q for every column of `states` (one column of the result per state).
RMatrix husimi_batch(const CMatrix& states, const PhaseSpaceGrid& grid);

double integrate(const PhaseSpaceGrid& grid, const RVector& values);

enum class IprConvention {
    Normalized,  // [((N+1)^2/4pi) int Q^2]^-1
    AsPrinted,   // ((N+1)^2/4pi) [int Q^2]^-1
};

double ipr_from_husimi(const RVector& q, const PhaseSpaceGrid& grid, IprConvention convention = IprConvention::Normalized);
double ipr(const DickeState& psi, const PhaseSpaceGrid& grid, IprConvention convention = IprConvention::Normalized);

struct LocalizationRecord {
    double ipr = 0.0;
    double wehrl = 0.0;
    double measure_l = 0.0;
};

struct WehrlResult {
    double entropy = 0.0;    // S_w, nats
    double measure_l = 0.0;  // exp(S_w)/(N+1)
};

/// Values below 1e-300 are treated as 0 (0 ln 0 = 0).
WehrlResult wehrl_from_husimi(const RVector& q, const PhaseSpaceGrid& grid);
WehrlResult wehrl(const DickeState& psi, const PhaseSpaceGrid& grid);

struct EigenstateAverages {
    double mean_ipr = 0.0;
    double mean_l = 0.0;
    std::vector<LocalizationRecord> per_state;
};

/// Plain means over all Floquet eigenvectors.
EigenstateAverages eigenstate_averages(const FloquetData& floquet, const PhaseSpaceGrid& grid,
                                       IprConvention convention = IprConvention::Normalized);
EigenstateAverages eigenstate_averages(const CMatrix& eigenvectors, int n_particles, const PhaseSpaceGrid& grid,
                                       IprConvention convention = IprConvention::Normalized);

/// Initial coherent-state directions for a local-chaos map.
struct AngleGrid {
    std::vector<double> theta;
    std::vector<double> phi;
};
/// Cell-centred angles: theta_i = (i + 1/2) pi / n_theta, phi_j = 2 pi j / n_phi.
AngleGrid uniform_angle_grid(int n_theta, int n_phi);

struct ChaosMapPoint {
    double theta = 0.0;
    double phi = 0.0;
    double mean_entropy = 0.0;
};

/// For each coherent initial state on the angle grid, the one-spin entropy of
/// psi(nT) averaged over n_start <= n <= n_end. psi(n_start T) comes from the
/// spectral power of U_F; the window is then stepped with U_F.
std::vector<ChaosMapPoint> local_chaos_scan(const FloquetData& floquet, const CollectiveOps& ops,
                                            const AngleGrid& angles, int n_start, int n_end);

/// One-spin entropy of every column of `states`, using the sparse structure
/// of the collective operators.
RVector one_spin_entropy_batch(const CMatrix& states, const CollectiveOps& ops);

}  // namespace lmgcd
