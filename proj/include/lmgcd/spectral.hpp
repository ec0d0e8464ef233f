#pragma once

#include <vector>

#include "lmgcd/propagate.hpp"

namespace lmgcd {

enum class Sector { Even, Odd, Unresolved };
std::string to_string(Sector sector);

struct SpacingStats {
    std::vector<double> r_values;
    double r_mean = 0.0;
    Sector sector = Sector::Unresolved;
    int levels = 0;        // levels used after merging repeats
    int degeneracies = 0;  // levels merged because they repeated within 1e-13
};

/// Eigendecomposition of a unitary U_F = sum_n exp(-i eps_n T) |phi_n><phi_n|.
/// Uses the complex Schur form, whose vectors are orthonormal by construction.
/// Quasienergies are mapped into (-pi/T, pi/T] and sorted ascending.
/// Throws ParameterError if U_F is not unitary to 1e-8.
FloquetData floquet_eigs(const CMatrix& u_f, double period, const DriveConfig& config = {});

/// Pi = exp(i pi S) exp(-i pi Sx): rotation by pi about x with the phase chosen
/// so the spectrum is {+1, -1} for every N. In the descending-M basis it maps
/// |M> to |-M>.
CMatrix parity_operator(const CollectiveOps& ops);

struct ParityResolved {
    std::vector<double> even;   // quasienergies, ascending
    std::vector<double> odd;
    std::vector<int> labels;    // +1 / -1 per column of `eigenvectors`
    CMatrix eigenvectors;       // Floquet eigenvectors, rotated inside resolved clusters
    RVector quasienergies;      // matching `eigenvectors`
    int clusters_resolved = 0;
};

/// Classifies Floquet eigenvectors by <phi|Pi|phi>. Eigenvectors mixed by a
/// near-degeneracy are re-diagonalised against Pi inside their quasienergy
/// cluster. Throws ParameterError if Pi does not commute with U_F to 1e-8 and
/// NumericalError if a cluster cannot be resolved.
ParityResolved parity_resolve(const FloquetData& floquet, const CollectiveOps& ops);

/// Level-spacing ratios of a list of quasienergies on the circle of
/// circumference 2 pi / T (the gap across the zone edge is included).
SpacingStats r_statistics(std::vector<double> quasienergies, double period, Sector sector = Sector::Unresolved);

/// |<phi_n|psi>|^2 for every Floquet eigenvector.
RVector eigenstate_overlaps(const DickeState& psi, const FloquetData& floquet);
double max_eigenstate_overlap(const DickeState& psi, const FloquetData& floquet);

}  // namespace lmgcd
