#pragma once

#include <numbers>
#include <vector>

#include "lmgcd/model.hpp"

namespace lmgcd {

/// Substep scheme. Both factor every substep into exact Hermitian exponentials.
///  - Midpoint: exp(-i h H(t + h/2)), second order.
///  - Magnus4: fourth-order commutator-free Magnus with two exponentials at the
///    Gauss-Legendre nodes, exp(-i h (a2 H1 + a1 H2)) exp(-i h (a1 H1 + a2 H2)),
///    a1,2 = 1/4 +- sqrt(3)/6.
enum class Integrator { Midpoint, Magnus4 };

namespace magnus4 {
inline constexpr double kNode1 = 0.5 - std::numbers::sqrt3 / 6.0;
inline constexpr double kNode2 = 0.5 + std::numbers::sqrt3 / 6.0;
inline constexpr double kWeight1 = 0.25 + std::numbers::sqrt3 / 6.0;
inline constexpr double kWeight2 = 0.25 - std::numbers::sqrt3 / 6.0;
}  // namespace magnus4

std::string to_string(Integrator integrator);
Integrator parse_integrator(const std::string& text);

struct FloquetData {
    CMatrix u_f;
    RVector quasienergies;  // ascending, in (-pi/T, pi/T]
    CMatrix eigenvectors;   // columns
    double period = 0.0;
    DriveConfig config;
};

/// Propagator blocks in the two flip sectors (see ParityBasis). H_CD commutes
/// with the flip, so every propagator is block diagonal in this basis and is
/// integrated block by block.
struct SectorPropagators {
    CMatrix even;
    CMatrix odd;
};

SectorPropagators sector_propagators(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
                                     Integrator integrator = Integrator::Magnus4);

/// Full (N+1)-dimensional matrix from its sector blocks.
CMatrix assemble(const SectorPropagators& sectors, int n_particles);

/// Propagator from t0 to t1 using `steps_per_period` cells per period. Cell
/// boundaries sit on the grid j*T/steps; partial cells at either end are
/// integrated as single shortened substeps.
CMatrix propagate_interval(const CdDrive& drive, double tau, int steps_per_period, double t0, double t1,
                           Integrator integrator = Integrator::Magnus4);

/// U_F with exactly config.steps_per_period substeps.
CMatrix period_propagator(const DriveConfig& config, Integrator integrator = Integrator::Magnus4);
CMatrix period_propagator(const CdDrive& drive, const DriveConfig& config,
                          Integrator integrator = Integrator::Magnus4);

struct ConvergedPropagator {
    CMatrix u_f;
    SectorPropagators sectors;  // blocks of u_f
    int steps_per_period = 0;  // steps used for u_f
    double self_change = 0.0;  // max |U(steps) - U(steps/2)|
    double raw_unitarity_defect = 0.0;  // |U^dagger U - 1| before the polar projection
};

/// Doubles the step count starting from config.steps_per_period until two
/// successive propagators differ by less than `tolerance` in max norm; returns
/// the finer one projected block by block onto the nearest unitary. Throws
/// ConvergenceError past `max_steps`.
ConvergedPropagator converged_period_propagator(const DriveConfig& config, double tolerance = 1e-8,
                                                int max_steps = 1 << 15,
                                                Integrator integrator = Integrator::Magnus4);
ConvergedPropagator converged_period_propagator(const CdDrive& drive, const DriveConfig& config,
                                                double tolerance = 1e-8, int max_steps = 1 << 15,
                                                Integrator integrator = Integrator::Magnus4);

/// psi(nT) for n = 0..n_periods by repeated application of u_f (no renormalisation).
std::vector<DickeState> evolve_stroboscopic(const CMatrix& u_f, const DickeState& psi0, int n_periods);

/// max_n | ||psi_n|| - 1 |
double max_norm_drift(const std::vector<DickeState>& states);

/// States at the requested (sorted, nonnegative) times. One period of
/// propagators is integrated once for the distinct phases t mod T; later
/// periods follow from periodicity of H_CD, psi(nT + s) = U(s, 0) U_F^n psi0.
std::vector<DickeState> micromotion(const DriveConfig& config, const DickeState& psi0,
                                    const std::vector<double>& sample_times,
                                    Integrator integrator = Integrator::Magnus4);
std::vector<DickeState> micromotion(const CdDrive& drive, const DriveConfig& config, const CMatrix& u_f,
                                    const DickeState& psi0, const std::vector<double>& sample_times,
                                    Integrator integrator = Integrator::Magnus4);

/// State at t = tau (end of the lambda: 0 -> 1 sweep).
DickeState anneal_half_period(const DriveConfig& config, const DickeState& psi0,
                              Integrator integrator = Integrator::Magnus4);

/// Plain continuous integration of a state vector from 0 to t_end.
DickeState integrate_state(const CdDrive& drive, const DriveConfig& config, const DickeState& psi0,
                           double t_end, Integrator integrator = Integrator::Magnus4);

}  // namespace lmgcd
