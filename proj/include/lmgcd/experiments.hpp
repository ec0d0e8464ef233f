#pragma once

// Per-point computations behind each figure pipeline. The CLI writes these to
// CSV; the acceptance suite calls them directly.

#include <cstdint>
#include <vector>

#include "lmgcd/phasespace.hpp"
#include "lmgcd/spectral.hpp"

namespace lmgcd::experiments {

/// Drive knobs shared by every experiment.
struct DriveSettings {
    int n_particles = 100;
    double tau = 1.0;
    int steps_per_period = 512;  // starting point of the step doubling
    Integrator integrator = Integrator::Magnus4;
    double tolerance = 1e-8;
    int max_steps = 1 << 15;

    DriveConfig drive_config(double coupling, CdLevel level) const;
};

struct ConvergenceReport {
    int steps_per_period = 0;
    double self_change = 0.0;
    double raw_unitarity_defect = 0.0;
};

/// U_F refined until step doubling changes it by less than the tolerance.
struct Propagator {
    CdDrive drive;
    DriveConfig config;  // steps_per_period set to the converged value
    ConvergedPropagator converged;

    ConvergenceReport report() const { return {converged.steps_per_period, converged.self_change, converged.raw_unitarity_defect}; }
};
Propagator converge(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level);

/// x-polarised state, the ground state of H(lambda = 0).
DickeState x_polarized(const CollectiveOps& ops);

struct SpectrumPoint {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    SpacingStats even, odd, all;
    double r_resolved = 0.0;  // level-weighted mean of the two sectors
    ConvergenceReport report;
};
SpectrumPoint spectrum_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level);

struct FreezePoint {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    double mean_fidelity = 0.0;  // over n = 1 .. periods
    double max_overlap = 0.0;    // max_n |<phi_n|psi0>|^2
    double norm_drift = 0.0;
    std::vector<double> fidelity;  // n = 0 .. periods
    ConvergenceReport report;
};
FreezePoint freeze_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int periods);

struct EntangleRun {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    std::vector<double> strobe_entropy;   // S_ent(nT), n = 0 .. periods
    std::vector<double> micro_times;      // all samples, strobe points included
    std::vector<double> micro_entropy;
    std::vector<double> period_max;       // max of S_ent(t) over samples in [nT, (n+1)T]
    std::vector<int> block_sizes;
    std::vector<int> block_periods;       // n at which block entropies were taken
    std::vector<std::vector<double>> block_entropy;  // [block size][sample]
    double late_mean = 0.0;               // mean S_ent(nT) over n >= transient
    double max_strobe = 0.0;              // max over n >= 1
    double min_period_max = 0.0;
    ConvergenceReport report;
};
EntangleRun entangle_run(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int periods, int samples_per_period, const std::vector<int>& block_sizes, int block_stride,
                         int transient);

struct SqueezeRun {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    std::vector<double> p_mid;  // at (n + 1/2) T, n = 0 .. periods - 1
    std::vector<double> xi2;
    double min_xi2 = 0.0;
    double late_min_xi2 = 0.0;  // over n >= transient
    double late_mean_xi2 = 0.0;
    double max_p_mid = 0.0;
    int squeezed_points = 0;        // xi2 < 1
    int witness_violations = 0;     // xi2 < 1 - 1e-6 with vanishing one-spin entropy
    ConvergenceReport report;
};
SqueezeRun squeeze_run(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                       int periods, int transient);

struct LocalizePoint {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    EigenstateAverages averages;
    RVector quasienergies;
    ConvergenceReport report;
};
LocalizePoint localize_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                             const PhaseSpaceGrid& grid, IprConvention convention);

struct ChaosMapRun {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    std::vector<ChaosMapPoint> points;
    double mean = 0.0;
    double fraction_below = 0.0;  // share of points with <S_ent> < 0.1
    ConvergenceReport report;
};
ChaosMapRun chaos_map(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                      const AngleGrid& angles, int window_start, int window_end);

struct AnnealPoint {
    double coupling = 0.0;
    CdLevel level = CdLevel::None;
    double p_qa = 0.0;     // P_mid after the single sweep 0 -> tau
    double xi2_qa = 0.0;
    double p_max = 0.0;    // max P_mid over (n + 1/2) T, n < cycles
    int p_max_cycle = 0;
    double xi2_opt = 0.0;  // min xi2 over the same points
    std::vector<double> p_mid;
    std::vector<double> xi2;
    ConvergenceReport report;
};
AnnealPoint anneal_point(const CollectiveOps& ops, const DriveSettings& settings, double coupling, CdLevel level,
                         int cycles);

struct OracleSample {
    double t = 0.0;
    double deficit = 0.0;  // 1 - |<sector|projected full>|^2
    double d_one_spin = 0.0;
    double d_block = 0.0;  // m = 2 cut (N >= 3)
    double d_xi2 = 0.0;
    double d_p_mid = 0.0;  // even N
    double d_fidelity = 0.0;
    double d_husimi = 0.0;  // max over the random angles
};

struct OracleCase {
    int n_particles = 6;
    CdLevel level = CdLevel::CD2;
};

struct OracleCaseResult {
    OracleCase spec;
    double coupling = 0.0;
    std::vector<OracleSample> samples;  // t = k tau
    double max_deficit = 0.0;
    double max_observable_error = 0.0;
    double max_leakage = 0.0;
    bool passed = false;
};

/// Full-space vs sector evolution of the x-polarised state over `periods`,
/// compared at every half period. Both sides use the same fixed step grid.
OracleCaseResult oracle_case(const OracleCase& spec, double coupling, double tau, int steps_per_period, int periods,
                             int husimi_angles, std::uint64_t seed);

inline constexpr double kOracleDeficitTolerance = 1e-9;
inline constexpr double kOracleObservableTolerance = 1e-8;

}  // namespace lmgcd::experiments
